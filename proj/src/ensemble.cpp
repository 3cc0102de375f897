#include "dynlab/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace dynlab {

int resolve_thread_count() {
    int n = 0;
    if (const char* env = std::getenv("DYNLAB_THREADS")) n = std::atoi(env);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(n, 1);
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int workers = std::min<int>(resolve_thread_count(), static_cast<int>(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

} // namespace

PathRun run_path(const SystemSpec& spec, std::uint64_t seed, double step,
                 std::size_t stride, const MartingaleProbe* probe,
                 bool record_states) {
    const std::size_t grid_n = uniform_step_count(spec.horizon, step);
    const auto idx = strided_indices(grid_n + 1, stride);

    const std::size_t d = static_cast<std::size_t>(spec.dim());
    MetricEvaluator eval(spec);
    const auto names = eval.names();

    PathRun run;
    run.metrics.grid.reserve(idx.size());
    for (const auto& name : names) run.metrics.values[name].reserve(idx.size());

    Vec pos(spec.initial_position), comp(spec.initial_companion);
    Vec dpos(d), dcomp(d), noise(d), mapped(d), row(names.size());
    GaussianStream stream(seed);
    const bool has_noise = !spec.diffusion.is_zero();
    const bool has_op = spec.diffusion.has_operator();

    if (record_states) run.states.reserve(idx.size() * 2 * d);
    std::size_t next_record = 0;
    auto record = [&](std::size_t i, double t) {
        if (next_record < idx.size() && idx[next_record] == i) {
            run.metrics.grid.push_back(t);
            eval.row(t, pos, comp, row);
            for (std::size_t m = 0; m < names.size(); ++m)
                run.metrics.values[names[m]].push_back(row[m]);
            if (record_states) {
                run.states.insert(run.states.end(), pos.begin(), pos.end());
                run.states.insert(run.states.end(), comp.begin(), comp.end());
            }
            ++next_record;
        }
    };
    auto ok = [&] {
        double n2 = 0.0;
        for (double v : pos) n2 += v * v;
        for (double v : comp) n2 += v * v;
        return std::isfinite(n2) && n2 <= kDivergenceThreshold * kDivergenceThreshold;
    };

    record(0, spec.t_start);
    for (std::size_t i = 0; i < grid_n; ++i) {
        // Times and step lengths reproduce the materialized-grid arithmetic
        // bit for bit, so this route equals integrate_em on sample_brownian.
        const double t = spec.t_start + static_cast<double>(i) * step;
        const double t_next = spec.t_start + static_cast<double>(i + 1) * step;
        const double dt = t_next - t;
        spec.drift(t, pos, comp, dpos, dcomp);
        if (has_noise) {
            // Draw order matches sample_brownian: d normals per step, scaled
            // by sqrt(dt), then sigma(t_i) applied.
            const double sqrt_dt = std::sqrt(dt);
            for (std::size_t k = 0; k < d; ++k) noise[k] = sqrt_dt * stream.next();
            if (has_op) {
                spec.diffusion.op.apply(noise, mapped);
                std::swap(noise, mapped);
            }
            const double m = spec.diffusion.multiplier->value(t);
            if (probe) {
                double acc = 0.0;
                for (std::size_t k = 0; k < d; ++k)
                    acc += (probe->eta * (pos[k] - probe->y_star[k]) + comp[k]) * m *
                           noise[k];
                run.martingale_end += acc;
            }
            for (std::size_t k = 0; k < d; ++k) noise[k] *= m;
        }
        for (std::size_t k = 0; k < d; ++k) {
            pos[k] += dt * dpos[k];
            comp[k] += dt * dcomp[k];
        }
        if (has_noise)
            for (std::size_t k = 0; k < d; ++k) comp[k] += noise[k];
        if (!ok()) {
            run.diverged = true;
            run.divergence_index = i + 1;
            return run;
        }
        record(i + 1, t_next);
    }
    return run;
}

EnsembleStats run_ensemble(const SystemSpec& spec, int n_paths,
                           std::uint64_t base_seed, double step,
                           std::size_t stride) {
    if (n_paths < 1) throw InvalidInputError("run_ensemble: n_paths >= 1 required");
    uniform_step_count(spec.horizon, step); // grid errors surface before workers start

    EnsembleStats stats;
    stats.n_paths = n_paths;
    stats.seeds.reserve(static_cast<std::size_t>(n_paths));
    for (int i = 0; i < n_paths; ++i)
        stats.seeds.push_back(base_seed + static_cast<std::uint64_t>(i));

    std::vector<PathRun> runs(static_cast<std::size_t>(n_paths));
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t i) {
        runs[i] = run_path(spec, stats.seeds[i], step, stride);
    });

    std::vector<const MetricSeries*> kept;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].diverged)
            stats.diverged_seeds.push_back(stats.seeds[i]);
        else
            kept.push_back(&runs[i].metrics);
    }
    if (stats.diverged_seeds.size() * 10 > static_cast<std::size_t>(n_paths))
        throw EnsembleFailureError("run_ensemble: more than 10% of paths diverged");
    if (kept.empty()) throw EnsembleFailureError("run_ensemble: all paths diverged");

    stats.grid = kept.front()->grid;
    stats.ci_defined = kept.size() >= 2;
    const double n_eff = static_cast<double>(kept.size());
    const std::size_t n_pts = stats.grid.size();

    for (const auto& [name, _] : kept.front()->values) {
        MetricStats ms;
        ms.mean.resize(n_pts);
        ms.sd.resize(n_pts);
        ms.ci_lo.resize(n_pts);
        ms.ci_hi.resize(n_pts);
        for (std::size_t j = 0; j < n_pts; ++j) {
            // Track bit-equality so deterministic ensembles report exactly
            // zero spread.
            const double first = kept.front()->values.at(name)[j];
            bool all_equal = true;
            double sum = 0.0;
            for (const auto* series : kept) {
                const double v = series->values.at(name)[j];
                all_equal = all_equal && v == first;
                sum += v;
            }
            const double mean = all_equal ? first : sum / n_eff;
            double sd = 0.0;
            if (!all_equal && kept.size() >= 2) {
                double ss = 0.0;
                for (const auto* series : kept) {
                    const double dv = series->values.at(name)[j] - mean;
                    ss += dv * dv;
                }
                sd = std::sqrt(ss / (n_eff - 1.0));
            }
            ms.mean[j] = mean;
            ms.sd[j] = sd;
            const double half = stats.ci_defined ? 1.96 * sd / std::sqrt(n_eff) : 0.0;
            ms.ci_lo[j] = mean - half;
            ms.ci_hi[j] = mean + half;
        }
        stats.metrics.emplace(name, std::move(ms));
    }
    return stats;
}

MartingaleReport martingale_mean_check(const SystemSpec& spec, int n_paths,
                                       std::uint64_t base_seed, double step,
                                       double eta, const Vec& y_star) {
    if (spec.variant != SystemVariant::shbf)
        throw InvalidInputError("martingale_mean_check: shbf spec required");
    if (!(eta > 0.0 && eta < spec.lambda))
        throw InvalidParameterError("martingale_mean_check: eta must lie in (0, lambda)");
    if (n_paths < 1)
        throw InvalidInputError("martingale_mean_check: n_paths >= 1 required");
    if (y_star.size() != static_cast<std::size_t>(spec.dim()))
        throw InvalidInputError("martingale_mean_check: y_star dimension mismatch");
    uniform_step_count(spec.horizon, step);

    MartingaleProbe probe{eta, y_star};
    std::vector<PathRun> runs(static_cast<std::size_t>(n_paths));
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t i) {
        // stride 0 records only endpoints; the martingale sum accrues per step
        runs[i] = run_path(spec, base_seed + i, step,
                           std::numeric_limits<std::size_t>::max(), &probe);
    });

    MartingaleReport report;
    std::vector<double> values;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].diverged)
            report.diverged_seeds.push_back(base_seed + i);
        else
            values.push_back(runs[i].martingale_end);
    }
    report.n_paths = static_cast<int>(values.size());
    if (values.empty())
        throw EnsembleFailureError("martingale_mean_check: all paths diverged");

    double sum = 0.0;
    for (double v : values) sum += v;
    report.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        const double dv = v - report.mean;
        ss += dv * dv;
    }
    const double sd = values.size() >= 2
                          ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                          : 0.0;
    report.stderr_mean = sd / std::sqrt(static_cast<double>(values.size()));
    report.pass = std::abs(report.mean) <= 3.0 * report.stderr_mean;
    return report;
}

} // namespace dynlab
