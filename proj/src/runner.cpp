#include "dynlab/runner.hpp"

#include <json.hpp>

#include "dynlab/io.hpp"

namespace dynlab {

using nlohmann::json;

std::optional<Command> command_from_string(const std::string& name) {
    if (name == "validate") return Command::validate;
    if (name == "simulate") return Command::simulate;
    if (name == "ensemble") return Command::ensemble;
    if (name == "rates") return Command::rates;
    if (name == "equivalence") return Command::equivalence;
    return std::nullopt;
}

namespace {

const char* command_name(Command c) {
    switch (c) {
        case Command::validate: return "validate";
        case Command::simulate: return "simulate";
        case Command::ensemble: return "ensemble";
        case Command::rates: return "rates";
        case Command::equivalence: return "equivalence";
    }
    return "?";
}

json fit_to_json(const RateFit& fit) {
    return json{{"metric", fit.metric},
                {"window", {fit.window_lo, fit.window_hi}},
                {"slope", fit.slope},
                {"target", fit.target},
                {"tolerance", fit.tolerance},
                {"pass", fit.pass},
                {"r2", fit.r_squared},
                {"clipped", fit.clipped}};
}

int run_validate(const ExperimentConfig& config, const std::filesystem::path& out) {
    json checks = json::array();
    bool all_pass = true;
    auto add = [&](json check) {
        all_pass = all_pass && check.at("pass").get<bool>();
        checks.push_back(std::move(check));
    };

    const Problem prob = config.problem.build();
    const ProblemReport pr = verify_problem(prob, 1000, 2.0, config.seed_base);
    add(json{{"name", "problem_structure"},
             {"pass", pr.pass},
             {"max_structure_violation", pr.max_structure_violation},
             {"max_lipschitz_violation", pr.max_lipschitz_violation},
             {"samples", pr.samples},
             {"radius", pr.radius},
             {"seed", pr.seed}});

    if (config.system) {
        const SystemConfig& sys = *config.system;
        switch (sys.variant) {
            case SystemVariant::shbf: {
                const auto r =
                    validate_shbf_assumption(sys.lambda, sys.b->build(sys.t_start));
                add(json{{"name", "shbf_friction_dominates_b"},
                         {"pass", r.pass},
                         {"sup_ratio", r.sup_ratio},
                         {"lambda", r.lambda},
                         {"margin", r.margin}});
                break;
            }
            case SystemVariant::savd: {
                // Rate gate via the exponential image: sup b'/b = 2/(alpha-1)
                // against lambda = 1, i.e. alpha > 3.
                if (sys.alpha > 1.0) {
                    const auto b_img =
                        ScalarSchedule::exponential(1.0, 2.0 / (sys.alpha - 1.0));
                    const auto r = validate_shbf_assumption(1.0, b_img);
                    add(json{{"name", "savd_alpha_gate"},
                             {"pass", r.pass},
                             {"sup_ratio", r.sup_ratio},
                             {"alpha", sys.alpha}});
                } else {
                    add(json{{"name", "savd_alpha_gate"},
                             {"pass", false},
                             {"alpha", sys.alpha}});
                }
                break;
            }
            case SystemVariant::shbfop_alt: {
                const auto r = validate_operator_assumptions(
                    sys.lambda, sys.mu->build(sys.t_start),
                    sys.gamma->build(sys.t_start));
                add(json{{"name", "operator_assumptions"},
                         {"pass", r.pass},
                         {"ell", r.ell},
                         {"sup_mu_dot_over_gamma", r.sup_mu_dot_over_gamma},
                         {"inf_mu_dot_over_mu", r.inf_mu_dot_over_mu},
                         {"positivity", r.positivity},
                         {"diagnostic", r.diagnostic}});
                break;
            }
            case SystemVariant::sfogda_alt: {
                if (sys.alpha > 0.0) {
                    const double lambda = 2.0 * (sys.alpha - 1.0) / sys.alpha;
                    const auto mu_img =
                        ScalarSchedule::exponential(1.0, 2.0 / sys.alpha);
                    const auto r =
                        validate_operator_assumptions(lambda, mu_img, mu_img);
                    add(json{{"name", "sfogda_alpha_gate"},
                             {"pass", r.pass},
                             {"ell", r.ell},
                             {"sup_mu_dot_over_gamma", r.sup_mu_dot_over_gamma},
                             {"positivity", r.positivity},
                             {"alpha", sys.alpha}});
                } else {
                    add(json{{"name", "sfogda_alpha_gate"},
                             {"pass", false},
                             {"alpha", sys.alpha}});
                }
                break;
            }
        }
    }

    json doc{{"checks", std::move(checks)}, {"pass", all_pass}};
    write_text_file(out / "validate.json", doc.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

int run_simulate(const ExperimentConfig& config, const std::filesystem::path& out,
                 std::uint64_t seed, std::vector<std::string>& messages) {
    const SystemSpec spec = config.build_system();
    for (const auto& w : spec.warnings) messages.push_back(w);
    if (config.step > spec.stable_step_hint())
        messages.push_back("integrator.step exceeds the stability hint " +
                           format_double(spec.stable_step_hint()));

    const PathRun run =
        run_path(spec, seed, config.step, config.stride, nullptr, true);
    write_trajectory_csv(out / "trajectory.csv", run.metrics.grid, run.states,
                         spec.dim());
    write_metrics_csv(out / "metrics.csv", run.metrics);
    if (run.diverged)
        throw DivergenceError(run.divergence_index,
                              "simulate: trajectory diverged at step " +
                                  std::to_string(run.divergence_index));
    return 0;
}

int run_ensemble_cmd(const ExperimentConfig& config, const std::filesystem::path& out,
                     std::uint64_t base_seed, std::vector<std::string>& messages) {
    const SystemSpec spec = config.build_system();
    for (const auto& w : spec.warnings) messages.push_back(w);

    const EnsembleStats stats =
        run_ensemble(spec, config.seed_count, base_seed, config.step, config.stride);
    write_ensemble_csv(out / "ensemble.csv", stats);
    if (!stats.diverged_seeds.empty())
        messages.push_back(std::to_string(stats.diverged_seeds.size()) +
                           " path(s) diverged and were excluded");

    json fits = json::array();
    bool all_pass = true;
    std::optional<MetricSeries> path_metrics;
    for (const FitConfig& fc : config.fits) {
        const MetricSeries* source = nullptr;
        MetricSeries mean_series;
        if (fc.statistic == "mean") {
            if (!stats.metrics.count(fc.metric))
                throw InvalidInputError("ensemble: unknown metric '" + fc.metric + "'");
            mean_series.grid = stats.grid;
            mean_series.values[fc.metric] = stats.at(fc.metric).mean;
            source = &mean_series;
        } else {
            if (!path_metrics)
                path_metrics =
                    run_path(spec, base_seed, config.step, config.stride).metrics;
            source = &*path_metrics;
        }
        if (!source->has(fc.metric))
            throw InvalidInputError("fit: unknown metric '" + fc.metric + "'");
        const RateFit fit =
            fit_rate(source->grid, source->at(fc.metric), fc.window_lo, fc.window_hi,
                     fc.target, fc.tolerance, fc.metric);
        all_pass = all_pass && fit.pass;
        json j = fit_to_json(fit);
        j["statistic"] = fc.statistic;
        fits.push_back(std::move(j));
    }
    json doc{{"fits", std::move(fits)}, {"pass", all_pass}};
    write_text_file(out / "ratefit.json", doc.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

int run_rates(const ExperimentConfig& config, const std::filesystem::path& out) {
    json fits = json::array();
    bool all_pass = true;
    std::optional<MetricSeries> path_series, mean_series;
    for (const FitConfig& fc : config.fits) {
        const MetricSeries* source;
        if (fc.statistic == "mean") {
            if (!mean_series)
                mean_series = read_ensemble_mean_csv(out / "ensemble.csv");
            source = &*mean_series;
        } else {
            if (!path_series) path_series = read_metrics_csv(out / "metrics.csv");
            source = &*path_series;
        }
        if (!source->has(fc.metric))
            throw InvalidInputError("rates: unknown metric '" + fc.metric + "'");
        const RateFit fit =
            fit_rate(source->grid, source->at(fc.metric), fc.window_lo, fc.window_hi,
                     fc.target, fc.tolerance, fc.metric);
        all_pass = all_pass && fit.pass;
        json j = fit_to_json(fit);
        j["statistic"] = fc.statistic;
        fits.push_back(std::move(j));
    }
    json doc{{"fits", std::move(fits)}, {"pass", all_pass}};
    write_text_file(out / "ratefit.json", doc.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

int run_equivalence_cmd(const ExperimentConfig& config,
                        const std::filesystem::path& out, std::uint64_t seed) {
    const EquivalenceConfig& eq = *config.equivalence;
    const EquivalencePair pair = config.build_equivalence_pair();
    const VelocityRule rule = eq.kind == TimeMapKind::opt ? VelocityRule::objective
                                                          : VelocityRule::operator_eq;

    const int levels = eq.stochastic ? eq.levels : 1;
    const double finest_step = eq.base_step / static_cast<double>(1 << (levels - 1));
    const auto grid = uniform_grid(eq.s0, eq.s_horizon, finest_step);
    const BrownianPath finest = sample_brownian(seed, grid, problem_dim(pair.spec_s.problem));

    EquivalenceReport report;
    bool pass;
    if (eq.stochastic) {
        report = run_equivalence_study(pair, finest, levels, rule);
        bool monotone = true;
        for (std::size_t i = 0; i + 1 < report.study->errors.size(); ++i)
            monotone = monotone && report.study->errors[i + 1] < report.study->errors[i];
        pass = monotone && report.study->slope >= eq.min_slope;
    } else {
        report = check_equivalence(pair.spec_t, pair.spec_s, pair.map, finest, rule);
        pass = report.sup_position_error <= eq.position_tolerance;
    }

    json doc{{"kind", eq.kind == TimeMapKind::opt ? "opt" : "op"},
             {"alpha", report.alpha},
             {"sup_pos_err", report.sup_position_error},
             {"sup_vel_err", report.sup_velocity_error},
             {"steps", report.steps},
             {"slope", report.study ? json(report.study->slope) : json(nullptr)},
             {"pass", pass}};
    if (report.study) {
        doc["study"] = json{{"steps", report.study->steps},
                            {"errors", report.study->errors}};
    }
    write_text_file(out / "equivalence.json", doc.dump(2) + "\n");
    write_equivalence_csv(out / "equivalence_errors.csv", report);
    return pass ? 0 : 1;
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig& config, Command command,
                          const std::filesystem::path& out_dir,
                          std::uint64_t seed_offset) {
    RunOutcome outcome;
    for (const auto& w : config.warnings) outcome.messages.push_back(w);

    std::filesystem::create_directories(out_dir);
    const std::uint64_t seed = config.seed_base + seed_offset;

    try {
        switch (command) {
            case Command::validate:
                outcome.exit_code = run_validate(config, out_dir);
                break;
            case Command::simulate:
                outcome.exit_code =
                    run_simulate(config, out_dir, seed, outcome.messages);
                break;
            case Command::ensemble:
                outcome.exit_code =
                    run_ensemble_cmd(config, out_dir, seed, outcome.messages);
                break;
            case Command::rates:
                outcome.exit_code = run_rates(config, out_dir);
                break;
            case Command::equivalence:
                outcome.exit_code = run_equivalence_cmd(config, out_dir, seed);
                break;
        }
    } catch (const std::exception& e) {
        outcome.exit_code = 3;
        outcome.messages.push_back(e.what());
        write_text_file(out_dir / (std::string(command_name(command)) + ".failed"),
                        std::string(e.what()) + "\n");
    }
    return outcome;
}

} // namespace dynlab
