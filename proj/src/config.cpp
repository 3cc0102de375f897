#include "dynlab/config.hpp"

#include <cmath>

#include <json.hpp>

namespace dynlab {

using nlohmann::json;

namespace {

class Validator {
  public:
    explicit Validator(std::vector<SchemaIssue>& issues) : issues_(issues) {}

    void error(const std::string& path, const std::string& message) {
        issues_.push_back({path, message});
    }

    // Rejects keys outside the allowed set.
    void check_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool known = false;
            for (const char* k : allowed)
                if (it.key() == k) {
                    known = true;
                    break;
                }
            if (!known) error(path + "." + it.key(), "unknown field");
        }
    }

    bool require(const json& obj, const std::string& path, const char* key) {
        if (!obj.contains(key)) {
            error(path + "." + key, "missing required field");
            return false;
        }
        return true;
    }

    std::optional<double> number(const json& obj, const std::string& path,
                                 const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            error(path + "." + key, "expected a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::string> string(const json& obj, const std::string& path,
                                      const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_string()) {
            error(path + "." + key, "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<Vec> vector(const json& obj, const std::string& path,
                              const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_array()) {
            error(path + "." + key, "expected an array of numbers");
            return std::nullopt;
        }
        Vec out;
        for (const auto& e : v) {
            if (!e.is_number()) {
                error(path + "." + key, "expected an array of numbers");
                return std::nullopt;
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::optional<Mat> matrix(const json& obj, const std::string& path,
                              const char* key) {
        if (!obj.contains(key)) return std::nullopt;
        const auto& v = obj.at(key);
        if (!v.is_array() || v.empty() || !v.front().is_array()) {
            error(path + "." + key, "expected an array of number rows");
            return std::nullopt;
        }
        const std::size_t cols = v.front().size();
        Mat m(v.size(), cols);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_array() || v[i].size() != cols) {
                error(path + "." + key, "ragged matrix rows");
                return std::nullopt;
            }
            for (std::size_t j = 0; j < cols; ++j) {
                if (!v[i][j].is_number()) {
                    error(path + "." + key, "expected numeric entries");
                    return std::nullopt;
                }
                m(i, j) = v[i][j].get<double>();
            }
        }
        return m;
    }

  private:
    std::vector<SchemaIssue>& issues_;
};

std::optional<ScheduleConfig> parse_schedule(Validator& v, const json& obj,
                                             const std::string& path) {
    if (!obj.is_object()) {
        v.error(path, "expected a schedule object");
        return std::nullopt;
    }
    v.check_keys(obj, path, {"family", "coeff", "exponent", "rate", "domain_start"});
    ScheduleConfig sc;
    const auto fam = v.string(obj, path, "family");
    if (!fam) {
        v.error(path + ".family", "missing required field");
        return std::nullopt;
    }
    if (*fam == "constant") {
        sc.family = ScheduleFamily::constant;
    } else if (*fam == "power") {
        sc.family = ScheduleFamily::power;
    } else if (*fam == "power_log") {
        sc.family = ScheduleFamily::power_log;
    } else if (*fam == "exponential") {
        sc.family = ScheduleFamily::exponential;
    } else {
        v.error(path + ".family",
                "must be one of constant|power|power_log|exponential");
        return std::nullopt;
    }
    if (const auto c = v.number(obj, path, "coeff")) {
        if (!(*c > 0.0)) {
            v.error(path + ".coeff", "must be > 0");
            return std::nullopt;
        }
        sc.coeff = *c;
    }
    const bool needs_exponent =
        sc.family == ScheduleFamily::power || sc.family == ScheduleFamily::power_log;
    if (needs_exponent) {
        if (!obj.contains("exponent")) {
            v.error(path + ".exponent", "missing required field");
            return std::nullopt;
        }
        sc.shape = v.number(obj, path, "exponent").value_or(0.0);
    } else if (sc.family == ScheduleFamily::exponential) {
        if (!obj.contains("rate")) {
            v.error(path + ".rate", "missing required field");
            return std::nullopt;
        }
        sc.shape = v.number(obj, path, "rate").value_or(0.0);
    } else if (obj.contains("exponent") || obj.contains("rate")) {
        v.error(path, "constant schedule takes no exponent/rate");
    }
    if (const auto d = v.number(obj, path, "domain_start")) sc.domain_start = *d;
    return sc;
}

std::optional<SystemVariant> parse_variant(Validator& v, const std::string& s,
                                           const std::string& path) {
    if (s == "shbf") return SystemVariant::shbf;
    if (s == "savd") return SystemVariant::savd;
    if (s == "shbfop_alt") return SystemVariant::shbfop_alt;
    if (s == "sfogda_alt") return SystemVariant::sfogda_alt;
    v.error(path, "must be one of shbf|savd|shbfop_alt|sfogda_alt");
    return std::nullopt;
}

} // namespace

ScalarSchedule ScheduleConfig::build(double default_start) const {
    const double t0 = domain_start.value_or(default_start);
    switch (family) {
        case ScheduleFamily::constant: return ScalarSchedule::constant(coeff, t0);
        case ScheduleFamily::power: return ScalarSchedule::power(coeff, shape, t0);
        case ScheduleFamily::power_log:
            return ScalarSchedule::power_log(coeff, shape, t0);
        case ScheduleFamily::exponential:
            return ScalarSchedule::exponential(coeff, shape, t0);
    }
    throw InvalidScheduleError("unreachable schedule family");
}

Problem ProblemConfig::build() const {
    if (name == "quadratic") return make_quadratic(spectrum, minimizer);
    if (name == "rotation") return make_rotation();
    if (name == "saddle") return make_bilinear_saddle(coupling);
    if (name == "quadratic_gradient")
        return gradient_as_operator(make_quadratic(spectrum, minimizer));
    throw InvalidProblemError("unknown problem name: " + name);
}

DiffusionSchedule DiffusionConfig::build(double default_start) const {
    DiffusionSchedule d;
    if (multiplier) d.multiplier = multiplier->build(default_start);
    if (op) d.op = *op;
    return d;
}

SystemSpec ExperimentConfig::build_system() const {
    if (!system) throw InvalidInputError("config has no system section");
    const SystemConfig& sc = *system;
    const Problem prob = problem.build();
    const DiffusionSchedule diff = diffusion.build(sc.t_start);
    switch (sc.variant) {
        case SystemVariant::shbf:
            return build_shbf(sc.lambda, sc.b->build(sc.t_start), diff,
                              std::get<ObjectiveProblem>(prob), sc.initial_position,
                              sc.initial_companion, sc.t_start, sc.horizon);
        case SystemVariant::savd:
            return build_savd(sc.alpha, diff, std::get<ObjectiveProblem>(prob),
                              sc.initial_position, sc.initial_companion, sc.t_start,
                              sc.horizon);
        case SystemVariant::shbfop_alt:
            return build_shbfop_alt(sc.lambda, sc.mu->build(sc.t_start),
                                    sc.gamma->build(sc.t_start), diff,
                                    std::get<MonotoneProblem>(prob),
                                    sc.initial_position, sc.initial_companion,
                                    sc.t_start, sc.horizon);
        case SystemVariant::sfogda_alt:
            return build_sfogda_alt(sc.alpha, sc.beta, diff,
                                    std::get<MonotoneProblem>(prob),
                                    sc.initial_position, sc.initial_companion,
                                    sc.t_start, sc.horizon);
    }
    throw InvalidInputError("unreachable system variant");
}

EquivalencePair ExperimentConfig::build_equivalence_pair() const {
    if (!equivalence) throw InvalidInputError("config has no equivalence section");
    const EquivalenceConfig& eq = *equivalence;
    const Problem prob = problem.build();
    const DiffusionSchedule sigma_s = diffusion.build(eq.s0);
    if (eq.kind == TimeMapKind::opt)
        return build_objective_equivalence(eq.alpha, eq.t0, eq.s0,
                                           std::get<ObjectiveProblem>(prob),
                                           eq.initial_position, eq.initial_companion,
                                           eq.s_horizon, sigma_s);
    return build_operator_equivalence(eq.alpha, eq.beta, eq.t0, eq.s0,
                                      std::get<MonotoneProblem>(prob),
                                      eq.initial_position, eq.initial_companion,
                                      eq.s_horizon, sigma_s);
}

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    json root = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (root.is_discarded() || !root.is_object()) {
        result.errors.push_back({".", "not a JSON object"});
        return result;
    }

    Validator v(result.errors);
    v.check_keys(root, "",
                 {"problem", "system", "diffusion", "integrator", "seeds", "fits",
                  "equivalence", "output"});

    ExperimentConfig cfg;

    // problem
    if (v.require(root, "", "problem")) {
        const json& p = root["problem"];
        if (!p.is_object()) {
            v.error(".problem", "expected an object");
        } else {
            v.check_keys(p, ".problem", {"name", "spectrum", "minimizer", "coupling"});
            cfg.problem.name = v.string(p, ".problem", "name").value_or("");
            if (cfg.problem.name == "quadratic" ||
                cfg.problem.name == "quadratic_gradient") {
                if (v.require(p, ".problem", "spectrum"))
                    cfg.problem.spectrum =
                        v.vector(p, ".problem", "spectrum").value_or(Vec{});
                if (v.require(p, ".problem", "minimizer"))
                    cfg.problem.minimizer =
                        v.vector(p, ".problem", "minimizer").value_or(Vec{});
                for (double q : cfg.problem.spectrum)
                    if (!(q > 0.0)) {
                        v.error(".problem.spectrum", "entries must be > 0");
                        break;
                    }
                if (cfg.problem.spectrum.size() != cfg.problem.minimizer.size())
                    v.error(".problem.minimizer", "dimension must match spectrum");
            } else if (cfg.problem.name == "saddle") {
                if (v.require(p, ".problem", "coupling"))
                    cfg.problem.coupling =
                        v.matrix(p, ".problem", "coupling").value_or(Mat{});
            } else if (cfg.problem.name != "rotation") {
                v.error(".problem.name",
                        "must be one of quadratic|rotation|saddle|quadratic_gradient");
            }
        }
    }

    // system (optional; required by the simulation commands)
    if (root.contains("system")) {
        const json& s = root["system"];
        if (!s.is_object()) {
            v.error(".system", "expected an object");
        } else {
            v.check_keys(s, ".system",
                         {"variant", "lambda", "alpha", "beta", "b", "mu", "gamma",
                          "t_start", "horizon", "initial_position",
                          "initial_companion"});
            SystemConfig sys;
            bool ok = true;
            if (v.require(s, ".system", "variant")) {
                const auto var =
                    parse_variant(v, v.string(s, ".system", "variant").value_or(""),
                                  ".system.variant");
                if (var)
                    sys.variant = *var;
                else
                    ok = false;
            } else {
                ok = false;
            }
            if (ok) {
                sys.t_start = v.number(s, ".system", "t_start").value_or(0.0);
                sys.horizon = v.number(s, ".system", "horizon").value_or(0.0);
                if (!(sys.horizon > 0.0)) v.error(".system.horizon", "must be > 0");
                if (v.require(s, ".system", "initial_position"))
                    sys.initial_position =
                        v.vector(s, ".system", "initial_position").value_or(Vec{});
                if (v.require(s, ".system", "initial_companion"))
                    sys.initial_companion =
                        v.vector(s, ".system", "initial_companion").value_or(Vec{});

                switch (sys.variant) {
                    case SystemVariant::shbf:
                        if (v.require(s, ".system", "lambda"))
                            sys.lambda = v.number(s, ".system", "lambda").value_or(0.0);
                        if (!(sys.lambda > 0.0)) v.error(".system.lambda", "must be > 0");
                        if (v.require(s, ".system", "b"))
                            sys.b = parse_schedule(v, s["b"], ".system.b");
                        break;
                    case SystemVariant::savd:
                        if (v.require(s, ".system", "alpha"))
                            sys.alpha = v.number(s, ".system", "alpha").value_or(0.0);
                        if (!(sys.t_start > 0.0))
                            v.error(".system.t_start", "savd requires t_start > 0");
                        if (sys.alpha <= 3.0)
                            cfg.warnings.push_back(
                                "system.alpha <= 3: savd rate guarantees do not apply");
                        break;
                    case SystemVariant::shbfop_alt:
                        if (v.require(s, ".system", "lambda"))
                            sys.lambda = v.number(s, ".system", "lambda").value_or(0.0);
                        if (!(sys.lambda > 0.0)) v.error(".system.lambda", "must be > 0");
                        if (v.require(s, ".system", "mu"))
                            sys.mu = parse_schedule(v, s["mu"], ".system.mu");
                        if (v.require(s, ".system", "gamma"))
                            sys.gamma = parse_schedule(v, s["gamma"], ".system.gamma");
                        break;
                    case SystemVariant::sfogda_alt:
                        if (v.require(s, ".system", "alpha"))
                            sys.alpha = v.number(s, ".system", "alpha").value_or(0.0);
                        if (v.require(s, ".system", "beta"))
                            sys.beta = v.number(s, ".system", "beta").value_or(0.0);
                        if (!(sys.beta > 0.0)) v.error(".system.beta", "must be > 0");
                        if (!(sys.t_start > 0.0))
                            v.error(".system.t_start", "sfogda requires t_start > 0");
                        if (sys.alpha <= 2.0)
                            cfg.warnings.push_back(
                                "system.alpha <= 2: sfogda rate guarantees do not apply");
                        break;
                }
                cfg.system = std::move(sys);
            }
        }
    }

    // diffusion (optional; absent = zero)
    if (root.contains("diffusion")) {
        const json& d = root["diffusion"];
        if (!d.is_object()) {
            v.error(".diffusion", "expected an object");
        } else {
            v.check_keys(d, ".diffusion", {"multiplier", "operator"});
            if (d.contains("multiplier") && !d["multiplier"].is_null())
                cfg.diffusion.multiplier =
                    parse_schedule(v, d["multiplier"], ".diffusion.multiplier");
            if (d.contains("operator"))
                cfg.diffusion.op = v.matrix(d, ".diffusion", "operator");
        }
    }

    // integrator
    if (v.require(root, "", "integrator")) {
        const json& i = root["integrator"];
        if (!i.is_object()) {
            v.error(".integrator", "expected an object");
        } else {
            v.check_keys(i, ".integrator", {"step", "stride"});
            if (v.require(i, ".integrator", "step"))
                cfg.step = v.number(i, ".integrator", "step").value_or(0.0);
            if (!(cfg.step > 0.0)) v.error(".integrator.step", "must be > 0");
            if (i.contains("stride")) {
                const double st = v.number(i, ".integrator", "stride").value_or(1.0);
                if (!(st >= 1.0) || st != std::floor(st))
                    v.error(".integrator.stride", "must be a positive integer");
                else
                    cfg.stride = static_cast<std::size_t>(st);
            }
        }
    }

    // seeds
    if (root.contains("seeds")) {
        const json& s = root["seeds"];
        if (!s.is_object()) {
            v.error(".seeds", "expected an object");
        } else {
            v.check_keys(s, ".seeds", {"base", "count"});
            if (s.contains("base")) {
                const double b = v.number(s, ".seeds", "base").value_or(0.0);
                if (b < 0.0 || b != std::floor(b))
                    v.error(".seeds.base", "must be a nonnegative integer");
                else
                    cfg.seed_base = static_cast<std::uint64_t>(b);
            }
            if (s.contains("count")) {
                const double c = v.number(s, ".seeds", "count").value_or(1.0);
                if (!(c >= 1.0) || c != std::floor(c))
                    v.error(".seeds.count", "must be a positive integer");
                else
                    cfg.seed_count = static_cast<int>(c);
            }
        }
    }

    // fits
    if (root.contains("fits")) {
        const json& fits = root["fits"];
        if (!fits.is_array()) {
            v.error(".fits", "expected an array");
        } else {
            for (std::size_t i = 0; i < fits.size(); ++i) {
                const std::string path = ".fits[" + std::to_string(i) + "]";
                const json& f = fits[i];
                if (!f.is_object()) {
                    v.error(path, "expected an object");
                    continue;
                }
                v.check_keys(f, path,
                             {"metric", "statistic", "window", "target", "tolerance"});
                FitConfig fc;
                if (v.require(f, path, "metric"))
                    fc.metric = v.string(f, path, "metric").value_or("");
                if (f.contains("statistic")) {
                    fc.statistic = v.string(f, path, "statistic").value_or("path");
                    if (fc.statistic != "path" && fc.statistic != "mean")
                        v.error(path + ".statistic", "must be path|mean");
                }
                if (v.require(f, path, "window")) {
                    const auto w = v.vector(f, path, "window").value_or(Vec{});
                    if (w.size() != 2 || !(w[0] > 0.0) || !(w[1] > w[0]))
                        v.error(path + ".window", "must be [lo, hi] with 0 < lo < hi");
                    else {
                        fc.window_lo = w[0];
                        fc.window_hi = w[1];
                    }
                }
                if (v.require(f, path, "target"))
                    fc.target = v.number(f, path, "target").value_or(0.0);
                if (f.contains("tolerance")) {
                    fc.tolerance = v.number(f, path, "tolerance").value_or(0.0);
                    if (fc.tolerance < 0.0) v.error(path + ".tolerance", "must be >= 0");
                }
                cfg.fits.push_back(std::move(fc));
            }
        }
    }

    // equivalence
    if (root.contains("equivalence")) {
        const json& e = root["equivalence"];
        if (!e.is_object()) {
            v.error(".equivalence", "expected an object");
        } else {
            v.check_keys(e, ".equivalence",
                         {"kind", "alpha", "beta", "t0", "s0", "s_horizon",
                          "base_step", "levels", "stochastic", "position_tolerance",
                          "min_slope", "initial_position", "initial_companion"});
            EquivalenceConfig eq;
            const auto kind = v.string(e, ".equivalence", "kind").value_or("");
            if (kind == "opt")
                eq.kind = TimeMapKind::opt;
            else if (kind == "op")
                eq.kind = TimeMapKind::op;
            else
                v.error(".equivalence.kind", "must be opt|op");
            if (v.require(e, ".equivalence", "alpha"))
                eq.alpha = v.number(e, ".equivalence", "alpha").value_or(0.0);
            eq.beta = v.number(e, ".equivalence", "beta").value_or(1.0);
            eq.t0 = v.number(e, ".equivalence", "t0").value_or(0.0);
            eq.s0 = v.number(e, ".equivalence", "s0").value_or(1.0);
            if (!(eq.s0 > 0.0)) v.error(".equivalence.s0", "must be > 0");
            if (v.require(e, ".equivalence", "s_horizon"))
                eq.s_horizon = v.number(e, ".equivalence", "s_horizon").value_or(0.0);
            if (!(eq.s_horizon > 0.0)) v.error(".equivalence.s_horizon", "must be > 0");
            if (v.require(e, ".equivalence", "base_step"))
                eq.base_step = v.number(e, ".equivalence", "base_step").value_or(0.0);
            if (!(eq.base_step > 0.0)) v.error(".equivalence.base_step", "must be > 0");
            if (e.contains("levels")) {
                const double l = v.number(e, ".equivalence", "levels").value_or(1.0);
                if (!(l >= 1.0) || l != std::floor(l))
                    v.error(".equivalence.levels", "must be a positive integer");
                else
                    eq.levels = static_cast<int>(l);
            }
            if (e.contains("stochastic")) {
                if (!e["stochastic"].is_boolean())
                    v.error(".equivalence.stochastic", "expected a boolean");
                else
                    eq.stochastic = e["stochastic"].get<bool>();
            }
            eq.position_tolerance =
                v.number(e, ".equivalence", "position_tolerance").value_or(1e-6);
            eq.min_slope = v.number(e, ".equivalence", "min_slope").value_or(0.4);
            if (v.require(e, ".equivalence", "initial_position"))
                eq.initial_position =
                    v.vector(e, ".equivalence", "initial_position").value_or(Vec{});
            if (v.require(e, ".equivalence", "initial_companion"))
                eq.initial_companion =
                    v.vector(e, ".equivalence", "initial_companion").value_or(Vec{});
            cfg.equivalence = std::move(eq);
        }
    }

    // output
    if (root.contains("output")) {
        const json& o = root["output"];
        if (!o.is_object()) {
            v.error(".output", "expected an object");
        } else {
            v.check_keys(o, ".output", {"directory"});
            cfg.output_directory = v.string(o, ".output", "directory").value_or("");
        }
    }

    if (!result.errors.empty()) return result;
    result.config = std::move(cfg);
    return result;
}

} // namespace dynlab
