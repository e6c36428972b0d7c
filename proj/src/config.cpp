#include "hitl/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "hitl/io.hpp"

namespace hitl {

namespace {

constexpr std::uint64_t kScheduleStream = std::uint64_t{1} << 61;

std::string join_issues(const std::vector<std::string>& issues) {
    std::ostringstream out;
    out << "invalid configuration (" << issues.size() << " issue"
        << (issues.size() == 1 ? "" : "s") << ")";
    for (const auto& i : issues) out << "\n  - " << i;
    return out.str();
}

// Typed field access over one JSON object: wrong types and unknown keys
// become recorded issues instead of exceptions, so one pass collects
// everything.
class Fields {
public:
    Fields(const nlohmann::json& j, std::string path, std::vector<std::string>& issues)
        : j_(j), path_(std::move(path)), issues_(issues) {}

    bool has(const char* key) const { return j_.contains(key); }

    double number(const char* key, double def) { return opt_number(key).value_or(def); }

    std::optional<double> opt_number(const char* key) {
        mark(key);
        if (!j_.contains(key)) return std::nullopt;
        if (!j_[key].is_number()) {
            issue(key, "must be a number");
            return std::nullopt;
        }
        return j_[key].get<double>();
    }

    std::uint64_t uinteger(const char* key, std::uint64_t def) {
        mark(key);
        if (!j_.contains(key)) return def;
        if (!j_[key].is_number_integer() || (j_[key].is_number_integer() && j_[key].is_number_unsigned() == false && j_[key].get<long long>() < 0)) {
            issue(key, "must be a non-negative integer");
            return def;
        }
        return j_[key].get<std::uint64_t>();
    }

    std::string str(const char* key, std::string def) {
        mark(key);
        if (!j_.contains(key)) return def;
        if (!j_[key].is_string()) {
            issue(key, "must be a string");
            return def;
        }
        return j_[key].get<std::string>();
    }

    bool boolean(const char* key, bool def) {
        mark(key);
        if (!j_.contains(key)) return def;
        if (!j_[key].is_boolean()) {
            issue(key, "must be a boolean");
            return def;
        }
        return j_[key].get<bool>();
    }

    std::optional<std::vector<double>> number_array(const char* key) {
        mark(key);
        if (!j_.contains(key)) return std::nullopt;
        if (!j_[key].is_array()) {
            issue(key, "must be an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        for (const auto& v : j_[key]) {
            if (!v.is_number()) {
                issue(key, "must be an array of numbers");
                return std::nullopt;
            }
            out.push_back(v.get<double>());
        }
        return out;
    }

    const nlohmann::json* object(const char* key) {
        mark(key);
        if (!j_.contains(key)) return nullptr;
        if (!j_[key].is_object()) {
            issue(key, "must be an object");
            return nullptr;
        }
        return &j_[key];
    }

    const nlohmann::json* array(const char* key) {
        mark(key);
        if (!j_.contains(key)) return nullptr;
        if (!j_[key].is_array()) {
            issue(key, "must be an array");
            return nullptr;
        }
        return &j_[key];
    }

    void issue(const char* key, const std::string& what) {
        issues_.push_back(path_ + key + ": " + what);
    }

    void constraint(bool ok, const char* key, const std::string& rule) {
        if (!ok) issues_.push_back(path_ + key + ": constraint violated: " + rule);
    }

    // call last: flags keys that are not part of the schema
    void finish() {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) issues_.push_back(path_ + key + ": unknown field");
    }

private:
    void mark(const char* key) { seen_.insert(key); }

    const nlohmann::json& j_;
    std::string path_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
};

std::optional<ExperimentMode> parse_mode(const std::string& s) {
    if (s == "ddm") return ExperimentMode::ddm;
    if (s == "multicue-2afc") return ExperimentMode::multicue_2afc;
    if (s == "race") return ExperimentMode::race;
    if (s == "multicue-race") return ExperimentMode::multicue_race;
    if (s == "lip") return ExperimentMode::lip;
    if (s == "reward-map") return ExperimentMode::reward_map;
    if (s == "supervise") return ExperimentMode::supervise;
    return std::nullopt;
}

std::optional<Criterion> parse_criterion(const std::string& s) {
    if (s == "absolute-threshold") return Criterion::absolute_threshold;
    if (s == "max-vs-next") return Criterion::max_vs_next;
    if (s == "max-vs-average") return Criterion::max_vs_average;
    return std::nullopt;
}

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::absolute_threshold: return "absolute-threshold";
        case Criterion::max_vs_next: return "max-vs-next";
        case Criterion::max_vs_average: return "max-vs-average";
    }
    return "absolute-threshold";
}

// Schedule from either explicit intervals or a cue-validity strategy block.
std::optional<Schedule> parse_schedule(const nlohmann::json& j, const std::string& path,
                                       std::vector<std::string>& issues, std::size_t n_cues,
                                       double horizon, std::uint64_t seed) {
    const std::size_t issues_before = issues.size();
    Fields f(j, path, issues);
    const auto* intervals = f.array("intervals");
    const auto validities = f.number_array("validities");
    const double gamma_E = f.number("gamma_E", 1.0);
    const auto L = static_cast<std::size_t>(f.uinteger("L", 10));
    const std::string mode_s = f.str("mode", "deterministic");
    f.finish();

    if (intervals && validities)
        f.issue("intervals", "give either explicit intervals or a validities block, not both");

    if (intervals && !validities) {
        Schedule s;
        s.horizon = horizon;
        for (const auto& iv : *intervals) {
            if (!iv.is_array() || iv.size() != 3 || !iv[0].is_number() || !iv[1].is_number() ||
                !iv[2].is_number_integer()) {
                f.issue("intervals", "each interval must be [t_begin, t_end, cue]");
                return std::nullopt;
            }
            s.intervals.push_back({iv[0].get<double>(), iv[1].get<double>(), iv[2].get<int>()});
        }
        try {
            s.validate(n_cues);
        } catch (const std::invalid_argument& e) {
            f.issue("intervals", e.what());
            return std::nullopt;
        }
        return s;
    }

    if (!validities) {
        f.issue("validities", "schedule needs either intervals or validities");
        return std::nullopt;
    }
    if (validities->size() != n_cues) {
        f.issue("validities", "must list one validity per cue");
        return std::nullopt;
    }
    for (double q : *validities) f.constraint(q >= 0.0 && q <= 1.0, "validities", "q in [0, 1]");
    f.constraint(gamma_E >= 0.0, "gamma_E", "gamma_E >= 0");
    f.constraint(L >= 1, "L", "L >= 1");
    ScheduleMode mode = ScheduleMode::deterministic;
    if (mode_s == "probabilistic") mode = ScheduleMode::probabilistic;
    else if (mode_s != "deterministic") {
        f.issue("mode", "must be \"deterministic\" or \"probabilistic\"");
        return std::nullopt;
    }
    if (issues.size() != issues_before) return std::nullopt;

    const auto weights = softmax_weights(CueValidities{*validities}, gamma_E);
    RngStream rng(seed, kScheduleStream);
    return build_schedule(weights, L, horizon, rng, mode);
}

nlohmann::json schedule_json(const Schedule& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& iv : s.intervals) arr.push_back({iv.t_begin, iv.t_end, iv.cue});
    return {{"intervals", arr}};
}

DdmParams parse_ddm(const nlohmann::json& j, std::vector<std::string>& issues) {
    Fields f(j, "model.", issues);
    DdmParams p;
    p.mu = f.number("mu", 1.0);
    p.lambda = f.number("lambda", 0.0);
    p.sigma = f.number("sigma", 1.0);
    p.theta_A = f.number("theta_A", 1.0);
    p.theta_B = f.number("theta_B", -1.0);
    p.correct = static_cast<int>(f.uinteger("correct", 0));
    f.finish();
    f.constraint(p.sigma > 0.0, "sigma", "sigma > 0");
    f.constraint(p.lambda >= 0.0, "lambda", "lambda >= 0");
    f.constraint(p.theta_A > 0.0 && p.theta_B < 0.0, "theta_A", "theta_B < 0 < theta_A");
    f.constraint(p.correct == 0 || p.correct == 1, "correct", "correct in {0, 1}");
    return p;
}

MultiCue2afcParams parse_multicue_2afc(const nlohmann::json& j, std::vector<std::string>& issues,
                                       double horizon, std::uint64_t seed) {
    Fields f(j, "model.", issues);
    MultiCue2afcParams p;
    if (const auto* cues = f.array("cues")) {
        for (const auto& c : *cues) {
            if (!c.is_object() || !c.contains("mu")) {
                f.issue("cues", "each cue must be an object with mu (and optional lambda)");
                break;
            }
            MultiCue2afcParams::Cue cue;
            cue.mu = c["mu"].get<double>();
            cue.lambda = c.value("lambda", 0.0);
            p.cues.push_back(cue);
        }
    } else {
        f.issue("cues", "required for multicue-2afc");
    }
    p.sigma = f.number("sigma", 1.0);
    p.theta_A = f.number("theta_A", 1.0);
    p.theta_B = f.number("theta_B", -1.0);
    p.correct = static_cast<int>(f.uinteger("correct", 0));
    const auto* sched = f.object("schedule");
    f.finish();
    f.constraint(p.sigma > 0.0, "sigma", "sigma > 0");
    f.constraint(p.theta_A > 0.0 && p.theta_B < 0.0, "theta_A", "theta_B < 0 < theta_A");
    for (const auto& c : p.cues) f.constraint(c.lambda >= 0.0, "cues", "lambda >= 0");
    if (!sched) {
        f.issue("schedule", "required for multicue-2afc");
    } else if (!p.cues.empty()) {
        if (auto s = parse_schedule(*sched, "model.schedule.", issues, p.cues.size(), horizon, seed))
            p.schedule = *s;
    }
    return p;
}

RaceConfig parse_race(const nlohmann::json& j, std::vector<std::string>& issues) {
    Fields f(j, "model.", issues);
    RaceConfig c;
    c.leak = f.number("leak", 0.0);
    c.inhibition = f.number("inhibition", 0.0);
    if (auto inputs = f.number_array("inputs")) c.inputs = *inputs;
    else f.issue("inputs", "required for race");
    const std::size_t K = c.inputs.size();
    c.sigma = f.number_array("sigma").value_or(std::vector<double>(K, 1.0));
    c.thresholds = f.number_array("thresholds").value_or(std::vector<double>(K, 1.0));
    const std::string crit = f.str("criterion", "absolute-threshold");
    if (auto parsed = parse_criterion(crit)) c.criterion = *parsed;
    else f.issue("criterion", "must be absolute-threshold, max-vs-next or max-vs-average");
    c.margin = f.opt_number("margin");
    c.correct = static_cast<int>(f.uinteger("correct", 0));
    f.finish();
    f.constraint(K >= 2, "inputs", "at least 2 pools");
    f.constraint(c.sigma.size() == K, "sigma", "one sigma per pool");
    f.constraint(c.thresholds.size() == K, "thresholds", "one threshold per pool");
    f.constraint(c.leak >= 0.0, "leak", "leak >= 0");
    f.constraint(c.inhibition >= 0.0, "inhibition", "inhibition >= 0");
    for (double s : c.sigma) f.constraint(s > 0.0, "sigma", "sigma > 0");
    for (double th : c.thresholds) f.constraint(th > 0.0, "thresholds", "threshold > 0");
    if (c.margin) f.constraint(*c.margin > 0.0, "margin", "margin > 0");
    f.constraint(c.correct >= 0 && static_cast<std::size_t>(c.correct) < std::max<std::size_t>(K, 1),
                 "correct", "correct pool index in range");
    return c;
}

MultiCueRaceConfig parse_multicue_race(const nlohmann::json& j, std::vector<std::string>& issues,
                                       double horizon, std::uint64_t seed) {
    Fields f(j, "model.", issues);
    MultiCueRaceConfig c;
    if (const auto* cues = f.array("cues")) {
        for (const auto& cue : *cues) {
            if (!cue.is_object()) {
                f.issue("cues", "each cue must be an object with leak and inhibition");
                break;
            }
            c.cues.push_back({cue.value("leak", 0.0), cue.value("inhibition", 0.0)});
        }
    } else {
        f.issue("cues", "required for multicue-race");
    }
    if (const auto* rows = f.array("inputs")) {
        for (const auto& row : *rows) {
            if (!row.is_array()) {
                f.issue("inputs", "must be an array of per-pool rows");
                break;
            }
            std::vector<double> r;
            for (const auto& v : row) r.push_back(v.get<double>());
            c.inputs.push_back(std::move(r));
        }
    } else {
        f.issue("inputs", "required for multicue-race");
    }
    const std::size_t K = c.inputs.size();
    const std::size_t M = c.cues.size();
    c.sigma = f.number_array("sigma").value_or(std::vector<double>(K, 1.0));
    c.thresholds = f.number_array("thresholds").value_or(std::vector<double>(K, 1.0));
    const std::string crit = f.str("criterion", "absolute-threshold");
    if (auto parsed = parse_criterion(crit)) c.criterion = *parsed;
    else f.issue("criterion", "must be absolute-threshold, max-vs-next or max-vs-average");
    c.margin = f.opt_number("margin");
    c.correct = static_cast<int>(f.uinteger("correct", 0));
    const auto* sched = f.object("schedule");
    f.finish();
    f.constraint(K >= 2, "inputs", "at least 2 pools");
    f.constraint(M >= 1, "cues", "at least one cue");
    for (const auto& row : c.inputs)
        f.constraint(row.size() == M, "inputs", "one input per (pool, cue)");
    f.constraint(c.sigma.size() == K, "sigma", "one sigma per pool");
    f.constraint(c.thresholds.size() == K, "thresholds", "one threshold per pool");
    for (const auto& cue : c.cues) {
        f.constraint(cue.leak >= 0.0, "cues", "leak >= 0");
        f.constraint(cue.inhibition >= 0.0, "cues", "inhibition >= 0");
    }
    for (double s : c.sigma) f.constraint(s > 0.0, "sigma", "sigma > 0");
    for (double th : c.thresholds) f.constraint(th > 0.0, "thresholds", "threshold > 0");
    if (c.margin) f.constraint(*c.margin > 0.0, "margin", "margin > 0");
    if (!sched) {
        f.issue("schedule", "required for multicue-race");
    } else if (M >= 1) {
        if (auto s = parse_schedule(*sched, "model.schedule.", issues, M, horizon, seed))
            c.schedule = *s;
    }
    return c;
}

LipConfig parse_lip(const nlohmann::json& j, std::vector<std::string>& issues) {
    Fields f(j, "model.", issues);
    const LipConfig def = default_surface_model();
    LipConfig c;
    c.leak = f.number("leak", def.leak);
    c.gamma_E = f.number("gamma_E", def.gamma_E);
    c.gamma_I = f.number("gamma_I", def.gamma_I);
    c.inputs = f.number_array("inputs").value_or(def.inputs);
    c.sigma = f.number_array("sigma").value_or(def.sigma);
    c.thresholds = f.number_array("thresholds").value_or(def.thresholds);
    c.correct = static_cast<int>(f.uinteger("correct", 0));
    f.finish();
    const std::size_t K = c.inputs.size();
    f.constraint(K >= 2, "inputs", "at least 2 pools");
    f.constraint(c.sigma.size() == K, "sigma", "one sigma per pool");
    f.constraint(c.thresholds.size() == K, "thresholds", "one threshold per pool");
    f.constraint(c.gamma_E > 0.0, "gamma_E", "gamma_E > 0");
    f.constraint(c.gamma_I >= 0.0, "gamma_I", "gamma_I >= 0");
    f.constraint(c.leak >= 0.0, "leak", "leak >= 0");
    for (double s : c.sigma) f.constraint(s > 0.0, "sigma", "sigma > 0");
    for (double th : c.thresholds) f.constraint(th > 0.0, "thresholds", "threshold > 0");
    f.constraint(c.correct >= 0 && static_cast<std::size_t>(c.correct) < std::max<std::size_t>(K, 1),
                 "correct", "correct pool index in range");
    return c;
}

nlohmann::json model_json(const ModelConfig& m) {
    return std::visit(
        [](const auto& c) -> nlohmann::json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, DdmParams>) {
                return {{"kind", "ddm"},       {"mu", c.mu},
                        {"lambda", c.lambda},  {"sigma", c.sigma},
                        {"theta_A", c.theta_A}, {"theta_B", c.theta_B},
                        {"correct", c.correct}};
            } else if constexpr (std::is_same_v<T, MultiCue2afcParams>) {
                nlohmann::json cues = nlohmann::json::array();
                for (const auto& cue : c.cues) cues.push_back({{"mu", cue.mu}, {"lambda", cue.lambda}});
                return {{"kind", "multicue-2afc"}, {"cues", cues},
                        {"sigma", c.sigma},        {"theta_A", c.theta_A},
                        {"theta_B", c.theta_B},    {"correct", c.correct},
                        {"schedule", schedule_json(c.schedule)}};
            } else if constexpr (std::is_same_v<T, RaceConfig>) {
                return {{"kind", "race"},
                        {"leak", c.leak},
                        {"inhibition", c.inhibition},
                        {"inputs", c.inputs},
                        {"sigma", c.sigma},
                        {"thresholds", c.thresholds},
                        {"criterion", criterion_name(c.criterion)},
                        {"margin", c.resolved_margin()},
                        {"correct", c.correct}};
            } else if constexpr (std::is_same_v<T, MultiCueRaceConfig>) {
                nlohmann::json cues = nlohmann::json::array();
                for (const auto& cue : c.cues)
                    cues.push_back({{"leak", cue.leak}, {"inhibition", cue.inhibition}});
                return {{"kind", "multicue-race"},
                        {"cues", cues},
                        {"inputs", c.inputs},
                        {"sigma", c.sigma},
                        {"thresholds", c.thresholds},
                        {"criterion", criterion_name(c.criterion)},
                        {"margin", c.resolved_margin()},
                        {"correct", c.correct},
                        {"schedule", schedule_json(c.schedule)}};
            } else {
                return {{"kind", "lip"},
                        {"leak", c.leak},
                        {"gamma_E", c.gamma_E},
                        {"gamma_I", c.gamma_I},
                        {"inputs", c.inputs},
                        {"sigma", c.sigma},
                        {"thresholds", c.thresholds},
                        {"correct", c.correct}};
            }
        },
        m);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> found)
    : std::runtime_error(join_issues(found)), issues(std::move(found)) {}

LipConfig default_surface_model() {
    LipConfig c;
    c.leak = 1.0;
    c.gamma_E = 1.0;
    c.gamma_I = 0.5;
    c.inputs = {2.0, 1.0};
    c.sigma = {1.0, 1.0};
    c.thresholds = {1.0, 1.0};
    c.correct = 0;
    return c;
}

const char* mode_name(ExperimentMode mode) {
    switch (mode) {
        case ExperimentMode::ddm: return "ddm";
        case ExperimentMode::multicue_2afc: return "multicue-2afc";
        case ExperimentMode::race: return "race";
        case ExperimentMode::multicue_race: return "multicue-race";
        case ExperimentMode::lip: return "lip";
        case ExperimentMode::reward_map: return "reward-map";
        case ExperimentMode::supervise: return "supervise";
    }
    return "ddm";
}

std::string ExperimentConfig::digest() const { return hex64(fnv1a64(canonical.dump())); }

ExperimentConfig parse_config(const nlohmann::json& j) {
    std::vector<std::string> issues;
    if (!j.is_object()) throw ConfigError({"top level: must be a JSON object"});

    Fields f(j, "", issues);
    ExperimentConfig cfg;

    const std::string mode_s = f.str("mode", "");
    if (mode_s.empty()) {
        f.issue("mode", "required");
    } else if (auto m = parse_mode(mode_s)) {
        cfg.mode = *m;
    } else {
        f.issue("mode", "unknown mode \"" + mode_s + "\"");
    }

    cfg.seed = f.uinteger("seed", cfg.seed);
    cfg.out_dir = f.str("out_dir", cfg.out_dir);
    cfg.trials = static_cast<std::size_t>(f.uinteger("trials", cfg.trials));
    f.constraint(cfg.trials >= 1, "trials", "trials >= 1");

    const std::string proto = f.str("protocol", "free-response");
    if (proto == "free-response") cfg.protocol = Protocol::free_response;
    else if (proto == "interrogation") cfg.protocol = Protocol::interrogation;
    else f.issue("protocol", "must be \"free-response\" or \"interrogation\"");

    if (const auto* tg = f.object("time_grid")) {
        Fields g(*tg, "time_grid.", issues);
        cfg.time_grid.dt = g.number("dt", cfg.time_grid.dt);
        cfg.time_grid.horizon = g.number("horizon", cfg.time_grid.horizon);
        g.finish();
        g.constraint(cfg.time_grid.dt > 0.0, "dt", "dt > 0");
        g.constraint(cfg.time_grid.horizon > 0.0, "horizon", "horizon > 0");
        g.constraint(cfg.time_grid.dt <= cfg.time_grid.horizon, "dt", "dt <= horizon");
    }

    const auto* model = f.object("model");

    const bool surface_mode =
        cfg.mode == ExperimentMode::reward_map || cfg.mode == ExperimentMode::supervise;

    if (surface_mode) {
        if (const auto* gg = f.object("gain_grid")) {
            auto parse_axis = [&issues](const nlohmann::json& a, const std::string& path,
                                        GridAxis& axis) {
                Fields ax(a, path, issues);
                axis.min = ax.number("min", axis.min);
                axis.max = ax.number("max", axis.max);
                axis.n = static_cast<std::size_t>(ax.uinteger("n", axis.n));
                ax.finish();
                ax.constraint(axis.min < axis.max, "min", "min < max");
                ax.constraint(axis.n >= 2, "n", "n >= 2");
            };
            Fields g(*gg, "gain_grid.", issues);
            if (const auto* e = g.object("gamma_E")) parse_axis(*e, "gain_grid.gamma_E.", cfg.gain_grid.gamma_E);
            if (const auto* i = g.object("gamma_I")) parse_axis(*i, "gain_grid.gamma_I.", cfg.gain_grid.gamma_I);
            g.finish();
        }
        cfg.trials_per_cell = static_cast<std::size_t>(f.uinteger("trials_per_cell", cfg.trials_per_cell));
        cfg.ndt = f.number("ndt", cfg.ndt);
        cfg.rsi = f.number("rsi", cfg.rsi);
        cfg.region_level = f.number("region_level", cfg.region_level);
        f.constraint(cfg.trials_per_cell >= 100, "trials_per_cell", "trials_per_cell >= 100");
        f.constraint(cfg.ndt >= 0.0, "ndt", "ndt >= 0");
        f.constraint(cfg.rsi >= 0.0, "rsi", "rsi >= 0");
        f.constraint(cfg.region_level > 0.0 && cfg.region_level < 1.0, "region_level",
                     "region_level in (0, 1)");
    }

    if (cfg.mode == ExperimentMode::supervise) {
        cfg.n_tasks = static_cast<std::size_t>(f.uinteger("n_tasks", cfg.n_tasks));
        if (const auto* tasks = f.object("tasks")) {
            Fields t(*tasks, "tasks.", issues);
            cfg.task_lo = t.number("lo", cfg.task_lo);
            cfg.task_hi = t.number("hi", cfg.task_hi);
            t.finish();
        }
        f.constraint(cfg.task_lo > 0.0 && cfg.task_lo <= cfg.task_hi && cfg.task_hi <= 1.0,
                     "tasks", "0 < lo <= hi <= 1");
        if (const auto* gd = f.object("gain_dynamics")) {
            Fields g(*gd, "gain_dynamics.", issues);
            cfg.drift_s0 = g.number("s0", cfg.drift_s0);
            cfg.restore_alpha = g.number("alpha", cfg.restore_alpha);
            cfg.restore_s1 = g.number("s1", cfg.restore_s1);
            g.finish();
            g.constraint(cfg.drift_s0 >= 0.0, "s0", "s0 >= 0");
            g.constraint(cfg.restore_alpha > 0.0 && cfg.restore_alpha <= 1.0, "alpha",
                         "0 < alpha <= 1");
            g.constraint(cfg.restore_s1 >= 0.0, "s1", "s1 >= 0");
        }
        if (const auto* ig = f.object("initial_gain")) {
            Fields g(*ig, "initial_gain.", issues);
            GainState s;
            s.gamma_E = g.number("gamma_E", 1.0);
            s.gamma_I = g.number("gamma_I", 0.5);
            g.finish();
            const GainBounds b = cfg.gain_grid.bounds();
            g.constraint(s.gamma_E >= b.e_min && s.gamma_E <= b.e_max, "gamma_E",
                         "within gain_grid bounds");
            g.constraint(s.gamma_I >= b.i_min && s.gamma_I <= b.i_max, "gamma_I",
                         "within gain_grid bounds");
            cfg.initial_gain = s;
        }
        if (const auto* en = f.object("engagement")) {
            Fields e(*en, "engagement.", issues);
            cfg.engagement.enabled = e.boolean("enabled", false);
            cfg.engagement.tau_s = e.number("tau_s", cfg.engagement.tau_s);
            cfg.engagement.tau_l = e.number("tau_l", cfg.engagement.tau_l);
            cfg.engagement.theta_on = e.number("theta_on", cfg.engagement.theta_on);
            cfg.engagement.theta_off = e.number("theta_off", cfg.engagement.theta_off);
            cfg.engagement.dt_per_task = e.number("dt_per_task", cfg.engagement.dt_per_task);
            e.finish();
            e.constraint(cfg.engagement.tau_s > 0.0 && cfg.engagement.tau_l > cfg.engagement.tau_s,
                         "tau_l", "tau_l > tau_s > 0");
            e.constraint(0.0 < cfg.engagement.theta_off, "theta_off", "theta_off > 0");
            e.constraint(cfg.engagement.theta_off < cfg.engagement.theta_on, "theta_on",
                         "theta_off < theta_on");
            e.constraint(cfg.engagement.theta_on < 1.0, "theta_on", "theta_on < 1");
            e.constraint(cfg.engagement.dt_per_task > 0.0, "dt_per_task", "dt_per_task > 0");
        }
    }

    f.finish();

    // model block: required shape depends on mode
    switch (cfg.mode) {
        case ExperimentMode::ddm:
            cfg.model = parse_ddm(model ? *model : nlohmann::json::object(), issues);
            break;
        case ExperimentMode::multicue_2afc:
            cfg.model = parse_multicue_2afc(model ? *model : nlohmann::json::object(), issues,
                                            cfg.time_grid.horizon, cfg.seed);
            break;
        case ExperimentMode::race:
            cfg.model = parse_race(model ? *model : nlohmann::json::object(), issues);
            break;
        case ExperimentMode::multicue_race:
            cfg.model = parse_multicue_race(model ? *model : nlohmann::json::object(), issues,
                                            cfg.time_grid.horizon, cfg.seed);
            break;
        case ExperimentMode::lip:
        case ExperimentMode::reward_map:
        case ExperimentMode::supervise:
            cfg.model = parse_lip(model ? *model : nlohmann::json::object(), issues);
            break;
    }

    if (!issues.empty()) throw ConfigError(std::move(issues));

    cfg.canonical = {
        {"mode", mode_name(cfg.mode)},
        {"seed", cfg.seed},
        {"trials", cfg.trials},
        {"protocol", cfg.protocol == Protocol::free_response ? "free-response" : "interrogation"},
        {"time_grid", {{"dt", cfg.time_grid.dt}, {"horizon", cfg.time_grid.horizon}}},
        {"model", model_json(*cfg.model)},
    };
    if (surface_mode) {
        cfg.canonical["gain_grid"] = {
            {"gamma_E", {{"min", cfg.gain_grid.gamma_E.min}, {"max", cfg.gain_grid.gamma_E.max}, {"n", cfg.gain_grid.gamma_E.n}}},
            {"gamma_I", {{"min", cfg.gain_grid.gamma_I.min}, {"max", cfg.gain_grid.gamma_I.max}, {"n", cfg.gain_grid.gamma_I.n}}}};
        cfg.canonical["trials_per_cell"] = cfg.trials_per_cell;
        cfg.canonical["ndt"] = cfg.ndt;
        cfg.canonical["rsi"] = cfg.rsi;
        cfg.canonical["region_level"] = cfg.region_level;
    }
    if (cfg.mode == ExperimentMode::supervise) {
        cfg.canonical["n_tasks"] = cfg.n_tasks;
        cfg.canonical["tasks"] = {{"lo", cfg.task_lo}, {"hi", cfg.task_hi}};
        cfg.canonical["gain_dynamics"] = {
            {"s0", cfg.drift_s0}, {"alpha", cfg.restore_alpha}, {"s1", cfg.restore_s1}};
        cfg.canonical["engagement"] = {
            {"enabled", cfg.engagement.enabled},       {"tau_s", cfg.engagement.tau_s},
            {"tau_l", cfg.engagement.tau_l},           {"theta_on", cfg.engagement.theta_on},
            {"theta_off", cfg.engagement.theta_off},   {"dt_per_task", cfg.engagement.dt_per_task}};
        if (cfg.initial_gain)
            cfg.canonical["initial_gain"] = {{"gamma_E", cfg.initial_gain->gamma_E},
                                             {"gamma_I", cfg.initial_gain->gamma_I}};
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({std::string("parse error: ") + e.what()});
    }
    return parse_config(j);
}

}  // namespace hitl
