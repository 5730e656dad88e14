#include "plancal/config.hpp"

#include <array>
#include <set>

namespace plancal {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
        }
    }
}

const json& require(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) fail(path.empty() ? key : path + "." + key, "missing required field");
    return j.at(key);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "must be a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "must be an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "must be a string");
    return j.get<std::string>();
}

template <size_t N>
std::array<double, N> as_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != N) {
        fail(path, "must be an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (size_t i = 0; i < N; ++i) out[i] = as_number(j[i], path + "[" + std::to_string(i) + "]");
    return out;
}

DhTable parse_nominal(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 6) fail(path, "must be an array of 6 joint rows");
    std::array<DhRowDeg, 6> rows;
    for (size_t i = 0; i < 6; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        const json& row = j[i];
        if (!row.is_object()) fail(rp, "must be an object");
        check_keys(row, rp, {"alpha_deg", "a_mm", "d_mm", "theta_offset_deg"});
        rows[i].alpha_deg = as_number(require(row, rp, "alpha_deg"), rp + ".alpha_deg");
        rows[i].a_mm = as_number(require(row, rp, "a_mm"), rp + ".a_mm");
        rows[i].d_mm = as_number(require(row, rp, "d_mm"), rp + ".d_mm");
        rows[i].theta_offset_deg =
            as_number(require(row, rp, "theta_offset_deg"), rp + ".theta_offset_deg");
    }
    return DhTable::from_degrees(rows);
}

TruthSpec parse_truth(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
    TruthSpec spec;
    const std::string mode = as_string(require(j, path, "mode"), path + ".mode");
    if (mode == "zero") {
        check_keys(j, path, {"mode"});
        spec.mode = TruthSpec::Mode::Zero;
    } else if (mode == "random") {
        check_keys(j, path, {"mode", "max_angle_deg", "max_length_mm"});
        spec.mode = TruthSpec::Mode::Random;
        if (j.contains("max_angle_deg")) {
            spec.max_angle_deg = as_number(j.at("max_angle_deg"), path + ".max_angle_deg");
        }
        if (j.contains("max_length_mm")) {
            spec.max_length_mm = as_number(j.at("max_length_mm"), path + ".max_length_mm");
        }
        if (spec.max_angle_deg < 0.0) fail(path + ".max_angle_deg", "must be >= 0");
        if (spec.max_length_mm < 0.0) fail(path + ".max_length_mm", "must be >= 0");
    } else if (mode == "explicit") {
        check_keys(j, path, {"mode", "dalpha_deg", "da_mm", "dd_mm", "dtheta_deg"});
        spec.mode = TruthSpec::Mode::Explicit;
        const auto da = as_vector<6>(require(j, path, "dalpha_deg"), path + ".dalpha_deg");
        const auto aa = as_vector<6>(require(j, path, "da_mm"), path + ".da_mm");
        const auto dd = as_vector<6>(require(j, path, "dd_mm"), path + ".dd_mm");
        const auto dt = as_vector<6>(require(j, path, "dtheta_deg"), path + ".dtheta_deg");
        for (int i = 0; i < 6; ++i) {
            spec.explicit_delta.dalpha[i] = deg2rad(da[i]);
            spec.explicit_delta.da[i] = aa[i];
            spec.explicit_delta.dd[i] = dd[i];
            spec.explicit_delta.dtheta[i] = deg2rad(dt[i]);
        }
    } else {
        fail(path + ".mode", "must be \"zero\", \"random\" or \"explicit\"");
    }
    return spec;
}

void parse_scenario(const json& j, const std::string& path, RunConfig& config) {
    if (!j.is_object()) fail(path, "must be an object");
    check_keys(j, path,
               {"sigma_mm", "coverage_mm", "posture_amp_deg", "min_align", "dial_range_mm",
                "truth", "planes"});
    config.has_scenario = true;
    if (j.contains("sigma_mm")) {
        config.sigma_mm = as_number(j.at("sigma_mm"), path + ".sigma_mm");
        if (config.sigma_mm < 0.0) fail(path + ".sigma_mm", "must be >= 0");
    }
    if (j.contains("coverage_mm")) {
        config.coverage_mm = as_number(j.at("coverage_mm"), path + ".coverage_mm");
        if (config.coverage_mm <= 0.0) fail(path + ".coverage_mm", "must be > 0");
    }
    if (j.contains("posture_amp_deg")) {
        const double amp = as_number(j.at("posture_amp_deg"), path + ".posture_amp_deg");
        if (amp < 0.0) fail(path + ".posture_amp_deg", "must be >= 0");
        config.posture_amp_rad = deg2rad(amp);
    }
    if (j.contains("min_align")) {
        config.min_align = as_number(j.at("min_align"), path + ".min_align");
        if (config.min_align <= 0.0 || config.min_align > 1.0) {
            fail(path + ".min_align", "must be in (0, 1]");
        }
    }
    if (j.contains("dial_range_mm")) {
        config.dial_range_mm = as_number(j.at("dial_range_mm"), path + ".dial_range_mm");
        if (config.dial_range_mm <= 0.0) fail(path + ".dial_range_mm", "must be > 0");
    }
    if (j.contains("truth")) config.truth = parse_truth(j.at("truth"), path + ".truth");

    const json& planes = require(j, path, "planes");
    if (!planes.is_array() || planes.empty()) {
        fail(path + ".planes", "must be a non-empty array");
    }
    for (size_t i = 0; i < planes.size(); ++i) {
        const std::string pp = path + ".planes[" + std::to_string(i) + "]";
        const json& pj = planes[i];
        if (!pj.is_object()) fail(pp, "must be an object");
        check_keys(pj, pp, {"gamma_mm", "beta", "seed_q_deg", "samples"});
        PlanePlacement placement;
        const auto gamma = as_vector<3>(require(pj, pp, "gamma_mm"), pp + ".gamma_mm");
        const auto beta = as_vector<3>(require(pj, pp, "beta"), pp + ".beta");
        try {
            placement.plane = Plane::make(Eigen::Vector3d(gamma[0], gamma[1], gamma[2]),
                                          Eigen::Vector3d(beta[0], beta[1], beta[2]));
        } catch (const ConfigError&) {
            fail(pp + ".beta", "must be a non-zero direction");
        }
        const auto seed_q = as_vector<6>(require(pj, pp, "seed_q_deg"), pp + ".seed_q_deg");
        for (int k = 0; k < 6; ++k) placement.seed_q[k] = deg2rad(seed_q[k]);
        placement.n_samples = as_int(require(pj, pp, "samples"), pp + ".samples");
        if (placement.n_samples < 1) fail(pp + ".samples", "must be >= 1");
        config.placements.push_back(placement);
    }
}

void parse_lm(const json& j, const std::string& path, CalibrationConfig& cal) {
    if (!j.is_object()) fail(path, "must be an object");
    check_keys(j, path,
               {"lambda0", "ftol", "steptol", "max_iters", "lambda_min", "lambda_max", "mode",
                "rcond"});
    if (j.contains("lambda0")) {
        cal.lambda0 = as_number(j.at("lambda0"), path + ".lambda0");
        if (cal.lambda0 <= 0.0) fail(path + ".lambda0", "must be > 0");
    }
    if (j.contains("ftol")) {
        cal.lm.ftol = as_number(j.at("ftol"), path + ".ftol");
        if (cal.lm.ftol <= 0.0) fail(path + ".ftol", "must be > 0");
    }
    if (j.contains("steptol")) {
        cal.lm.steptol = as_number(j.at("steptol"), path + ".steptol");
        if (cal.lm.steptol <= 0.0) fail(path + ".steptol", "must be > 0");
    }
    if (j.contains("max_iters")) {
        cal.lm.max_iters = as_int(j.at("max_iters"), path + ".max_iters");
        if (cal.lm.max_iters < 1) fail(path + ".max_iters", "must be >= 1");
    }
    if (j.contains("lambda_min")) {
        cal.lm.lambda_min = as_number(j.at("lambda_min"), path + ".lambda_min");
        if (cal.lm.lambda_min <= 0.0) fail(path + ".lambda_min", "must be > 0");
    }
    if (j.contains("lambda_max")) {
        cal.lm.lambda_max = as_number(j.at("lambda_max"), path + ".lambda_max");
        if (cal.lm.lambda_max < cal.lm.lambda_min) {
            fail(path + ".lambda_max", "must be >= lambda_min");
        }
    }
    if (j.contains("mode")) {
        const std::string m = as_string(j.at("mode"), path + ".mode");
        if (m == "block") {
            cal.lm.mode = LmOptions::Mode::Block;
        } else if (m == "joint") {
            cal.lm.mode = LmOptions::Mode::Joint;
        } else {
            fail(path + ".mode", "must be \"block\" or \"joint\"");
        }
    }
    if (j.contains("rcond")) {
        cal.lm.rcond = as_number(j.at("rcond"), path + ".rcond");
        if (cal.lm.rcond <= 0.0 || cal.lm.rcond >= 1.0) fail(path + ".rcond", "must be in (0, 1)");
    }
}

void parse_filter(const json& j, const std::string& path, FilterParams& f) {
    if (!j.is_object()) fail(path, "must be an object");
    check_keys(j, path, {"p0_angle", "p0_length", "q", "r_sigma_mm"});
    if (j.contains("p0_angle")) {
        f.p0_angle = as_number(j.at("p0_angle"), path + ".p0_angle");
        if (f.p0_angle <= 0.0) fail(path + ".p0_angle", "must be > 0");
    }
    if (j.contains("p0_length")) {
        f.p0_length = as_number(j.at("p0_length"), path + ".p0_length");
        if (f.p0_length <= 0.0) fail(path + ".p0_length", "must be > 0");
    }
    if (j.contains("q")) {
        f.q = as_number(j.at("q"), path + ".q");
        if (f.q < 0.0) fail(path + ".q", "must be >= 0");
    }
    if (j.contains("r_sigma_mm")) {
        f.r_sigma = as_number(j.at("r_sigma_mm"), path + ".r_sigma_mm");
        if (f.r_sigma <= 0.0) fail(path + ".r_sigma_mm", "must be > 0");
    }
}

void parse_calibration(const json& j, const std::string& path, RunConfig& config) {
    if (!j.is_object()) fail(path, "must be an object");
    check_keys(j, path, {"method", "methods", "holdout", "lm", "filter", "rank_tol"});
    if (j.contains("method")) {
        const std::string name = as_string(j.at("method"), path + ".method");
        try {
            config.method = method_from_string(name);
        } catch (const ConfigError& e) {
            fail(path + ".method", e.what());
        }
    }
    if (j.contains("methods")) {
        const json& ms = j.at("methods");
        if (!ms.is_array() || ms.empty()) fail(path + ".methods", "must be a non-empty array");
        config.methods.clear();
        for (size_t i = 0; i < ms.size(); ++i) {
            const std::string mp = path + ".methods[" + std::to_string(i) + "]";
            try {
                config.methods.push_back(method_from_string(as_string(ms[i], mp)));
            } catch (const ConfigError& e) {
                fail(mp, e.what());
            }
        }
    }
    if (j.contains("holdout")) {
        config.calibration.holdout = as_int(j.at("holdout"), path + ".holdout");
        if (config.calibration.holdout < 0) fail(path + ".holdout", "must be >= 0");
    }
    if (j.contains("rank_tol")) {
        config.calibration.rank_tol = as_number(j.at("rank_tol"), path + ".rank_tol");
        if (config.calibration.rank_tol <= 0.0 || config.calibration.rank_tol >= 1.0) {
            fail(path + ".rank_tol", "must be in (0, 1)");
        }
    }
    if (j.contains("lm")) parse_lm(j.at("lm"), path + ".lm", config.calibration);
    if (j.contains("filter")) parse_filter(j.at("filter"), path + ".filter", config.calibration.filter);
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config root: must be a JSON object");
    check_keys(j, "", {"seed", "output_dir", "nominal_dh", "scenario", "calibration", "samples"});
    RunConfig config;
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && s.get<std::int64_t>() < 0)) {
            fail("seed", "must be a non-negative integer");
        }
        config.seed = s.get<std::uint64_t>();
    }
    if (j.contains("output_dir")) config.output_dir = as_string(j.at("output_dir"), "output_dir");
    if (j.contains("nominal_dh")) config.nominal = parse_nominal(j.at("nominal_dh"), "nominal_dh");
    if (j.contains("scenario")) parse_scenario(j.at("scenario"), "scenario", config);
    if (j.contains("calibration")) parse_calibration(j.at("calibration"), "calibration", config);
    if (j.contains("samples")) {
        const json& s = j.at("samples");
        if (!s.is_array() || s.empty()) fail("samples", "must be a non-empty array of paths");
        for (size_t i = 0; i < s.size(); ++i) {
            config.sample_paths.push_back(as_string(s[i], "samples[" + std::to_string(i) + "]"));
        }
    }
    return config;
}

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return run_config_from_json(j);
}

nlohmann::ordered_json run_config_to_json(const RunConfig& config) {
    json j;
    j["seed"] = config.seed;
    j["output_dir"] = config.output_dir;
    json rows = json::array();
    for (const auto& row : config.nominal.to_degrees()) {
        rows.push_back({{"alpha_deg", row.alpha_deg},
                        {"a_mm", row.a_mm},
                        {"d_mm", row.d_mm},
                        {"theta_offset_deg", row.theta_offset_deg}});
    }
    j["nominal_dh"] = rows;
    if (config.has_scenario) {
        json sc;
        sc["sigma_mm"] = config.sigma_mm;
        sc["coverage_mm"] = config.coverage_mm;
        sc["posture_amp_deg"] = rad2deg(config.posture_amp_rad);
        sc["min_align"] = config.min_align;
        sc["dial_range_mm"] = config.dial_range_mm;
        json truth;
        switch (config.truth.mode) {
            case TruthSpec::Mode::Zero:
                truth["mode"] = "zero";
                break;
            case TruthSpec::Mode::Random:
                truth["mode"] = "random";
                truth["max_angle_deg"] = config.truth.max_angle_deg;
                truth["max_length_mm"] = config.truth.max_length_mm;
                break;
            case TruthSpec::Mode::Explicit: {
                truth["mode"] = "explicit";
                json da = json::array(), aa = json::array(), dd = json::array(),
                     dt = json::array();
                for (int i = 0; i < 6; ++i) {
                    da.push_back(rad2deg(config.truth.explicit_delta.dalpha[i]));
                    aa.push_back(config.truth.explicit_delta.da[i]);
                    dd.push_back(config.truth.explicit_delta.dd[i]);
                    dt.push_back(rad2deg(config.truth.explicit_delta.dtheta[i]));
                }
                truth["dalpha_deg"] = da;
                truth["da_mm"] = aa;
                truth["dd_mm"] = dd;
                truth["dtheta_deg"] = dt;
                break;
            }
        }
        sc["truth"] = truth;
        json planes = json::array();
        for (const auto& pl : config.placements) {
            json p;
            p["gamma_mm"] = {pl.plane.gamma[0], pl.plane.gamma[1], pl.plane.gamma[2]};
            p["beta"] = {pl.plane.beta[0], pl.plane.beta[1], pl.plane.beta[2]};
            json q = json::array();
            for (int k = 0; k < 6; ++k) q.push_back(rad2deg(pl.seed_q[k]));
            p["seed_q_deg"] = q;
            p["samples"] = pl.n_samples;
            planes.push_back(p);
        }
        sc["planes"] = planes;
        j["scenario"] = sc;
    }
    json cal;
    cal["method"] = method_to_string(config.method);
    json ms = json::array();
    for (Method m : config.methods) ms.push_back(method_to_string(m));
    cal["methods"] = ms;
    cal["holdout"] = config.calibration.holdout;
    cal["rank_tol"] = config.calibration.rank_tol;
    cal["lm"] = {{"lambda0", config.calibration.lambda0},
                 {"ftol", config.calibration.lm.ftol},
                 {"steptol", config.calibration.lm.steptol},
                 {"max_iters", config.calibration.lm.max_iters},
                 {"lambda_min", config.calibration.lm.lambda_min},
                 {"lambda_max", config.calibration.lm.lambda_max},
                 {"mode", config.calibration.lm.mode == LmOptions::Mode::Block ? "block" : "joint"},
                 {"rcond", config.calibration.lm.rcond}};
    cal["filter"] = {{"p0_angle", config.calibration.filter.p0_angle},
                     {"p0_length", config.calibration.filter.p0_length},
                     {"q", config.calibration.filter.q},
                     {"r_sigma_mm", config.calibration.filter.r_sigma}};
    j["calibration"] = cal;
    if (!config.sample_paths.empty()) j["samples"] = config.sample_paths;
    return j;
}

SimScenario make_scenario(const RunConfig& config) {
    if (!config.has_scenario) throw ConfigError("scenario: required for simulation");
    SimScenario sc;
    sc.nominal = config.nominal;
    sc.placements = config.placements;
    sc.noise_sigma = config.sigma_mm;
    sc.seed = config.seed;
    sc.coverage = config.coverage_mm;
    sc.posture_amp = config.posture_amp_rad;
    sc.min_align = config.min_align;
    sc.dial_range = config.dial_range_mm;
    switch (config.truth.mode) {
        case TruthSpec::Mode::Zero:
            break;
        case TruthSpec::Mode::Explicit:
            sc.truth_delta = config.truth.explicit_delta;
            break;
        case TruthSpec::Mode::Random: {
            Rng rng(config.seed + 1);
            const double ca = deg2rad(config.truth.max_angle_deg);
            const double cl = config.truth.max_length_mm;
            for (int i = 0; i < 6; ++i) sc.truth_delta.dalpha[i] = rng.uniform(-ca, ca);
            for (int i = 0; i < 6; ++i) sc.truth_delta.da[i] = rng.uniform(-cl, cl);
            for (int i = 0; i < 6; ++i) sc.truth_delta.dd[i] = rng.uniform(-cl, cl);
            for (int i = 0; i < 6; ++i) sc.truth_delta.dtheta[i] = rng.uniform(-ca, ca);
            break;
        }
    }
    return sc;
}

}  // namespace plancal
