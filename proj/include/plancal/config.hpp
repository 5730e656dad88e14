#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "plancal/pipeline.hpp"

namespace plancal {

// Injected parameter-error specification for simulated scenarios.
struct TruthSpec {
    enum class Mode { Zero, Random, Explicit } mode = Mode::Random;
    double max_angle_deg = 0.05;  // random mode: per-component cap on twists/angles
    double max_length_mm = 1.0;   // random mode: per-component cap on lengths/offsets
    ParamDelta explicit_delta;    // explicit mode, internal units
};

// Everything a command run needs; parsed from one JSON file, overridable by
// CLI flags, echoed fully populated into every report.
struct RunConfig {
    DhTable nominal = DhTable::default_nominal();
    std::uint64_t seed = 42;
    std::string output_dir = "out";

    bool has_scenario = false;
    std::vector<PlanePlacement> placements;
    double sigma_mm = 0.01;
    double coverage_mm = 160.0;
    double posture_amp_rad = deg2rad(20.0);
    double min_align = 0.35;
    double dial_range_mm = 10.0;
    TruthSpec truth;

    Method method = Method::SckfLm;
    std::vector<Method> methods = {Method::Ekf, Method::Sckf, Method::Lm, Method::SckfLm};
    CalibrationConfig calibration;
    std::vector<std::string> sample_paths;
};

// Throws ConfigError naming the offending field, e.g.
// "scenario.planes[2].samples: must be >= 1".
RunConfig run_config_from_json(const nlohmann::ordered_json& j);
RunConfig parse_run_config(const std::string& text);

// Fully-populated echo (defaults filled in); reports embed this so any
// artifact can be regenerated from the report alone.
nlohmann::ordered_json run_config_to_json(const RunConfig& config);

// Realizes the scenario: random truth is drawn from seed + 1.
SimScenario make_scenario(const RunConfig& config);

}  // namespace plancal
