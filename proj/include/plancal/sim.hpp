#pragma once

#include <cstdint>
#include <vector>

#include "plancal/error_model.hpp"
#include "plancal/plane.hpp"
#include "plancal/sample.hpp"

namespace plancal {

// One gauge-block placement: the true plane, a joint-space seed posture from
// which targets on the patch are reached, and the sample count.
struct PlanePlacement {
    Plane plane;
    Joints seed_q = Joints::Zero();
    int n_samples = 0;
};

struct SimScenario {
    DhTable nominal;
    ParamDelta truth_delta;
    std::vector<PlanePlacement> placements;
    double noise_sigma = 0.01;   // mm
    std::uint64_t seed = 0;
    double coverage = 160.0;     // in-plane patch extent, mm
    double posture_amp = 0.35;   // joint-space randomization around seed_q, rad
    double min_align = 0.35;     // required |probe_axis . beta|
    double dial_range = 10.0;    // mm, readings beyond this are rejected
};

struct PlaneGroup {
    Plane plane_true;
    std::vector<Sample> samples;
};

struct SimData {
    std::vector<PlaneGroup> groups;
    ParamDelta truth;
};

// Plans contact points on each plane patch under the nominal model, then
// reads the dial on the true model. The reading is the along-axis gap to the
// plane, reported relative to the planned contact, so a zero-error robot
// reads exactly zero.
SimData generate(const SimScenario& scenario);

DhTable apply_dial_to_model(const Sample& sample, const DhTable& table);

struct ScoreRecord {
    double before_rmse = 0.0;
    double after_rmse = 0.0;
    double before_max = 0.0;
    double after_max = 0.0;
    int rank = 0;                // identification-matrix rank at 1e-6 relative
    double observable_error = 0.0;  // ||P_obs (identified - truth)||
    Eigen::MatrixXd projector;   // P_obs, 24 x 24
};

// Ground-truth scoring on held-out samples: residual metrics before/after and
// the parameter error projected onto the observable subspace of the stacked
// identification matrix.
ScoreRecord score_against_truth(const ParamDelta& identified, const SimScenario& scenario,
                                const std::vector<PlaneGroup>& validation_samples);

}  // namespace plancal
