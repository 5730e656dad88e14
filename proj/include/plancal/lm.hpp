#pragma once

#include <vector>

#include <Eigen/Dense>

#include "plancal/plane.hpp"

namespace plancal {

// Optimizer state: parameter corrections plus the plane estimates. One plane
// per measurement group; single-group problems carry exactly one.
struct LmState {
    Eigen::Matrix<double, 24, 1> w = Eigen::Matrix<double, 24, 1>::Zero();
    std::vector<Plane> planes;
    double lambda = 1e-3;
};

// Samples grouped by plane placement; group k is scored against planes[k].
struct LmProblem {
    std::vector<std::vector<LinearSample>> groups;

    int total() const {
        int n = 0;
        for (const auto& g : groups) n += static_cast<int>(g.size());
        return n;
    }
};

struct LmOptions {
    double ftol = 1e-10;      // relative objective change
    double steptol = 1e-12;   // block step norms
    int max_iters = 500;
    double lambda_min = 1e-12;
    double lambda_max = 1e12;
    // block: damped solves for w, then each plane's gamma and beta.
    // joint: plane parameters eliminated exactly each iteration (total
    // least-squares refit on the corrected points), w stepped on the
    // nuisance-projected system with small singular values truncated.
    enum class Mode { Block, Joint } mode = Mode::Block;
    double rcond = 1e-6;      // joint-mode singular value cutoff, relative
};

struct LmIteration {
    double f = 0.0;       // data-term objective after this iteration
    double lambda = 0.0;
    double step_w = 0.0;
    double step_gamma = 0.0;
    double step_beta = 0.0;
    bool accepted = false;
};

struct LmTrace {
    std::vector<LmIteration> iterations;
};

struct LmResult {
    LmState state;
    LmTrace trace;
    bool converged = false;
    int iterations = 0;
    int accepted = 0;
};

struct LmLinearization {
    Eigen::VectorXd phi;                       // residuals, stacked group-major
    Eigen::MatrixXd dphi_dw;                   // N x 24
    std::vector<Eigen::MatrixXd> dphi_dgamma;  // per plane: n_k x 3
    std::vector<Eigen::MatrixXd> dphi_dbeta;   // per plane: n_k x 3
    std::vector<int> group_offset;
};

// phi_i = -(p_i + J_i w - gamma).beta with the blocks
// d/dw = -beta^T J_i, d/dgamma = +beta^T, d/dbeta = -(p_i + J_i w - gamma)^T.
LmLinearization residual_and_jacobians(const LmState& state, const LmProblem& problem);

// Data-term objective f = (1/2N) sum phi^2.
double lm_objective(const LmState& state, const LmProblem& problem);

// Norm of the full data-term gradient (w, gammas, betas), with each beta
// gradient projected onto the unit-sphere tangent.
double lm_gradient_norm(const LmState& state, const LmProblem& problem);

struct LmStepResult {
    LmState state;      // next state (unchanged apart from lambda on reject)
    LmState candidate;  // evaluated candidate, kept for step-size stop rules
    bool accepted = false;
    double f_old = 0.0;
    double f_new = 0.0;
};

// One block-coordinate iteration: w, then each plane's gamma, then beta,
// each from a damped least-squares solve on refreshed residuals. The
// composite candidate (beta renormalized) is accepted only if the data term
// strictly decreases; lambda *= 0.7 on accept, *= 2 on reject.
// lambda == 0 solves the undamped Gauss-Newton step (minimum-norm).
LmStepResult lm_step(const LmState& state, const LmProblem& problem);

LmResult lm_optimize(const LmState& init, const LmProblem& problem, const LmOptions& opts);

}  // namespace plancal
