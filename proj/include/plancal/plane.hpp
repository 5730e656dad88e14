#pragma once

#include <vector>

#include <Eigen/Dense>

#include "plancal/error_model.hpp"

namespace plancal {

struct Plane {
    Eigen::Vector3d gamma = Eigen::Vector3d::Zero();  // point on plane, mm
    Eigen::Vector3d beta = Eigen::Vector3d::UnitZ();  // unit normal

    static Plane make(const Eigen::Vector3d& gamma, const Eigen::Vector3d& beta);
};

// Linearized correction to a plane: normal correction plus the composite
// scalar unknown that absorbs the corresponding point shift.
struct PlaneDelta {
    Eigen::Vector3d delta_beta = Eigen::Vector3d::Zero();
    double gamma_dot_delta_beta = 0.0;
};

// One identification sample: Jacobian and reconstructed position, both under
// the nominal model with the dial reading folded into d6.
struct LinearSample {
    PositionJacobian J;
    Eigen::Vector3d p;
};

// Stacked linear system over N samples.
// Row i = [beta^T J_i (24) | p_i (3) | 1]; rhs_i = -(p_i - gamma).beta.
struct IdentificationSystem {
    Eigen::MatrixXd design_matrix;  // N x 28
    Eigen::VectorXd rhs;            // N
};

double plane_residual(const Eigen::Vector3d& p, const Plane& plane);

// Total least squares: gamma = centroid, beta = smallest-singular direction.
// Sign: first point's residual >= 0; ties broken toward beta_z >= 0.
// Throws NumericError for <3 points or collinear input.
Plane fit_plane(const std::vector<Eigen::Vector3d>& points);

IdentificationSystem build_identification_system(const std::vector<LinearSample>& samples,
                                                 const Plane& plane);

// f = (1/2N) sum_i ((p_i + J_i dx - gamma).beta)^2 over first-order positions.
double objective(const std::vector<LinearSample>& samples, const Plane& plane,
                 const ParamDelta& dx);

}  // namespace plancal
