#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "plancal/plane.hpp"
#include "plancal/sample.hpp"

namespace plancal {

// Square-root state: P = S * S^T with S lower-triangular, diag(S) >= 0.
struct SqrtState {
    Eigen::VectorXd x;
    Eigen::MatrixXd S;
};

struct NoiseConfig {
    Eigen::VectorXd sq_diag;  // process-noise square-root factor diagonal
    double sr = 0.0;          // measurement-noise square root, mm
};

// m = 2n columns: sqrt(n) * [I | -I].
Eigen::MatrixXd cubature_points(int n);

// QR of M^T; keeps the leading n x n block of R, transposed to lower
// triangular, columns sign-flipped so the diagonal is non-negative.
Eigen::MatrixXd tria(const Eigen::MatrixXd& M);

// Identity process model: mean passes through unchanged, covariance grows by
// the process noise.
SqrtState time_update(const SqrtState& state, const NoiseConfig& noise);

using MeasurementFn = std::function<double(const Eigen::VectorXd&)>;

// One scalar measurement propagated through the cubature points.
SqrtState measurement_update(const SqrtState& state, const MeasurementFn& h, double z,
                             const NoiseConfig& noise);

// Classical EKF baseline on the same problem, full covariance.
struct CovState {
    Eigen::VectorXd x;
    Eigen::MatrixXd P;
};

// h(x) with gradient row grad; loses-positive-definiteness check throws.
CovState ekf_update(const CovState& state, const MeasurementFn& h,
                    const Eigen::RowVectorXd& grad, double z, double r,
                    const Eigen::MatrixXd& Q);

struct FilterRun {
    SqrtState state;                // final (for chaining across plane groups)
    ParamDelta delta;               // final mean
    std::vector<double> rmse_trace;  // plane-residual RMSE after each update
};

struct EkfRun {
    CovState state;
    ParamDelta delta;
    std::vector<double> rmse_trace;
};

// Sequential identification over one plane group. Measurements are the
// plane residuals of the dial-folded positions, linearized per sample:
// h_i(x) = (p_i + J_i x - gamma).beta, observed value 0.
FilterRun sckf_identify(const std::vector<Sample>& samples, const Plane& plane,
                        const DhTable& model, const SqrtState& init,
                        const NoiseConfig& noise);

EkfRun ekf_identify(const std::vector<Sample>& samples, const Plane& plane,
                    const DhTable& model, const CovState& init, const NoiseConfig& noise);

}  // namespace plancal
