#pragma once

#include <Eigen/Dense>

#include "plancal/kinematics.hpp"

namespace plancal {

// Corrections to the 24 D-H parameters. Flattened order is
// [dalpha_1..6 | da_1..6 | dd_1..6 | dtheta_1..6]; angles rad, lengths mm.
struct ParamDelta {
    Eigen::Matrix<double, 6, 1> dalpha = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Matrix<double, 6, 1> da = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Matrix<double, 6, 1> dd = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Matrix<double, 6, 1> dtheta = Eigen::Matrix<double, 6, 1>::Zero();

    static constexpr int kDim = 24;

    Eigen::Matrix<double, 24, 1> flatten() const;
    static ParamDelta unflatten(const Eigen::Matrix<double, 24, 1>& v);
};

using PositionJacobian = Eigen::Matrix<double, 3, 24>;

DhTable apply_delta(const DhTable& table, const ParamDelta& dx);

// Sensitivity of the tool position to the 24 parameters, by central finite
// differences (1e-6 rad for alpha/theta, 1e-6*max(1,|nominal|) mm for a/d).
PositionJacobian position_jacobian(const DhTable& table, const Joints& q);

Eigen::Vector3d predicted_position_error(const PositionJacobian& J, const ParamDelta& dx);

}  // namespace plancal
