#pragma once

#include <array>

#include <Eigen/Dense>

#include "plancal/common.hpp"

namespace plancal {

// One D-H row, radians/mm. File and table I/O is in degrees; conversion
// happens only at the boundary (DhRowDeg below).
struct DhLink {
    double alpha = 0.0;         // link twist, rad
    double a = 0.0;             // link length, mm
    double d = 0.0;             // link offset, mm
    double theta_offset = 0.0;  // joint angle offset, rad
};

struct DhRowDeg {
    double alpha_deg = 0.0;
    double a_mm = 0.0;
    double d_mm = 0.0;
    double theta_offset_deg = 0.0;
};

using Joints = Eigen::Matrix<double, 6, 1>;  // commanded joint angles, rad

struct DhTable {
    std::array<DhLink, 6> links;

    static DhTable from_degrees(const std::array<DhRowDeg, 6>& rows);
    std::array<DhRowDeg, 6> to_degrees() const;

    // Nominal six-axis table used by the default scenarios.
    static DhTable default_nominal();
};

struct Pose {
    Eigen::Matrix3d R;
    Eigen::Vector3d p;

    Eigen::Matrix4d matrix() const {
        Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
        T.topLeftCorner<3, 3>() = R;
        T.topRightCorner<3, 1>() = p;
        return T;
    }
};

// Standard (distal) convention: RotZ(theta) * TransZ(d) * TransX(a) * RotX(alpha),
// with theta = q + theta_offset.
Eigen::Matrix4d link_transform(const DhLink& link, double q);

Pose forward_kinematics(const DhTable& table, const Joints& q);

Eigen::Vector3d tool_position(const DhTable& table, const Joints& q);

// Direction along which d6 translates the tool point (z-axis of frame 5;
// the sixth link's d-translation precedes its x/alpha terms).
Eigen::Vector3d probe_axis(const DhTable& table, const Joints& q);

}  // namespace plancal
