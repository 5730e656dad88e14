#include "plancal/kinematics.hpp"

#include <cmath>

namespace plancal {

DhTable DhTable::from_degrees(const std::array<DhRowDeg, 6>& rows) {
    DhTable t;
    for (int i = 0; i < 6; ++i) {
        t.links[i].alpha = deg2rad(rows[i].alpha_deg);
        t.links[i].a = rows[i].a_mm;
        t.links[i].d = rows[i].d_mm;
        t.links[i].theta_offset = deg2rad(rows[i].theta_offset_deg);
    }
    return t;
}

std::array<DhRowDeg, 6> DhTable::to_degrees() const {
    std::array<DhRowDeg, 6> rows;
    for (int i = 0; i < 6; ++i) {
        rows[i].alpha_deg = rad2deg(links[i].alpha);
        rows[i].a_mm = links[i].a;
        rows[i].d_mm = links[i].d;
        rows[i].theta_offset_deg = rad2deg(links[i].theta_offset);
    }
    return rows;
}

DhTable DhTable::default_nominal() {
    return from_degrees({{
        {-90.0, 249.85003, 653.5, 0.0},
        {0.0, 900.32123, 0.0, -90.0},
        {90.0, -0.20614449, 0.0, 180.0},
        {-90.0, 0.0, 1030.37534, 0.0},
        {90.0, 0.0, 0.0, 90.0},
        {0.0, 0.0, 200.6, 0.0},
    }});
}

Eigen::Matrix4d link_transform(const DhLink& link, double q) {
    if (!std::isfinite(q) || !std::isfinite(link.alpha) || !std::isfinite(link.a) ||
        !std::isfinite(link.d) || !std::isfinite(link.theta_offset)) {
        throw ConfigError("link_transform: non-finite input");
    }
    const double th = q + link.theta_offset;
    const double ct = std::cos(th), st = std::sin(th);
    const double ca = std::cos(link.alpha), sa = std::sin(link.alpha);
    Eigen::Matrix4d T;
    T << ct, -st * ca, st * sa, link.a * ct,
         st, ct * ca, -ct * sa, link.a * st,
         0.0, sa, ca, link.d,
         0.0, 0.0, 0.0, 1.0;
    return T;
}

Pose forward_kinematics(const DhTable& table, const Joints& q) {
    Eigen::Matrix4d T = link_transform(table.links[0], q[0]);
    for (int i = 1; i < 6; ++i) T = T * link_transform(table.links[i], q[i]);
    Pose out;
    out.R = T.topLeftCorner<3, 3>();
    out.p = T.topRightCorner<3, 1>();
    return out;
}

Eigen::Vector3d tool_position(const DhTable& table, const Joints& q) {
    return forward_kinematics(table, q).p;
}

Eigen::Vector3d probe_axis(const DhTable& table, const Joints& q) {
    Eigen::Matrix4d T = link_transform(table.links[0], q[0]);
    for (int i = 1; i < 5; ++i) T = T * link_transform(table.links[i], q[i]);
    return T.block<3, 1>(0, 2);
}

}  // namespace plancal
