#include "plancal/error_model.hpp"

#include <cmath>

namespace plancal {

Eigen::Matrix<double, 24, 1> ParamDelta::flatten() const {
    Eigen::Matrix<double, 24, 1> v;
    v.segment<6>(0) = dalpha;
    v.segment<6>(6) = da;
    v.segment<6>(12) = dd;
    v.segment<6>(18) = dtheta;
    return v;
}

ParamDelta ParamDelta::unflatten(const Eigen::Matrix<double, 24, 1>& v) {
    ParamDelta d;
    d.dalpha = v.segment<6>(0);
    d.da = v.segment<6>(6);
    d.dd = v.segment<6>(12);
    d.dtheta = v.segment<6>(18);
    return d;
}

DhTable apply_delta(const DhTable& table, const ParamDelta& dx) {
    DhTable out = table;
    for (int i = 0; i < 6; ++i) {
        out.links[i].alpha += dx.dalpha[i];
        out.links[i].a += dx.da[i];
        out.links[i].d += dx.dd[i];
        out.links[i].theta_offset += dx.dtheta[i];
    }
    return out;
}

namespace {

double& param_ref(DhTable& t, int block, int joint) {
    switch (block) {
        case 0: return t.links[joint].alpha;
        case 1: return t.links[joint].a;
        case 2: return t.links[joint].d;
        default: return t.links[joint].theta_offset;
    }
}

}  // namespace

PositionJacobian position_jacobian(const DhTable& table, const Joints& q) {
    PositionJacobian J;
    for (int block = 0; block < 4; ++block) {
        const bool angular = (block == 0 || block == 3);
        for (int joint = 0; joint < 6; ++joint) {
            DhTable t = table;
            double& p = param_ref(t, block, joint);
            const double h = angular ? 1e-6 : 1e-6 * std::max(1.0, std::abs(p));
            const double p0 = p;
            p = p0 + h;
            const Eigen::Vector3d fp = tool_position(t, q);
            p = p0 - h;
            const Eigen::Vector3d fm = tool_position(t, q);
            J.col(block * 6 + joint) = (fp - fm) / (2.0 * h);
        }
    }
    return J;
}

Eigen::Vector3d predicted_position_error(const PositionJacobian& J, const ParamDelta& dx) {
    return J * dx.flatten();
}

}  // namespace plancal
