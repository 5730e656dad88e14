#include "plancal/plane.hpp"

#include <cmath>

namespace plancal {

Plane Plane::make(const Eigen::Vector3d& gamma, const Eigen::Vector3d& beta) {
    const double n = beta.norm();
    if (!(n > 0.0) || !gamma.allFinite() || !beta.allFinite()) {
        throw ConfigError("Plane::make: invalid gamma/beta");
    }
    Plane p;
    p.gamma = gamma;
    p.beta = beta / n;
    return p;
}

double plane_residual(const Eigen::Vector3d& p, const Plane& plane) {
    return (p - plane.gamma).dot(plane.beta);
}

Plane fit_plane(const std::vector<Eigen::Vector3d>& points) {
    if (points.size() < 3) throw NumericError("fit_plane: need at least 3 points");
    const int n = static_cast<int>(points.size());
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& p : points) c += p;
    c /= n;
    Eigen::MatrixXd X(n, 3);
    for (int i = 0; i < n; ++i) X.row(i) = (points[i] - c).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);
    const Eigen::Vector3d s = svd.singularValues();
    if (s[0] <= 0.0 || s[1] < 1e-9 * s[0]) {
        throw NumericError("fit_plane: points are collinear");
    }
    Eigen::Vector3d beta = svd.matrixV().col(2);
    const double r0 = (points[0] - c).dot(beta);
    if (r0 < 0.0 || (r0 == 0.0 && beta.z() < 0.0)) beta = -beta;
    Plane out;
    out.gamma = c;
    out.beta = beta;
    return out;
}

IdentificationSystem build_identification_system(const std::vector<LinearSample>& samples,
                                                 const Plane& plane) {
    if (samples.empty()) throw ConfigError("build_identification_system: no samples");
    const int n = static_cast<int>(samples.size());
    IdentificationSystem sys;
    sys.design_matrix.resize(n, 28);
    sys.rhs.resize(n);
    for (int i = 0; i < n; ++i) {
        sys.design_matrix.block<1, 24>(i, 0) = plane.beta.transpose() * samples[i].J;
        sys.design_matrix.block<1, 3>(i, 24) = samples[i].p.transpose();
        sys.design_matrix(i, 27) = 1.0;
        sys.rhs[i] = -plane_residual(samples[i].p, plane);
    }
    return sys;
}

double objective(const std::vector<LinearSample>& samples, const Plane& plane,
                 const ParamDelta& dx) {
    if (samples.empty()) throw ConfigError("objective: no samples");
    const Eigen::Matrix<double, 24, 1> w = dx.flatten();
    double acc = 0.0;
    for (const auto& s : samples) {
        const double r = plane_residual(s.p + s.J * w, plane);
        acc += r * r;
    }
    return acc / (2.0 * static_cast<double>(samples.size()));
}

}  // namespace plancal
