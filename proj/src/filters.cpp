#include "plancal/filters.hpp"

#include <cmath>

#include "plancal/error_model.hpp"

namespace plancal {

Eigen::MatrixXd cubature_points(int n) {
    const double s = std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd z(n, 2 * n);
    z.leftCols(n) = s * Eigen::MatrixXd::Identity(n, n);
    z.rightCols(n) = -s * Eigen::MatrixXd::Identity(n, n);
    return z;
}

Eigen::MatrixXd tria(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M.transpose());
    Eigen::MatrixXd R = qr.matrixQR()
                            .topRows(n)
                            .triangularView<Eigen::Upper>();
    Eigen::MatrixXd S = R.transpose();
    for (int j = 0; j < n; ++j) {
        if (S(j, j) < 0.0) S.col(j) = -S.col(j);
    }
    return S;
}

SqrtState time_update(const SqrtState& state, const NoiseConfig& noise) {
    if (!state.x.allFinite() || !state.S.allFinite()) {
        throw NumericError("time_update: non-finite state");
    }
    const int n = static_cast<int>(state.x.size());
    const int m = 2 * n;
    const Eigen::MatrixXd zeta = cubature_points(n);
    // identity dynamics: propagated points are the points themselves,
    // so the predicted mean is the prior mean exactly
    Eigen::MatrixXd compound(n, m + n);
    compound.leftCols(m) = (state.S * zeta) / std::sqrt(static_cast<double>(m));
    compound.rightCols(n) = Eigen::MatrixXd(noise.sq_diag.asDiagonal());
    SqrtState out;
    out.x = state.x;
    out.S = tria(compound);
    return out;
}

SqrtState measurement_update(const SqrtState& state, const MeasurementFn& h, double z,
                             const NoiseConfig& noise) {
    const int n = static_cast<int>(state.x.size());
    const int m = 2 * n;
    const double sm = std::sqrt(static_cast<double>(m));
    const Eigen::MatrixXd zeta = cubature_points(n);

    Eigen::MatrixXd chi(n, m);
    Eigen::VectorXd zi(m);
    for (int i = 0; i < m; ++i) {
        chi.col(i) = state.x + state.S * zeta.col(i);
        zi[i] = h(chi.col(i));
    }
    const double zhat = zi.mean();

    Eigen::RowVectorXd zc = (zi.transpose().array() - zhat) / sm;
    Eigen::MatrixXd zc_comp(1, m + 1);
    zc_comp.leftCols(m) = zc;
    zc_comp(0, m) = noise.sr;
    const double szz = tria(zc_comp)(0, 0);
    if (std::abs(szz) < 1e-14) throw NumericError("measurement_update: innovation degenerate");

    Eigen::MatrixXd xc(n, m);
    for (int i = 0; i < m; ++i) xc.col(i) = (chi.col(i) - state.x) / sm;
    const Eigen::VectorXd pxz = xc * zc.transpose();
    const Eigen::VectorXd K = pxz / (szz * szz);

    SqrtState out;
    out.x = state.x + K * (z - zhat);
    Eigen::MatrixXd compound(n, m + 1);
    compound.leftCols(m) = xc - K * zc;
    compound.col(m) = K * noise.sr;
    out.S = tria(compound);
    return out;
}

CovState ekf_update(const CovState& state, const MeasurementFn& h,
                    const Eigen::RowVectorXd& grad, double z, double r,
                    const Eigen::MatrixXd& Q) {
    CovState st;
    st.x = state.x;
    st.P = state.P + Q;
    const double s = (grad * st.P * grad.transpose())(0, 0) + r;
    const Eigen::VectorXd K = st.P * grad.transpose() / s;
    st.x = st.x + K * (z - h(state.x));
    st.P = st.P - K * grad * st.P;
    st.P = 0.5 * (st.P + st.P.transpose()).eval();
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(st.P, Eigen::EigenvaluesOnly).eigenvalues();
    if (ev.minCoeff() < -1e-12) {
        throw NumericError("ekf_update: covariance lost positive semi-definiteness");
    }
    return st;
}

namespace {

struct Folded {
    std::vector<LinearSample> lin;
};

Folded fold_group(const std::vector<Sample>& samples, const DhTable& model) {
    Folded f;
    f.lin.reserve(samples.size());
    for (const auto& s : samples) {
        DhTable t = model;
        t.links[5].d += s.dial_mm;
        LinearSample ls;
        ls.p = tool_position(t, s.q);
        ls.J = position_jacobian(model, s.q);
        f.lin.push_back(ls);
    }
    return f;
}

double group_rmse(const Folded& f, const Plane& plane, const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (const auto& ls : f.lin) {
        const double r = plane_residual(ls.p + ls.J * x, plane);
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(f.lin.size()));
}

}  // namespace

FilterRun sckf_identify(const std::vector<Sample>& samples, const Plane& plane,
                        const DhTable& model, const SqrtState& init,
                        const NoiseConfig& noise) {
    if (samples.empty()) throw ConfigError("sckf_identify: no samples");
    const Folded f = fold_group(samples, model);
    FilterRun run;
    run.state = init;
    for (const auto& ls : f.lin) {
        run.state = time_update(run.state, noise);
        const auto h = [&ls, &plane](const Eigen::VectorXd& x) {
            return plane_residual(ls.p + ls.J * x, plane);
        };
        run.state = measurement_update(run.state, h, 0.0, noise);
        run.rmse_trace.push_back(group_rmse(f, plane, run.state.x));
    }
    run.delta = ParamDelta::unflatten(run.state.x);
    return run;
}

EkfRun ekf_identify(const std::vector<Sample>& samples, const Plane& plane,
                    const DhTable& model, const CovState& init, const NoiseConfig& noise) {
    if (samples.empty()) throw ConfigError("ekf_identify: no samples");
    const Folded f = fold_group(samples, model);
    const Eigen::MatrixXd Q =
        (noise.sq_diag.array() * noise.sq_diag.array()).matrix().asDiagonal();
    const double r = noise.sr * noise.sr;
    EkfRun run;
    run.state = init;
    for (const auto& ls : f.lin) {
        const auto h = [&ls, &plane](const Eigen::VectorXd& x) {
            return plane_residual(ls.p + ls.J * x, plane);
        };
        const Eigen::RowVectorXd grad = plane.beta.transpose() * ls.J;
        run.state = ekf_update(run.state, h, grad, 0.0, r, Q);
        run.rmse_trace.push_back(group_rmse(f, plane, run.state.x));
    }
    run.delta = ParamDelta::unflatten(run.state.x);
    return run;
}

}  // namespace plancal
