#include "plancal/lm.hpp"

#include <cmath>

namespace plancal {

namespace {

void tangent_basis(const Eigen::Vector3d& beta, Eigen::Vector3d& u, Eigen::Vector3d& v) {
    const Eigen::Vector3d e =
        std::abs(beta.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    u = e.cross(beta).normalized();
    v = beta.cross(u);
}

// Damped least-squares step per the (1/n)-scaled normal equations:
// (A^T A / n + lambda I) dx = -(A^T phi) / n.
// lambda == 0 falls back to the minimum-norm Gauss-Newton solution.
Eigen::VectorXd damped_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& phi,
                            double lambda) {
    if (lambda == 0.0) {
        return A.completeOrthogonalDecomposition().solve(-phi);
    }
    const double n = static_cast<double>(A.rows());
    Eigen::MatrixXd M = (A.transpose() * A) / n;
    M.diagonal().array() += lambda;
    const Eigen::VectorXd g = (A.transpose() * phi) / n;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success) {
        throw NumericError("lm_step: damped normal equations singular");
    }
    return ldlt.solve(-g);
}

double clamp_lambda(double lambda, const LmOptions& opts) {
    return std::min(std::max(lambda, opts.lambda_min), opts.lambda_max);
}

std::vector<Plane> tls_refit(const LmProblem& problem, const Eigen::Matrix<double, 24, 1>& w) {
    std::vector<Plane> planes;
    planes.reserve(problem.groups.size());
    for (const auto& g : problem.groups) {
        std::vector<Eigen::Vector3d> pts;
        pts.reserve(g.size());
        for (const auto& s : g) pts.push_back(s.p + s.J * w);
        planes.push_back(fit_plane(pts));
    }
    return planes;
}

struct StepNorms {
    double w = 0.0, gamma = 0.0, beta = 0.0;
};

StepNorms diff_norms(const LmState& a, const LmState& b) {
    StepNorms n;
    n.w = (a.w - b.w).norm();
    double g2 = 0.0, b2 = 0.0;
    for (size_t k = 0; k < a.planes.size(); ++k) {
        g2 += (a.planes[k].gamma - b.planes[k].gamma).squaredNorm();
        b2 += (a.planes[k].beta - b.planes[k].beta).squaredNorm();
    }
    n.gamma = std::sqrt(g2);
    n.beta = std::sqrt(b2);
    return n;
}

// Joint iteration: planes eliminated exactly by TLS refit, w stepped on the
// nuisance-projected residual system. The projection removes the per-plane
// offset and tilt directions that the refit already absorbs; without it those
// gauge directions stall the damping schedule.
LmStepResult joint_step(const LmState& state, const LmProblem& problem,
                        const LmOptions& opts) {
    const int N = problem.total();
    const int K = static_cast<int>(problem.groups.size());

    Eigen::MatrixXd A(N, 24);
    Eigen::VectorXd phi(N);
    Eigen::MatrixXd nuisance = Eigen::MatrixXd::Zero(N, 3 * K);
    int row = 0;
    for (int k = 0; k < K; ++k) {
        const Plane& pl = state.planes[k];
        Eigen::Vector3d u, v;
        tangent_basis(pl.beta, u, v);
        for (const auto& s : problem.groups[k]) {
            const Eigen::Vector3d d = s.p + s.J * state.w - pl.gamma;
            phi[row] = -d.dot(pl.beta);
            A.row(row) = -(pl.beta.transpose() * s.J);
            nuisance(row, 3 * k) = 1.0;
            nuisance(row, 3 * k + 1) = d.dot(u);
            nuisance(row, 3 * k + 2) = d.dot(v);
            ++row;
        }
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(nuisance);
    const Eigen::MatrixXd Qn =
        qr.householderQ() * Eigen::MatrixXd::Identity(N, 3 * K);
    const Eigen::MatrixXd Ared = A - Qn * (Qn.transpose() * A);

    const double sn = std::sqrt(static_cast<double>(N));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Ared / sn, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i) {
        if (sv[i] > opts.rcond * sv[0]) coef[i] = sv[i] / (sv[i] * sv[i] + state.lambda);
    }
    const Eigen::VectorXd dw =
        -(svd.matrixV() * (coef.asDiagonal() * (svd.matrixU().transpose() * (phi / sn))));

    LmStepResult res;
    res.f_old = lm_objective(state, problem);
    LmState cand = state;
    cand.w += dw;
    cand.planes = tls_refit(problem, cand.w);
    res.f_new = lm_objective(cand, problem);
    if (res.f_new < res.f_old) {
        res.accepted = true;
        cand.lambda = clamp_lambda(state.lambda * 0.7, opts);
        res.state = cand;
    } else {
        res.accepted = false;
        res.state = state;
        res.state.lambda = clamp_lambda(state.lambda * 2.0, opts);
    }
    res.candidate = cand;
    return res;
}

}  // namespace

LmLinearization residual_and_jacobians(const LmState& state, const LmProblem& problem) {
    if (problem.groups.size() != state.planes.size() || problem.groups.empty()) {
        throw ConfigError("residual_and_jacobians: group/plane count mismatch");
    }
    const int N = problem.total();
    LmLinearization lin;
    lin.phi.resize(N);
    lin.dphi_dw.resize(N, 24);
    int row = 0;
    for (size_t k = 0; k < problem.groups.size(); ++k) {
        const Plane& pl = state.planes[k];
        const int nk = static_cast<int>(problem.groups[k].size());
        lin.group_offset.push_back(row);
        Eigen::MatrixXd dg(nk, 3), db(nk, 3);
        for (int i = 0; i < nk; ++i) {
            const LinearSample& s = problem.groups[k][i];
            const Eigen::Vector3d d = s.p + s.J * state.w - pl.gamma;
            lin.phi[row] = -d.dot(pl.beta);
            lin.dphi_dw.row(row) = -(pl.beta.transpose() * s.J);
            dg.row(i) = pl.beta.transpose();
            db.row(i) = -d.transpose();
            ++row;
        }
        lin.dphi_dgamma.push_back(std::move(dg));
        lin.dphi_dbeta.push_back(std::move(db));
    }
    return lin;
}

double lm_objective(const LmState& state, const LmProblem& problem) {
    double acc = 0.0;
    int n = 0;
    for (size_t k = 0; k < problem.groups.size(); ++k) {
        const Plane& pl = state.planes[k];
        for (const auto& s : problem.groups[k]) {
            const double r = (s.p + s.J * state.w - pl.gamma).dot(pl.beta);
            acc += r * r;
            ++n;
        }
    }
    if (n == 0) throw ConfigError("lm_objective: no samples");
    return acc / (2.0 * n);
}

double lm_gradient_norm(const LmState& state, const LmProblem& problem) {
    const double N = problem.total();
    Eigen::Matrix<double, 24, 1> gw = Eigen::Matrix<double, 24, 1>::Zero();
    double acc = 0.0;
    for (size_t k = 0; k < problem.groups.size(); ++k) {
        const Plane& pl = state.planes[k];
        Eigen::Vector3d gg = Eigen::Vector3d::Zero();
        Eigen::Vector3d gb = Eigen::Vector3d::Zero();
        for (const auto& s : problem.groups[k]) {
            const Eigen::Vector3d d = s.p + s.J * state.w - pl.gamma;
            const double phi = -d.dot(pl.beta);
            gw += (-(s.J.transpose() * pl.beta)) * phi / N;
            gg += pl.beta * phi / N;
            gb += -d * phi / N;
        }
        gb -= gb.dot(pl.beta) * pl.beta;  // unit-norm constraint tangent
        acc += gg.squaredNorm() + gb.squaredNorm();
    }
    return std::sqrt(acc + gw.squaredNorm());
}

LmStepResult lm_step(const LmState& state, const LmProblem& problem) {
    const LmOptions clamp_defaults;
    LmStepResult res;
    res.f_old = lm_objective(state, problem);

    LmState cand = state;
    {
        const LmLinearization lin = residual_and_jacobians(cand, problem);
        cand.w += damped_step(lin.dphi_dw, lin.phi, state.lambda).eval();
    }
    {
        const LmLinearization lin = residual_and_jacobians(cand, problem);
        for (size_t k = 0; k < cand.planes.size(); ++k) {
            const int nk = static_cast<int>(problem.groups[k].size());
            const Eigen::VectorXd phik = lin.phi.segment(lin.group_offset[k], nk);
            cand.planes[k].gamma += damped_step(lin.dphi_dgamma[k], phik, state.lambda);
        }
    }
    {
        const LmLinearization lin = residual_and_jacobians(cand, problem);
        for (size_t k = 0; k < cand.planes.size(); ++k) {
            const int nk = static_cast<int>(problem.groups[k].size());
            const Eigen::VectorXd phik = lin.phi.segment(lin.group_offset[k], nk);
            const Eigen::Vector3d db = damped_step(lin.dphi_dbeta[k], phik, state.lambda);
            const Eigen::Vector3d b = cand.planes[k].beta + db;
            if (!(b.norm() > 0.0)) throw NumericError("lm_step: beta collapsed to zero");
            cand.planes[k].beta = b.normalized();
        }
    }

    res.f_new = lm_objective(cand, problem);
    if (res.f_new < res.f_old) {
        res.accepted = true;
        cand.lambda = clamp_lambda(state.lambda * 0.7, clamp_defaults);
        res.state = cand;
    } else {
        res.accepted = false;
        res.state = state;
        res.state.lambda = clamp_lambda(state.lambda * 2.0, clamp_defaults);
    }
    res.candidate = cand;
    return res;
}

LmResult lm_optimize(const LmState& init, const LmProblem& problem, const LmOptions& opts) {
    if (problem.total() < 4) throw ConfigError("lm_optimize: need at least 4 samples");
    LmResult out;
    out.state = init;
    out.state.lambda = clamp_lambda(init.lambda, opts);
    if (opts.mode == LmOptions::Mode::Joint) {
        out.state.planes = tls_refit(problem, out.state.w);
    }
    double f = lm_objective(out.state, problem);

    for (int it = 0; it < opts.max_iters; ++it) {
        const LmStepResult res = opts.mode == LmOptions::Mode::Joint
                                     ? joint_step(out.state, problem, opts)
                                     : lm_step(out.state, problem);
        ++out.iterations;
        const StepNorms steps = diff_norms(res.candidate, out.state);

        LmIteration rec;
        rec.lambda = res.state.lambda;
        rec.step_w = steps.w;
        rec.step_gamma = steps.gamma;
        rec.step_beta = steps.beta;
        rec.accepted = res.accepted;

        const bool tiny_step =
            steps.w < opts.steptol && steps.gamma < opts.steptol && steps.beta < opts.steptol;

        if (res.accepted) {
            ++out.accepted;
            const double rel = (f - res.f_new) / std::max(f, 1e-30);
            out.state = res.state;
            f = res.f_new;
            rec.f = f;
            out.trace.iterations.push_back(rec);
            if (rel < opts.ftol || tiny_step) {
                out.converged = true;
                break;
            }
        } else {
            out.state.lambda = res.state.lambda;
            rec.f = f;
            out.trace.iterations.push_back(rec);
            if (tiny_step) {
                out.converged = true;
                break;
            }
        }
    }
    return out;
}

}  // namespace plancal
