#include "plancal/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace plancal {

MetricSet compute_metrics(const std::vector<double>& residuals) {
    if (residuals.empty()) throw ConfigError("compute_metrics: empty residual vector");
    MetricSet m;
    m.n = static_cast<int>(residuals.size());
    double sum_sq = 0.0, sum_abs = 0.0;
    for (double r : residuals) {
        sum_sq += r * r;
        sum_abs += std::abs(r);
        m.max = std::max(m.max, std::abs(r));
    }
    m.rmse = std::sqrt(sum_sq / m.n);
    const double mean_abs = sum_abs / m.n;
    double var = 0.0;
    for (double r : residuals) {
        const double d = std::abs(r) - mean_abs;
        var += d * d;
    }
    m.std_dev = std::sqrt(var / m.n);
    return m;
}

AltMetrics compute_alt_metrics(const std::vector<double>& residuals) {
    if (residuals.empty()) throw ConfigError("compute_alt_metrics: empty residual vector");
    AltMetrics a;
    double sum_abs = 0.0;
    for (double r : residuals) sum_abs += std::abs(r);
    a.mean_abs = sum_abs / residuals.size();
    a.abs_sum_over_sqrt_n = sum_abs / std::sqrt(static_cast<double>(residuals.size()));
    return a;
}

Method method_from_string(const std::string& name) {
    if (name == "ekf") return Method::Ekf;
    if (name == "sckf") return Method::Sckf;
    if (name == "lm") return Method::Lm;
    if (name == "sckf_lm") return Method::SckfLm;
    throw ConfigError("unknown method \"" + name + "\"; valid: ekf, sckf, lm, sckf_lm");
}

std::string method_to_string(Method m) {
    switch (m) {
        case Method::Ekf: return "ekf";
        case Method::Sckf: return "sckf";
        case Method::Lm: return "lm";
        default: return "sckf_lm";
    }
}

SplitIndices split_samples(const std::vector<std::vector<Sample>>& groups, int holdout,
                           std::uint64_t seed) {
    int total = 0;
    for (const auto& g : groups) total += static_cast<int>(g.size());
    if (holdout < 0 || holdout >= total) {
        throw ConfigError("split_samples: holdout must be in [0, total)");
    }
    std::vector<int> perm(total);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed + 10007);
    for (int i = total - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[i], perm[j]);
    }
    std::vector<bool> is_val(total, false);
    for (int i = 0; i < holdout; ++i) is_val[perm[i]] = true;

    SplitIndices out;
    int offset = 0;
    for (const auto& g : groups) {
        std::vector<int> tr, va;
        for (int i = 0; i < static_cast<int>(g.size()); ++i) {
            (is_val[offset + i] ? va : tr).push_back(i);
        }
        out.train.push_back(std::move(tr));
        out.val.push_back(std::move(va));
        offset += static_cast<int>(g.size());
    }
    return out;
}

namespace {

struct FoldedGroups {
    std::vector<std::vector<LinearSample>> train, val;
};

FoldedGroups fold_split(const std::vector<std::vector<Sample>>& groups, const DhTable& nominal,
                        const SplitIndices& split) {
    FoldedGroups f;
    for (size_t k = 0; k < groups.size(); ++k) {
        std::vector<LinearSample> tr, va;
        auto fold = [&](int i) {
            LinearSample ls;
            ls.p = tool_position(apply_dial_to_model(groups[k][i], nominal), groups[k][i].q);
            ls.J = position_jacobian(nominal, groups[k][i].q);
            return ls;
        };
        for (int i : split.train[k]) tr.push_back(fold(i));
        for (int i : split.val[k]) va.push_back(fold(i));
        f.train.push_back(std::move(tr));
        f.val.push_back(std::move(va));
    }
    return f;
}

std::vector<Plane> tls_planes(const std::vector<std::vector<LinearSample>>& groups,
                              const Eigen::Matrix<double, 24, 1>& w) {
    std::vector<Plane> planes;
    for (const auto& g : groups) {
        std::vector<Eigen::Vector3d> pts;
        for (const auto& s : g) pts.push_back(s.p + s.J * w);
        planes.push_back(fit_plane(pts));
    }
    return planes;
}

// Held-out evaluation: planes refit on the corrected training points, then
// residuals of the corrected evaluation points against those planes.
std::vector<double> eval_residuals(const std::vector<std::vector<LinearSample>>& train,
                                   const std::vector<std::vector<LinearSample>>& eval,
                                   const Eigen::Matrix<double, 24, 1>& w) {
    const std::vector<Plane> planes = tls_planes(train, w);
    std::vector<double> rs;
    for (size_t k = 0; k < eval.size(); ++k) {
        for (const auto& s : eval[k]) {
            rs.push_back(plane_residual(s.p + s.J * w, planes[k]));
        }
    }
    return rs;
}

double train_objective(const std::vector<std::vector<LinearSample>>& train,
                       const std::vector<Plane>& planes, const Eigen::VectorXd& x) {
    double acc = 0.0;
    int n = 0;
    for (size_t k = 0; k < train.size(); ++k) {
        for (const auto& s : train[k]) {
            const double r = plane_residual(s.p + s.J * x, planes[k]);
            acc += r * r;
            ++n;
        }
    }
    return acc / (2.0 * n);
}

// Sequential filter pass over all training groups, state carried across
// groups. Measurements stay linearized at the nominal fold (the same system
// LM sees), so the filters and the optimizer solve the same problem.
struct FilterPass {
    Eigen::VectorXd x;
    std::vector<double> objective_trace;
};

FilterPass run_filter(const std::vector<std::vector<LinearSample>>& train,
                      const std::vector<Plane>& planes, const FilterParams& params,
                      Method method) {
    const int n = ParamDelta::kDim;
    Eigen::VectorXd p0(n);
    for (int i = 0; i < n; ++i) {
        const bool angular = i < 6 || i >= 18;
        p0[i] = angular ? params.p0_angle : params.p0_length;
    }
    NoiseConfig noise;
    noise.sq_diag = Eigen::VectorXd::Constant(n, std::sqrt(params.q));
    noise.sr = params.r_sigma;

    FilterPass pass;
    if (method == Method::Sckf) {
        SqrtState st{Eigen::VectorXd::Zero(n),
                     Eigen::MatrixXd(p0.array().sqrt().matrix().asDiagonal())};
        for (size_t k = 0; k < train.size(); ++k) {
            for (const auto& s : train[k]) {
                st = time_update(st, noise);
                const Plane& pl = planes[k];
                const auto h = [&s, &pl](const Eigen::VectorXd& x) {
                    return plane_residual(s.p + s.J * x, pl);
                };
                st = measurement_update(st, h, 0.0, noise);
                pass.objective_trace.push_back(train_objective(train, planes, st.x));
            }
        }
        pass.x = st.x;
    } else {
        CovState st{Eigen::VectorXd::Zero(n), Eigen::MatrixXd(p0.asDiagonal())};
        const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n) * params.q;
        const double r = params.r_sigma * params.r_sigma;
        for (size_t k = 0; k < train.size(); ++k) {
            for (const auto& s : train[k]) {
                const Plane& pl = planes[k];
                const auto h = [&s, &pl](const Eigen::VectorXd& x) {
                    return plane_residual(s.p + s.J * x, pl);
                };
                const Eigen::RowVectorXd grad = pl.beta.transpose() * s.J;
                st = ekf_update(st, h, grad, 0.0, r, Q);
                pass.objective_trace.push_back(train_objective(train, planes, st.x));
            }
        }
        pass.x = st.x;
    }
    return pass;
}

Eigen::MatrixXd identification_matrix(const std::vector<std::vector<LinearSample>>& train,
                                      const std::vector<Plane>& planes) {
    int total = 0;
    for (const auto& g : train) total += static_cast<int>(g.size());
    Eigen::MatrixXd A(total, 24);
    int row = 0;
    for (size_t k = 0; k < train.size(); ++k) {
        for (const auto& s : train[k]) A.row(row++) = planes[k].beta.transpose() * s.J;
    }
    return A;
}

}  // namespace

CalibrationReport calibrate(const std::vector<std::vector<Sample>>& groups,
                            const DhTable& nominal, Method method,
                            const CalibrationConfig& config, std::uint64_t seed) {
    int total = 0;
    for (const auto& g : groups) total += static_cast<int>(g.size());
    if (groups.empty() || total < 4) {
        throw ConfigError("calibrate: need at least 4 samples");
    }
    if (total - config.holdout < 4) {
        throw ConfigError("calibrate: fewer than 4 training samples after holdout");
    }

    const SplitIndices split = split_samples(groups, config.holdout, seed);
    for (size_t k = 0; k < split.train.size(); ++k) {
        if (split.train[k].size() < 3) {
            throw ConfigError("calibrate: plane group " + std::to_string(k + 1) +
                              " has fewer than 3 training samples after holdout");
        }
    }
    const FoldedGroups folded = fold_split(groups, nominal, split);
    const std::vector<Plane> planes0 = tls_planes(folded.train, Eigen::Matrix<double, 24, 1>::Zero());

    CalibrationReport rep;
    rep.method = method_to_string(method);
    rep.seed = seed;
    for (const auto& g : folded.train) rep.n_train += static_cast<int>(g.size());
    for (const auto& g : folded.val) rep.n_val += static_cast<int>(g.size());

    Eigen::Matrix<double, 24, 1> w = Eigen::Matrix<double, 24, 1>::Zero();
    std::vector<Plane> final_planes = planes0;

    const auto run_lm = [&](const Eigen::Matrix<double, 24, 1>& w_init) {
        LmProblem problem;
        problem.groups = folded.train;
        LmState init;
        init.w = w_init;
        init.planes = planes0;
        init.lambda = config.lambda0;
        const LmResult res = lm_optimize(init, problem, config.lm);
        w = res.state.w;
        final_planes = res.state.planes;
        rep.iterations += res.iterations;
        rep.accepted += res.accepted;
        rep.converged = res.converged;
        for (const auto& it : res.trace.iterations) rep.objective_trace.push_back(it.f);
    };

    switch (method) {
        case Method::Ekf:
        case Method::Sckf: {
            const FilterPass pass = run_filter(folded.train, planes0, config.filter, method);
            w = pass.x;
            rep.objective_trace = pass.objective_trace;
            rep.iterations = static_cast<int>(pass.objective_trace.size());
            final_planes = tls_planes(folded.train, w);
            break;
        }
        case Method::Lm:
            run_lm(Eigen::Matrix<double, 24, 1>::Zero());
            break;
        case Method::SckfLm: {
            const FilterPass pass = run_filter(folded.train, planes0, config.filter, Method::Sckf);
            run_lm(pass.x);
            break;
        }
    }

    rep.identified = ParamDelta::unflatten(w);
    rep.calibrated = apply_delta(nominal, rep.identified);
    rep.plane_estimates = final_planes;

    const Eigen::Matrix<double, 24, 1> zero = Eigen::Matrix<double, 24, 1>::Zero();
    rep.residuals_train_before = eval_residuals(folded.train, folded.train, zero);
    rep.residuals_train_after = eval_residuals(folded.train, folded.train, w);
    rep.residuals_val_before = eval_residuals(folded.train, folded.val, zero);
    rep.residuals_val_after = eval_residuals(folded.train, folded.val, w);
    rep.train_before = compute_metrics(rep.residuals_train_before);
    rep.train_after = compute_metrics(rep.residuals_train_after);
    rep.val_before = compute_metrics(rep.residuals_val_before);
    rep.val_after = compute_metrics(rep.residuals_val_after);
    rep.val_before_alt = compute_alt_metrics(rep.residuals_val_before);
    rep.val_after_alt = compute_alt_metrics(rep.residuals_val_after);

    const Eigen::MatrixXd A = identification_matrix(folded.train, planes0);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    const Eigen::VectorXd& sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i) {
        rep.identification_singular_values.push_back(sv[i]);
        if (sv[i] >= config.rank_tol * sv[0]) ++rep.identification_rank;
    }
    return rep;
}

CompareResult compare(const std::vector<std::vector<Sample>>& groups, const DhTable& nominal,
                      const std::vector<Method>& methods, const CalibrationConfig& config,
                      std::uint64_t seed) {
    if (methods.empty()) throw ConfigError("compare: empty method list");
    CompareResult out;
    for (Method m : methods) {
        try {
            out.reports.push_back(calibrate(groups, nominal, m, config, seed));
            out.errors.emplace_back();
        } catch (const std::exception& e) {
            out.reports.emplace_back();
            out.reports.back().method = method_to_string(m);
            out.errors.emplace_back(e.what());
        }
    }
    return out;
}

}  // namespace plancal
