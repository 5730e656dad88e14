// Acceptance gate: runs the benchmark and property checks end to end and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "plancal/config.hpp"
#include "plancal/pipeline.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

namespace fs = std::filesystem;
using namespace plancal;

namespace {

int g_failures = 0;

void report(int id, bool pass, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", buf);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::vector<LinearSample>> fold_groups(const std::vector<std::vector<Sample>>& groups,
                                                   const DhTable& nominal) {
    std::vector<std::vector<LinearSample>> folded;
    for (const auto& g : groups) {
        std::vector<LinearSample> lin;
        for (const auto& smp : g) {
            LinearSample ls;
            ls.J = position_jacobian(nominal, smp.q);
            ls.p = tool_position(apply_dial_to_model(smp, nominal), smp.q);
            lin.push_back(ls);
        }
        folded.push_back(std::move(lin));
    }
    return folded;
}

std::vector<Plane> fit_group_planes(const std::vector<std::vector<LinearSample>>& folded,
                                    const Eigen::Matrix<double, 24, 1>& w) {
    std::vector<Plane> planes;
    for (const auto& g : folded) {
        std::vector<Eigen::Vector3d> pts;
        for (const auto& s : g) pts.push_back(s.p + s.J * w);
        planes.push_back(fit_plane(pts));
    }
    return planes;
}

Eigen::MatrixXd identification_rows(const std::vector<std::vector<LinearSample>>& folded,
                                    const std::vector<Plane>& planes) {
    int total = 0;
    for (const auto& g : folded) total += static_cast<int>(g.size());
    Eigen::MatrixXd A(total, 24);
    int row = 0;
    for (size_t k = 0; k < folded.size(); ++k) {
        for (const auto& s : folded[k]) A.row(row++) = planes[k].beta.transpose() * s.J;
    }
    return A;
}

// Ordering check with a small relative tie tolerance: near-identical values
// (ekf vs sckf style) should not flip the verdict.
bool leq(double a, double b) { return a <= b * (1.0 + 1e-4); }

// ---------------------------------------------------------------------------

// Benchmark B1: 3 planes x 40 samples, sigma 0.01 mm, 35 held out, seed 42.
void criterion_1_accuracy() {
    const auto t0 = std::chrono::steady_clock::now();
    const SimScenario sc = scenarios::multi_plane_scenario(42);
    const SimData data = generate(sc);
    const auto groups = scenarios::sample_groups(data);
    const CalibrationConfig cfg = scenarios::multi_plane_config(42).calibration;
    const CalibrationReport rep = calibrate(groups, sc.nominal, Method::SckfLm, cfg, 42);
    const double dt = seconds_since(t0);
    const double reduction = 100.0 * (1.0 - rep.val_after.rmse / rep.val_before.rmse);
    report(1, reduction >= 70.0 && dt <= 60.0,
           "B1 sckf_lm val RMSE %.6f -> %.6f mm, reduction %.1f%% (need >= 70%%), %.2f s "
           "(limit 60 s)",
           rep.val_before.rmse, rep.val_after.rmse, reduction, dt);
}

void criterion_2_ordering() {
    const std::vector<std::uint64_t> seeds{42, 101, 202, 303, 404};
    int agree = 0, agree_rmse = 0, agree_max = 0;
    std::string detail;
    for (std::uint64_t seed : seeds) {
        const SimScenario sc = scenarios::multi_plane_scenario(seed);
        const SimData data = generate(sc);
        const auto groups = scenarios::sample_groups(data);
        const CalibrationConfig cfg = scenarios::multi_plane_config(seed).calibration;
        const CalibrationReport ekf = calibrate(groups, sc.nominal, Method::Ekf, cfg, seed);
        const CalibrationReport lm = calibrate(groups, sc.nominal, Method::Lm, cfg, seed);
        const CalibrationReport hyb = calibrate(groups, sc.nominal, Method::SckfLm, cfg, seed);
        const bool rmse_ok = leq(hyb.val_after.rmse, lm.val_after.rmse) &&
                             leq(lm.val_after.rmse, ekf.val_after.rmse);
        const bool max_ok =
            leq(hyb.val_after.max, lm.val_after.max) && leq(lm.val_after.max, ekf.val_after.max);
        agree_rmse += rmse_ok;
        agree_max += max_ok;
        agree += rmse_ok && max_ok;
        detail += (rmse_ok && max_ok) ? "+" : "-";
    }
    report(2, agree >= 4,
           "sckf_lm <= lm <= ekf on 5 seeds [%s]: both orderings %d/5 (rmse %d/5, max %d/5), "
           "need >= 4/5",
           detail.c_str(), agree, agree_rmse, agree_max);
}

// Noiseless scenario, injected delta inside the effectively observable
// subspace (nuisance-projected row space at 1e-6), angular scale 0.002 deg so
// the linearized fold represents it far below the 1e-6 mm gate.
void criterion_3_exact_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    SimScenario sc = scenarios::multi_plane_scenario(42, 40, 0.0);
    sc.truth_delta = ParamDelta{};
    const SimData data0 = generate(sc);
    const auto folded = fold_groups(scenarios::sample_groups(data0), sc.nominal);
    const std::vector<Plane> planes = fit_group_planes(folded, Eigen::Matrix<double, 24, 1>::Zero());
    const Eigen::MatrixXd A = identification_rows(folded, planes);
    const int N = static_cast<int>(A.rows());
    const int K = static_cast<int>(folded.size());

    Eigen::MatrixXd nuisance = Eigen::MatrixXd::Zero(N, 3 * K);
    int row = 0;
    for (int k = 0; k < K; ++k) {
        const Eigen::Vector3d u = planes[k].beta.unitOrthogonal();
        const Eigen::Vector3d v = planes[k].beta.cross(u);
        for (const auto& s : folded[k]) {
            const Eigen::Vector3d d = s.p - planes[k].gamma;
            nuisance(row, 3 * k) = 1.0;
            nuisance(row, 3 * k + 1) = d.dot(u);
            nuisance(row, 3 * k + 2) = d.dot(v);
            ++row;
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(nuisance);
    const Eigen::MatrixXd Qn = qr.householderQ() * Eigen::MatrixXd::Identity(N, 3 * K);
    const Eigen::MatrixXd Ared = A - Qn * (Qn.transpose() * A);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Ared / std::sqrt(double(N)),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    // Keep the injected directions comfortably above the solver's 1e-3
    // cutoff so every component is actually steppable.
    const Eigen::VectorXd& sv = svd.singularValues();
    int reff = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv[i] > 1e-2 * sv[0]) ++reff;
    }

    Rng rng(99);
    Eigen::VectorXd c(reff);
    for (int i = 0; i < reff; ++i) c[i] = rng.uniform(-1.0, 1.0);
    Eigen::Matrix<double, 24, 1> base = svd.matrixV().leftCols(reff) * c;
    double ang = 0.0;
    for (int i = 0; i < 24; ++i) {
        if (i < 6 || i >= 18) ang = std::max(ang, std::abs(base[i]));
    }
    const Eigen::Matrix<double, 24, 1> truth_flat = base * (deg2rad(0.002) / ang);

    sc.truth_delta = ParamDelta::unflatten(truth_flat);
    const SimData data3 = generate(sc);
    const auto groups3 = scenarios::sample_groups(data3);
    CalibrationConfig cfg = scenarios::multi_plane_config(42).calibration;
    cfg.lm.rcond = 1e-3;  // step only along well-observed directions
    cfg.lm.ftol = 1e-14;
    const CalibrationReport rep = calibrate(groups3, sc.nominal, Method::Lm, cfg, 42);
    const ScoreRecord rec = score_against_truth(rep.identified, sc, data3.groups);
    const double dt = seconds_since(t0);
    report(3,
           rep.val_after.rmse <= 1e-6 && rec.observable_error <= 1e-6 && dt <= 10.0,
           "noiseless recovery (%d strong directions): val RMSE %.2e mm (<= 1e-6), observable "
           "parameter error %.2e (<= 1e-6), %.2f s (limit 10 s)",
           reff, rep.val_after.rmse, rec.observable_error, dt);
}

void criterion_4_sqrt_equivalence() {
    const int n = 8, steps = 120;
    Rng rng(4242);
    auto normal_vec = [&](int m) {
        Eigen::VectorXd v(m);
        for (int i = 0; i < m; ++i) v[i] = rng.normal();
        return v;
    };
    Eigen::MatrixXd M(n, n + 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n + 3; ++j) M(i, j) = rng.normal();
    SqrtState s{normal_vec(n), tria(M)};
    oracles::CkfState ck{s.x, s.S * s.S.transpose()};

    NoiseConfig noise;
    noise.sq_diag = Eigen::VectorXd::Constant(n, 1e-3);
    noise.sr = 0.3;
    const Eigen::VectorXd q_var = Eigen::VectorXd::Constant(n, 1e-6);

    double worst_x = 0.0, worst_p = 0.0, worst_eig = 0.0;
    for (int t = 0; t < steps; ++t) {
        s = time_update(s, noise);
        ck = oracles::ckf_time_update(ck, q_var);
        const Eigen::RowVectorXd g = normal_vec(n).transpose();
        const double c = rng.normal();
        const double z = 2.0 * rng.normal();
        const auto h = [&](const Eigen::VectorXd& x) { return (g * x)(0) + c; };
        s = measurement_update(s, h, z, noise);
        ck = oracles::ckf_measurement_update(ck, h, z, noise.sr * noise.sr);

        const Eigen::MatrixXd P = s.S * s.S.transpose();
        worst_x = std::max(worst_x, (s.x - ck.x).norm() / std::max(1.0, ck.x.norm()));
        worst_p = std::max(worst_p, (P - ck.P).norm() / ck.P.norm());
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P)
                                   .eigenvalues()
                                   .minCoeff();
        worst_eig = std::min(worst_eig, min_eig);
    }
    report(4, worst_x <= 1e-9 && worst_p <= 1e-9 && worst_eig >= -1e-12,
           "%d sequential updates: max |x - ckf| %.2e, max |SS' - P| %.2e rel (<= 1e-9), "
           "min eigenvalue %.1e (>= -1e-12)",
           steps, worst_x, worst_p, worst_eig);
}

void criterion_5_linear_gaussian() {
    Rng rng(515);
    double worst_sckf = 0.0, worst_ekf = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + trial % 6;
        Eigen::VectorXd x0(n);
        for (int i = 0; i < n; ++i) x0[i] = rng.normal();
        Eigen::VectorXd p0(n);
        for (int i = 0; i < n; ++i) p0[i] = 0.1 + rng.uniform(0.0, 2.0);
        Eigen::RowVectorXd g(n);
        for (int i = 0; i < n; ++i) g[i] = rng.normal();
        const double c = rng.normal();
        const double z = 3.0 * rng.normal();
        const double sq = 1e-3, sr = 0.4;
        const auto h = [&](const Eigen::VectorXd& x) { return (g * x)(0) + c; };

        NoiseConfig noise;
        noise.sq_diag = Eigen::VectorXd::Constant(n, sq);
        noise.sr = sr;
        SqrtState s{x0, Eigen::MatrixXd(p0.array().sqrt().matrix().asDiagonal())};
        s = time_update(s, noise);
        s = measurement_update(s, h, z, noise);

        CovState e{x0, Eigen::MatrixXd(p0.asDiagonal())};
        e = ekf_update(e, h, g, z, sr * sr,
                       Eigen::MatrixXd::Identity(n, n) * sq * sq);

        const oracles::KfState kf = oracles::kf_scalar_update(
            {x0, Eigen::MatrixXd(p0.asDiagonal())}, g, c, z, sr * sr,
            Eigen::MatrixXd::Identity(n, n) * sq * sq);
        worst_sckf = std::max(worst_sckf, (s.x - kf.x).cwiseAbs().maxCoeff());
        worst_ekf = std::max(worst_ekf, (e.x - kf.x).cwiseAbs().maxCoeff());
    }
    report(5, worst_sckf <= 1e-10 && worst_ekf <= 1e-10,
           "closed-form scalar update over 20 trials: sckf max error %.2e, ekf max error %.2e "
           "(<= 1e-10)",
           worst_sckf, worst_ekf);
}

void criterion_6_jacobians() {
    Rng rng(606);
    auto random_table = [&]() {
        DhTable t;
        for (int j = 0; j < 6; ++j) {
            t.links[j].alpha = rng.uniform(-kPi, kPi);
            t.links[j].a = rng.uniform(-500.0, 500.0);
            t.links[j].d = rng.uniform(-500.0, 500.0);
            t.links[j].theta_offset = rng.uniform(-kPi, kPi);
        }
        return t;
    };
    double worst_j = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const DhTable t = (trial % 2 == 0) ? DhTable::default_nominal() : random_table();
        Joints q;
        for (int i = 0; i < 6; ++i) q[i] = rng.uniform(-kPi, kPi);
        const PositionJacobian diff =
            position_jacobian(t, q) - oracles::cs_position_jacobian(t, q);
        worst_j = std::max(worst_j, diff.cwiseAbs().maxCoeff());
    }

    double worst_block = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        LmProblem problem;
        std::vector<LinearSample> group;
        for (int i = 0; i < 12; ++i) {
            LinearSample s;
            for (int r = 0; r < 3; ++r)
                for (int col = 0; col < 24; ++col) s.J(r, col) = rng.uniform(-1.0, 1.0);
            s.p = {rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
            group.push_back(s);
        }
        problem.groups.push_back(group);
        LmState state;
        for (int i = 0; i < 24; ++i) state.w[i] = 0.02 * rng.normal();
        Plane pl;
        pl.gamma = {rng.uniform(-5, 5), rng.uniform(-5, 5), 5.0};
        pl.beta = {0.1 * rng.normal(), 0.1 * rng.normal(), 1.0};  // deliberately non-unit
        state.planes = {pl};

        const LmLinearization lin = residual_and_jacobians(state, problem);
        const double h = 1e-7;
        auto phi_at = [&](const LmState& st) { return residual_and_jacobians(st, problem).phi; };
        auto record = [&](const Eigen::VectorXd& fd, int i, double an) {
            worst_block = std::max(worst_block, std::abs(fd[i] - an) / std::max(1.0, std::abs(an)));
        };
        for (int c = 0; c < 24; ++c) {
            LmState sp = state, sm = state;
            sp.w[c] += h;
            sm.w[c] -= h;
            const Eigen::VectorXd fd = (phi_at(sp) - phi_at(sm)) / (2 * h);
            for (int i = 0; i < fd.size(); ++i) record(fd, i, lin.dphi_dw(i, c));
        }
        for (int c = 0; c < 3; ++c) {
            LmState sp = state, sm = state;
            sp.planes[0].gamma[c] += h;
            sm.planes[0].gamma[c] -= h;
            const Eigen::VectorXd fd = (phi_at(sp) - phi_at(sm)) / (2 * h);
            for (int i = 0; i < fd.size(); ++i) record(fd, i, lin.dphi_dgamma[0](i, c));
        }
        for (int c = 0; c < 3; ++c) {
            LmState sp = state, sm = state;
            sp.planes[0].beta[c] += h;
            sm.planes[0].beta[c] -= h;
            const Eigen::VectorXd fd = (phi_at(sp) - phi_at(sm)) / (2 * h);
            for (int i = 0; i < fd.size(); ++i) record(fd, i, lin.dphi_dbeta[0](i, c));
        }
    }
    report(6, worst_j <= 1e-5 && worst_block <= 1e-5,
           "position_jacobian vs oracle on 50 pairs: max %.2e (<= 1e-5); LM blocks vs finite "
           "differences at 20 states: max %.2e rel (<= 1e-5)",
           worst_j, worst_block);
}

void criterion_7_monotone_descent() {
    // Benchmark run: B1 training fold, joint mode from w = 0.
    const SimScenario sc = scenarios::multi_plane_scenario(42);
    const SimData data = generate(sc);
    const auto groups = scenarios::sample_groups(data);
    const SplitIndices split = split_samples(groups, 35, 42);
    LmProblem problem;
    const auto folded = fold_groups(groups, sc.nominal);
    for (size_t k = 0; k < folded.size(); ++k) {
        std::vector<LinearSample> train;
        for (int i : split.train[k]) train.push_back(folded[k][i]);
        problem.groups.push_back(std::move(train));
    }
    LmState init;
    init.planes = fit_group_planes(problem.groups, Eigen::Matrix<double, 24, 1>::Zero());
    LmOptions opts;
    opts.mode = LmOptions::Mode::Joint;
    const LmResult bench = lm_optimize(init, problem, opts);
    bool monotone = true;
    double prev = lm_objective(init, problem);
    for (const auto& it : bench.trace.iterations) {
        if (it.accepted) {
            if (!(it.f < prev)) monotone = false;
            prev = it.f;
        }
    }

    // Noiseless toy: converged stationary point.
    Rng rng(707);
    LmProblem toy;
    LmState toy_init;
    {
        const Plane plane = Plane::make({0, 0, 5}, {0, 0, 1});
        const Eigen::Vector3d u = plane.beta.unitOrthogonal();
        const Eigen::Vector3d v = plane.beta.cross(u);
        Eigen::Matrix<double, 24, 1> w_star;
        for (int i = 0; i < 24; ++i) w_star[i] = 0.02 * rng.normal();
        std::vector<LinearSample> group;
        for (int i = 0; i < 60; ++i) {
            LinearSample s;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 24; ++c) s.J(r, c) = rng.uniform(-1.0, 1.0);
            s.p = plane.gamma + rng.uniform(-60, 60) * u + rng.uniform(-60, 60) * v -
                  s.J * w_star;
            group.push_back(s);
        }
        toy.groups.push_back(group);
        toy_init.planes = {plane};
    }
    const LmResult toy_res = lm_optimize(toy_init, toy, LmOptions{});
    const double grad = lm_gradient_norm(toy_res.state, toy);

    // Gauss-Newton limit: lambda = 0 solves the linear toy in one step.
    LmProblem scalar;
    scalar.groups.emplace_back();
    for (int i = 0; i < 4; ++i) {
        LinearSample s;
        s.J = PositionJacobian::Zero();
        s.J(2, 7) = -1.0;
        s.p = {3.0 + i, -2.0, 0.0};
        scalar.groups[0].push_back(s);
    }
    LmState scalar_state;
    scalar_state.w[7] = 1.0;
    scalar_state.planes = {Plane::make({0, 0, 0}, {0, 0, 1})};
    scalar_state.lambda = 0.0;
    const LmStepResult gn = lm_step(scalar_state, scalar);
    const bool one_step = gn.accepted && std::abs(gn.state.w[7]) < 1e-14 && gn.f_new < 1e-28;

    report(7, monotone && bench.converged && toy_res.converged && grad <= 1e-8 && one_step,
           "accepted objectives strictly decreasing over %d accepted steps (converged %s); toy "
           "gradient norm %.2e (<= 1e-8); one Gauss-Newton step leaves |w| %.1e, f %.1e",
           bench.accepted, bench.converged ? "yes" : "no", grad, std::abs(gn.state.w[7]),
           gn.f_new);
}

void criterion_8_metrics() {
    const MetricSet m1 = compute_metrics({1.0, -1.0});
    const MetricSet m2 = compute_metrics({3.0, 4.0});
    const bool hand = std::abs(m1.rmse - 1.0) <= 1e-12 && std::abs(m1.max - 1.0) <= 1e-12 &&
                      std::abs(m1.std_dev) <= 1e-12 && std::abs(m2.max - 4.0) <= 1e-12 &&
                      std::abs(m2.rmse - std::sqrt(12.5)) <= 1e-12;

    const SimScenario sc = scenarios::multi_plane_scenario(8, 12, 0.01);
    const SimData data = generate(sc);
    CalibrationConfig cfg = scenarios::multi_plane_config(8).calibration;
    cfg.holdout = 8;
    const CalibrationReport rep =
        calibrate(scenarios::sample_groups(data), sc.nominal, Method::Sckf, cfg, 8);
    const MetricSet va = compute_metrics(rep.residuals_val_after);
    const MetricSet tb = compute_metrics(rep.residuals_train_before);
    const bool recomputable = std::abs(va.rmse - rep.val_after.rmse) <= 1e-12 &&
                              std::abs(va.max - rep.val_after.max) <= 1e-12 &&
                              std::abs(va.std_dev - rep.val_after.std_dev) <= 1e-12 &&
                              std::abs(tb.rmse - rep.train_before.rmse) <= 1e-12;
    report(8, hand && recomputable,
           "hand values ([1,-1] rmse 1, [3,4] max 4): %s; stored residuals reproduce report "
           "metrics to 1e-12: %s",
           hand ? "ok" : "MISMATCH", recomputable ? "ok" : "MISMATCH");
}

void criterion_9_determinism() {
    const char* exe = std::getenv("PLANCAL_CLI");
    if (exe == nullptr) {
        report(9, false, "PLANCAL_CLI not set; cannot spawn the CLI");
        return;
    }
    const fs::path root = fs::temp_directory_path() / "plancal_accept";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path data = root / "data";
    const fs::path cfg_path = root / "config.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << "{\n  \"seed\": 21,\n  \"output_dir\": \"" << data.string() << "\",\n"
            << "  \"scenario\": {\n    \"sigma_mm\": 0.01,\n    \"posture_amp_deg\": 20,\n"
            << "    \"truth\": {\"mode\": \"random\"},\n    \"planes\": [\n"
            << "      {\"gamma_mm\": [1650, 0, 900], \"beta\": [0, 0, 1],\n"
            << "       \"seed_q_deg\": [0, 31.5127, -14.3239, 0, -14.3239, 0], \"samples\": 20},\n"
            << "      {\"gamma_mm\": [1500, 280, 950], \"beta\": [0.435, 0, 0.9004],\n"
            << "       \"seed_q_deg\": [14.3239, 28.6479, -17.1887, 22.9183, -34.3775, 0], "
               "\"samples\": 20}\n"
            << "    ]\n  },\n"
            << "  \"calibration\": {\"method\": \"sckf_lm\", \"holdout\": 8, "
               "\"lm\": {\"mode\": \"joint\"}}\n}\n";
    }
    auto run = [&](const std::string& args) {
        const std::string cmd = std::string("\"") + exe + "\" " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    const std::string sim_cmd = "simulate --config \"" + cfg_path.string() + "\"";
    const std::string cal_cmd = "calibrate --config \"" + cfg_path.string() + "\" --samples \"" +
                                data.string() + "\" --out \"" + (root / "cal").string() + "\"";
    bool ok = run(sim_cmd) == 0;
    const std::string csv1 = slurp(data / "plane_01.csv");
    const std::string truth1 = slurp(data / "truth.json");
    ok = ok && run(cal_cmd) == 0;
    const std::string rep1 = slurp(root / "cal" / "report_sckf_lm.json");
    const std::string curve1 = slurp(root / "cal" / "curve_sckf_lm.csv");

    fs::remove_all(data);
    fs::remove_all(root / "cal");
    ok = ok && run(sim_cmd) == 0 && run(cal_cmd) == 0;
    const bool identical = ok && slurp(data / "plane_01.csv") == csv1 &&
                           slurp(data / "truth.json") == truth1 &&
                           slurp(root / "cal" / "report_sckf_lm.json") == rep1 &&
                           slurp(root / "cal" / "curve_sckf_lm.csv") == curve1 &&
                           !csv1.empty() && !rep1.empty();
    report(9, identical,
           "simulate and calibrate reruns byte-identical (csv %zu B, report %zu B): %s",
           csv1.size(), rep1.size(), identical ? "ok" : "MISMATCH");
}

void criterion_10_observability() {
    const SimScenario sc = scenarios::single_plane_scenario(7);
    const SimData data = generate(sc);
    const auto groups = scenarios::sample_groups(data);
    const CalibrationConfig cfg = scenarios::single_plane_config(7).calibration;
    const CalibrationReport rep = calibrate(groups, sc.nominal, Method::SckfLm, cfg, 7);

    // Rebuild the training identification matrix and rank it on the oracle.
    const SplitIndices split = split_samples(groups, cfg.holdout, 7);
    const auto folded = fold_groups(groups, sc.nominal);
    std::vector<std::vector<LinearSample>> train;
    for (size_t k = 0; k < folded.size(); ++k) {
        std::vector<LinearSample> g;
        for (int i : split.train[k]) g.push_back(folded[k][i]);
        train.push_back(std::move(g));
    }
    const std::vector<Plane> planes =
        fit_group_planes(train, Eigen::Matrix<double, 24, 1>::Zero());
    const int oracle_rank = oracles::svd_rank(identification_rows(train, planes), cfg.rank_tol);

    const double reduction = 100.0 * (1.0 - rep.val_after.rmse / rep.val_before.rmse);
    report(10,
           rep.identification_rank == oracle_rank && rep.identification_rank < 24 &&
               reduction >= 50.0,
           "single plane: reported rank %d == oracle %d, < 24; val RMSE %.6f -> %.6f mm, "
           "reduction %.1f%% (need >= 50%%)",
           rep.identification_rank, oracle_rank, rep.val_before.rmse, rep.val_after.rmse,
           reduction);
}

}  // namespace

int main() {
    criterion_1_accuracy();
    criterion_2_ordering();
    criterion_3_exact_recovery();
    criterion_4_sqrt_equivalence();
    criterion_5_linear_gaussian();
    criterion_6_jacobians();
    criterion_7_monotone_descent();
    criterion_8_metrics();
    criterion_9_determinism();
    criterion_10_observability();
    std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
