#include "plancal/sim.hpp"

#include <cmath>
#include <string>

#include "plancal/common.hpp"

namespace plancal {

namespace {

double halton(int i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

void plane_basis(const Eigen::Vector3d& beta, Eigen::Vector3d& u, Eigen::Vector3d& v) {
    const Eigen::Vector3d a =
        std::abs(beta.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    u = beta.cross(a).normalized();
    v = beta.cross(u);
}

// 3x6 position sensitivity to the commanded joints, central differences.
Eigen::Matrix<double, 3, 6> joint_jacobian(const DhTable& table, const Joints& q) {
    Eigen::Matrix<double, 3, 6> J;
    const double h = 1e-6;
    for (int i = 0; i < 6; ++i) {
        Joints qp = q, qm = q;
        qp[i] += h;
        qm[i] -= h;
        J.col(i) = (tool_position(table, qp) - tool_position(table, qm)) / (2.0 * h);
    }
    return J;
}

// Damped least-squares position solve under the given model.
bool solve_position(const DhTable& table, const Eigen::Vector3d& target, const Joints& q0,
                    Joints& q_out) {
    const double tol = 1e-9;
    Joints q = q0;
    for (int it = 0; it < 200; ++it) {
        const Eigen::Vector3d e = target - tool_position(table, q);
        if (e.norm() < tol) {
            q_out = q;
            return true;
        }
        const Eigen::Matrix<double, 3, 6> J = joint_jacobian(table, q);
        const Eigen::Matrix3d A = J * J.transpose() + Eigen::Matrix3d::Identity();
        Joints dq = J.transpose() * A.ldlt().solve(e);
        const double n = dq.norm();
        if (n > 0.5) dq *= 0.5 / n;
        q += dq;
    }
    q_out = q;
    return (target - tool_position(table, q)).norm() < tol;
}

}  // namespace

SimData generate(const SimScenario& scenario) {
    if (scenario.placements.empty()) throw ConfigError("generate: no plane placements");
    if (scenario.noise_sigma < 0.0) throw ConfigError("generate: noise_sigma must be >= 0");
    for (const auto& pl : scenario.placements) {
        if (pl.n_samples < 1) throw ConfigError("generate: placement needs n_samples >= 1");
    }

    const DhTable t_true = apply_delta(scenario.nominal, scenario.truth_delta);
    Rng rng(scenario.seed);
    SimData out;
    out.truth = scenario.truth_delta;

    int halton_index = 0;
    for (const auto& placement : scenario.placements) {
        PlaneGroup group;
        group.plane_true = placement.plane;
        const Eigen::Vector3d gamma = placement.plane.gamma;
        const Eigen::Vector3d beta = placement.plane.beta;
        Eigen::Vector3d u, v;
        plane_basis(beta, u, v);

        for (int j = 0; j < placement.n_samples; ++j) {
            ++halton_index;
            const double s = (halton(halton_index, 2) - 0.5) * scenario.coverage;
            const double t = (halton(halton_index, 3) - 0.5) * scenario.coverage;
            const Eigen::Vector3d target = gamma + s * u + t * v;

            Joints q;
            double denom = 0.0;
            bool found = false;
            for (int attempt = 0; attempt < 50; ++attempt) {
                const double amp = attempt < 40 ? scenario.posture_amp : 0.0;
                Joints q0 = placement.seed_q;
                for (int i = 0; i < 6; ++i) q0[i] += rng.uniform(-amp, amp);
                if (!solve_position(scenario.nominal, target, q0, q)) continue;
                denom = probe_axis(t_true, q).dot(beta);
                if (std::abs(denom) >= scenario.min_align) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw ConfigError("generate: no reachable posture for target (" +
                                  format_double(target.x()) + ", " + format_double(target.y()) +
                                  ", " + format_double(target.z()) + ")");
            }

            // along-axis gap to the plane, relative to the planned contact
            const Eigen::Vector3d p_true = tool_position(t_true, q);
            const Eigen::Vector3d p_nom = tool_position(scenario.nominal, q);
            const double denom_nom = probe_axis(scenario.nominal, q).dot(beta);
            double dial = -((p_true - gamma).dot(beta)) / denom -
                          (-((p_nom - gamma).dot(beta)) / denom_nom);
            if (scenario.noise_sigma > 0.0) dial += rng.normal(scenario.noise_sigma);
            if (!(std::abs(dial) <= scenario.dial_range)) {
                throw ConfigError("generate: dial reading exceeds range at sample " +
                                  std::to_string(halton_index));
            }
            group.samples.push_back(Sample{q, dial});
        }
        out.groups.push_back(std::move(group));
    }
    return out;
}

DhTable apply_dial_to_model(const Sample& sample, const DhTable& table) {
    DhTable out = table;
    out.links[5].d += sample.dial_mm;
    return out;
}

ScoreRecord score_against_truth(const ParamDelta& identified, const SimScenario& scenario,
                                const std::vector<PlaneGroup>& validation_samples) {
    if (validation_samples.empty()) throw ConfigError("score_against_truth: no samples");

    // fold under the nominal model
    std::vector<std::vector<LinearSample>> groups;
    for (const auto& g : validation_samples) {
        std::vector<LinearSample> lin;
        for (const auto& s : g.samples) {
            LinearSample ls;
            ls.p = tool_position(apply_dial_to_model(s, scenario.nominal), s.q);
            ls.J = position_jacobian(scenario.nominal, s.q);
            lin.push_back(ls);
        }
        groups.push_back(std::move(lin));
    }

    const auto metrics_at = [&groups](const Eigen::Matrix<double, 24, 1>& w, double& rmse,
                                      double& mx) {
        double acc = 0.0, m = 0.0;
        int n = 0;
        for (const auto& g : groups) {
            std::vector<Eigen::Vector3d> pts;
            for (const auto& s : g) pts.push_back(s.p + s.J * w);
            const Plane pl = fit_plane(pts);
            for (const auto& p : pts) {
                const double r = plane_residual(p, pl);
                acc += r * r;
                m = std::max(m, std::abs(r));
                ++n;
            }
        }
        rmse = std::sqrt(acc / n);
        mx = m;
    };

    ScoreRecord rec;
    metrics_at(Eigen::Matrix<double, 24, 1>::Zero(), rec.before_rmse, rec.before_max);
    metrics_at(identified.flatten(), rec.after_rmse, rec.after_max);

    // stacked identification rows at the nominal fold
    int total = 0;
    for (const auto& g : groups) total += static_cast<int>(g.size());
    Eigen::MatrixXd A(total, 24);
    int row = 0;
    for (const auto& g : groups) {
        std::vector<Eigen::Vector3d> pts;
        for (const auto& s : g) pts.push_back(s.p);
        const Plane pl = fit_plane(pts);
        for (const auto& s : g) A.row(row++) = pl.beta.transpose() * s.J;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv[i] >= 1e-6 * sv[0]) ++rank;
    }
    rec.rank = rank;
    const Eigen::MatrixXd Vr = svd.matrixV().leftCols(rank);
    rec.projector = Vr * Vr.transpose();
    rec.observable_error =
        (rec.projector * (identified.flatten() - scenario.truth_delta.flatten())).norm();
    return rec;
}

}  // namespace plancal
