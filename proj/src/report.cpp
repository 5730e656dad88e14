#include "plancal/report.hpp"

#include <cstdio>

namespace plancal {

namespace {

using json = nlohmann::ordered_json;

json metrics_to_json(const MetricSet& m) {
    return {{"rmse_mm", m.rmse}, {"std_mm", m.std_dev}, {"max_mm", m.max}, {"n", m.n}};
}

json alt_metrics_to_json(const AltMetrics& a) {
    return {{"mean_abs_mm", a.mean_abs}, {"abs_sum_over_sqrt_n_mm", a.abs_sum_over_sqrt_n}};
}

json planes_to_json(const std::vector<Plane>& planes) {
    json out = json::array();
    for (const auto& pl : planes) {
        out.push_back({{"gamma_mm", {pl.gamma[0], pl.gamma[1], pl.gamma[2]}},
                       {"beta", {pl.beta[0], pl.beta[1], pl.beta[2]}}});
    }
    return out;
}

}  // namespace

json param_delta_to_json(const ParamDelta& delta) {
    json da = json::array(), aa = json::array(), dd = json::array(), dt = json::array();
    for (int i = 0; i < 6; ++i) {
        da.push_back(rad2deg(delta.dalpha[i]));
        aa.push_back(delta.da[i]);
        dd.push_back(delta.dd[i]);
        dt.push_back(rad2deg(delta.dtheta[i]));
    }
    return {{"dalpha_deg", da}, {"da_mm", aa}, {"dd_mm", dd}, {"dtheta_deg", dt}};
}

json dh_table_to_json(const DhTable& table) {
    json rows = json::array();
    for (const auto& row : table.to_degrees()) {
        rows.push_back({{"alpha_deg", row.alpha_deg},
                        {"a_mm", row.a_mm},
                        {"d_mm", row.d_mm},
                        {"theta_offset_deg", row.theta_offset_deg}});
    }
    return rows;
}

json report_to_json(const CalibrationReport& report, const json& config_echo) {
    json j;
    j["method"] = report.method;
    j["seed"] = report.seed;
    j["converged"] = report.converged;
    j["iterations"] = report.iterations;
    j["accepted_steps"] = report.accepted;
    j["n_train"] = report.n_train;
    j["n_val"] = report.n_val;
    j["identified"] = param_delta_to_json(report.identified);
    j["calibrated_dh"] = dh_table_to_json(report.calibrated);
    j["plane_estimates"] = planes_to_json(report.plane_estimates);
    j["metrics"] = {{"train_before", metrics_to_json(report.train_before)},
                    {"train_after", metrics_to_json(report.train_after)},
                    {"val_before", metrics_to_json(report.val_before)},
                    {"val_after", metrics_to_json(report.val_after)},
                    {"val_before_alt", alt_metrics_to_json(report.val_before_alt)},
                    {"val_after_alt", alt_metrics_to_json(report.val_after_alt)}};
    j["residuals"] = {{"train_before", report.residuals_train_before},
                      {"train_after", report.residuals_train_after},
                      {"val_before", report.residuals_val_before},
                      {"val_after", report.residuals_val_after}};
    j["objective_trace_mm2"] = report.objective_trace;
    j["identification"] = {{"rank", report.identification_rank},
                           {"singular_values", report.identification_singular_values}};
    j["config"] = config_echo;
    return j;
}

json comparison_to_json(const CompareResult& result, const json& config_echo) {
    json j;
    json rows = json::array();
    bool have_before = false;
    for (size_t i = 0; i < result.reports.size(); ++i) {
        const CalibrationReport& rep = result.reports[i];
        const bool ok = result.errors[i].empty();
        if (ok && !have_before) {
            j["seed"] = rep.seed;
            j["before"] = {{"val", metrics_to_json(rep.val_before)},
                           {"train", metrics_to_json(rep.train_before)}};
            have_before = true;
        }
        json row;
        row["method"] = rep.method;
        row["ok"] = ok;
        if (ok) {
            row["val_after"] = metrics_to_json(rep.val_after);
            row["train_after"] = metrics_to_json(rep.train_after);
            row["iterations"] = rep.iterations;
            row["accepted_steps"] = rep.accepted;
            row["converged"] = rep.converged;
        } else {
            row["error"] = result.errors[i];
        }
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["config"] = config_echo;
    return j;
}

std::string comparison_table_text(const CompareResult& result) {
    char buf[160];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-10s %12s %12s %12s %8s %10s\n", "method", "val_rmse_mm",
                  "val_max_mm", "val_std_mm", "iters", "converged");
    out += buf;
    for (size_t i = 0; i < result.reports.size(); ++i) {
        if (result.errors[i].empty()) {
            const MetricSet& b = result.reports[i].val_before;
            std::snprintf(buf, sizeof(buf), "%-10s %12.6f %12.6f %12.6f %8s %10s\n", "before",
                          b.rmse, b.max, b.std_dev, "-", "-");
            out += buf;
            break;
        }
    }
    for (size_t i = 0; i < result.reports.size(); ++i) {
        const CalibrationReport& rep = result.reports[i];
        if (result.errors[i].empty()) {
            const MetricSet& a = rep.val_after;
            std::snprintf(buf, sizeof(buf), "%-10s %12.6f %12.6f %12.6f %8d %10s\n",
                          rep.method.c_str(), a.rmse, a.max, a.std_dev, rep.iterations,
                          rep.converged ? "yes" : "no");
        } else {
            std::snprintf(buf, sizeof(buf), "%-10s failed: %s\n", rep.method.c_str(),
                          result.errors[i].c_str());
        }
        out += buf;
    }
    return out;
}

json truth_to_json(const SimData& data, const json& config_echo) {
    json j;
    j["truth"] = param_delta_to_json(data.truth);
    json planes = json::array();
    for (const auto& g : data.groups) {
        planes.push_back({{"gamma_mm", {g.plane_true.gamma[0], g.plane_true.gamma[1],
                                        g.plane_true.gamma[2]}},
                          {"beta", {g.plane_true.beta[0], g.plane_true.beta[1],
                                    g.plane_true.beta[2]}},
                          {"samples", static_cast<int>(g.samples.size())}});
    }
    j["planes_true"] = planes;
    j["config"] = config_echo;
    return j;
}

}  // namespace plancal
