#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plancal/filters.hpp"
#include "plancal/lm.hpp"
#include "plancal/sim.hpp"

namespace plancal {

struct MetricSet {
    double rmse = 0.0;
    double std_dev = 0.0;  // population std of |r|
    double max = 0.0;
    int n = 0;
};

MetricSet compute_metrics(const std::vector<double>& residuals);

// Alternative absolute-error summaries kept alongside the standard metrics:
// mean of |r| and sum of |r| scaled by 1/sqrt(N).
struct AltMetrics {
    double mean_abs = 0.0;
    double abs_sum_over_sqrt_n = 0.0;
};

AltMetrics compute_alt_metrics(const std::vector<double>& residuals);

enum class Method { Ekf, Sckf, Lm, SckfLm };

Method method_from_string(const std::string& name);
std::string method_to_string(Method m);

struct FilterParams {
    double p0_angle = 1e-4;   // rad^2, initial variance of angle parameters
    double p0_length = 1e-2;  // mm^2, initial variance of length parameters
    double q = 1e-12;         // process-noise variance
    double r_sigma = 0.01;    // measurement noise std, mm
};

struct CalibrationConfig {
    int holdout = 35;
    double lambda0 = 1e-3;  // initial damping for the LM stage
    LmOptions lm;
    FilterParams filter;
    double rank_tol = 1e-6;  // relative singular-value cutoff for rank reports
};

struct SplitIndices {
    std::vector<std::vector<int>> train;  // per group
    std::vector<std::vector<int>> val;
};

// Holds out `holdout` of the concatenated samples, permutation seeded from
// the run seed; stable across methods so comparisons share the split.
SplitIndices split_samples(const std::vector<std::vector<Sample>>& groups, int holdout,
                           std::uint64_t seed);

struct CalibrationReport {
    std::string method;
    ParamDelta identified;
    DhTable calibrated;  // nominal with the identified delta applied
    std::vector<Plane> plane_estimates;
    MetricSet train_before, train_after, val_before, val_after;
    AltMetrics val_before_alt, val_after_alt;
    std::vector<double> residuals_train_before, residuals_train_after;
    std::vector<double> residuals_val_before, residuals_val_after;
    int iterations = 0;
    int accepted = 0;
    bool converged = true;
    std::vector<double> objective_trace;  // mm^2 per iteration (or filter step)
    int identification_rank = 0;
    std::vector<double> identification_singular_values;
    std::uint64_t seed = 0;
    int n_train = 0, n_val = 0;
};

CalibrationReport calibrate(const std::vector<std::vector<Sample>>& groups,
                            const DhTable& nominal, Method method,
                            const CalibrationConfig& config, std::uint64_t seed);

struct CompareResult {
    std::vector<CalibrationReport> reports;
    std::vector<std::string> errors;  // parallel to `methods`; empty on success
};

// Runs each method on the identical data and split; failures are isolated.
CompareResult compare(const std::vector<std::vector<Sample>>& groups, const DhTable& nominal,
                      const std::vector<Method>& methods, const CalibrationConfig& config,
                      std::uint64_t seed);

}  // namespace plancal
