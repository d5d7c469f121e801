#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "helmlab/layer_ops.hpp"

namespace helmlab {

struct Extremes {
    double sigma_max, sigma_min;
};

/// Singular values of a square complex matrix, descending (LAPACK divide and conquer).
std::vector<double> singular_values(Eigen::MatrixXcd m);

/// Largest and smallest singular values; the operator must be L2-scaled unless custom.
/// Throws NumericalFailure when sigma_min < 1e3 eps sigma_max.
Extremes operator_extremes(const DiscreteOperator& op);

std::vector<double> quantized_ks(double a, int m_min, int m_max);
std::vector<double> log_spaced(double kmin, double kmax, int count);

struct SweepRecord {
    double k = 0.0, eta = 0.0;
    int n_nodes = 0;
    double sigma_max = 0.0, sigma_min = 0.0, cond = 0.0;
    std::optional<double> norm_S, norm_Dp;
    // Quasimode columns, filled by the quasimode module when applicable.
    std::optional<double> phi_norm, residual, lower_bound, coercivity_probe;
    double seconds = 0.0;
};

struct Fit {
    double slope = 0.0, intercept = 0.0, half_width = 0.0;
    int points = 0;
};

struct SweepResult {
    std::string geometry;
    std::string label;       // trapping class
    double eta_coefficient = 1.0;
    std::vector<SweepRecord> records;
};

struct SweepOptions {
    double eta_coefficient = 1.0;
    double ppw = 30.0;
    int corner_depth = 10;
    int node_cap = kDefaultNodeCap;
    bool kernel_norms = true;
    /// Called after each record; may attach extra columns using the assembled operator.
    std::function<void(SweepRecord&, const DiscreteOperator& ap)> on_record;
};

/// One record per k; a failure aborts the sweep and rethrows with the partial result kept in `partial`.
SweepResult k_sweep(std::shared_ptr<const Boundary> b, const std::vector<double>& ks, const SweepOptions& opt,
                    SweepResult* partial = nullptr);

/// Least squares on (log k, log v); half_width = 2 standard errors of the slope.
Fit fit_growth(const std::vector<double>& ks, const std::vector<double>& values);

/// Restrict to k >= kmin before fitting.
Fit fit_growth_above(const std::vector<double>& ks, const std::vector<double>& values, double kmin = 10.0);

struct Prediction {
    std::string quantity;
    Fit fit;
    std::optional<double> lo, hi, center;
    std::string verdict;  // PASS, FAIL, INCONCLUSIVE or NO_PREDICTION
};

struct GeometryReport {
    std::string geometry, label;
    std::vector<Prediction> rows;
};

std::vector<GeometryReport> summarize_vs_table1(const std::vector<SweepResult>& results);

std::string sweep_csv(const SweepResult& r);
std::string format_number(double v);

}  // namespace helmlab
