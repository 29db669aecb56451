#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cgtex/em.hpp"
#include "cgtex/signal.hpp"

namespace cgtex {

/// Normalized 2-D histogram (the empdf): mass sums to 1 over the grid.
struct EmpiricalDensity {
    std::vector<double> x_edges;
    std::vector<double> y_edges;
    Eigen::MatrixXd mass;  // (|x_edges|-1) x (|y_edges|-1)
    long total_count = 0;
};

/// Equal-width histogram over the per-channel data range (inflated by 0.1%
/// so the extremes land inside). d = 2 only. Emits a warning (not an error)
/// when the sample count is below bins^2 / 100.
EmpiricalDensity build_empdf(const SegmentedSignal& sig, int bins = 100,
                             std::vector<std::string>* warnings = nullptr);

/// Kullback-Leibler divergence sum_{q1 > 0} q1 ln(q1 / max(q2, 1e-12)), with
/// the model mass renormalized over the grid first.
double kld(const EmpiricalDensity& emp, const Eigen::MatrixXd& model_mass);

/// Coefficient of determination of the model mass against the empdf over all
/// bins. Throws on a degenerate flat histogram (SS_tot = 0).
double r_squared(const EmpiricalDensity& emp, const Eigen::MatrixXd& model_mass);

/// Mardia's multivariate kurtosis estimator
///   b_{2,d} = (1/T) sum_i [(y_i - ybar)' S^{-1} (y_i - ybar)]^2
/// (equals d(d+2) for Gaussian data).
double mardia_kurtosis(const Eigen::MatrixXd& samples);

/// Data-side vs model-side moment comparison for one fit. Model mean and
/// covariance are analytic (mu and E[z]*sigma); model kurtosis is estimated
/// from mc_samples seeded draws of the fitted compound model.
struct MomentReport {
    Eigen::VectorXd data_mean;
    Eigen::MatrixXd data_covariance;
    double data_mardia_kurtosis = 0.0;
    Eigen::VectorXd model_mean;
    Eigen::MatrixXd model_covariance;
    double model_mardia_kurtosis = 0.0;
};

MomentReport moment_report(const CgFit& fit, const SegmentedSignal& sig,
                           std::size_t mc_samples = 1000000, std::uint64_t seed = 0);

/// Per-condition-group averages of the texture mean (the lambda-like summary)
/// and P_T = sqrt(sum of the diagonal of E[z]*sigma).
struct SummaryRow {
    std::string condition;
    std::string label;  // family tag of the grouped fits
    double lambda = 0.0;
    double p_t = 0.0;
};

std::vector<SummaryRow> lambda_and_pt_summary(
    const std::vector<std::pair<std::string, CgFit>>& fits);

/// P_T for a single fit.
double total_power(const CgFit& fit);

}  // namespace cgtex
