#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cgtex/em.hpp"
#include "cgtex/evaluation.hpp"
#include "cgtex/marginal.hpp"

namespace cgtex {

/// Fit artifact round trip (JSON). Serialization is lossless for doubles.
void save_fit_json(const CgFit& fit, const std::filesystem::path& path);
CgFit load_fit_json(const std::filesystem::path& path);

/// Per-model block of the evaluation report.
struct ModelEval {
    double kld = 0.0;
    double r2 = 0.0;
    double llv = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double mardia_kurtosis = 0.0;
    double lambda_summary = 0.0;  // texture mean
    double p_t = 0.0;
};

struct EvalReport {
    Eigen::VectorXd empdf_mean;
    Eigen::MatrixXd empdf_covariance;
    double empdf_mardia_kurtosis = 0.0;
    std::map<std::string, ModelEval> models;  // keyed by family tag
};

void save_eval_report_json(const EvalReport& report, const std::filesystem::path& path);

/// Density-grid CSV with columns x_center,y_center,empdf_mass,model_mass.
void save_grid_csv(const EmpiricalDensity& emp, const Eigen::MatrixXd& model_mass,
                   const std::filesystem::path& path);

/// Signal CSV in the ingestion format (header row of channel names, one
/// sample per row), plus the ground-truth sidecar for simulated data.
void save_signal_csv(const SegmentedSignal& sig, const std::vector<std::string>& channel_names,
                     const std::filesystem::path& path);
void save_truth_json(const TextureParams& texture, const Eigen::VectorXd& mu,
                     const Eigen::MatrixXd& sigma, int segment_count, int samples_per_segment,
                     std::uint64_t seed, const std::filesystem::path& path);

/// Long-format condition summary CSV (condition,label,lambda,p_t).
void save_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

/// Grid-search table CSV (K,N,kld; infeasible pairs omitted).
void save_gridsearch_csv(const GridSearchResult& result, const std::filesystem::path& path);

}  // namespace cgtex
