#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cgtex/signal.hpp"
#include "cgtex/texture.hpp"

namespace cgtex {

/// Posterior expectations of the texture, one entry per segment.
struct PosteriorMoments {
    Eigen::VectorXd e_z;      // <z_k>
    Eigen::VectorXd e_inv_z;  // <1/z_k>, the eta_k weights
    Eigen::VectorXd e_ln_z;   // <ln z_k>
};

struct TraceEntry {
    int iteration;
    double phi;             // sum of absolute parameter changes
    double log_likelihood;  // observed-data log-likelihood after the M-step
};

/// Result of an EM fit.
struct CgFit {
    Family family;
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    TextureParams texture;
    PosteriorMoments posterior;  // at the returned parameters
    std::vector<TraceEntry> trace;
    int iterations = 0;
    bool converged = false;
    double final_phi = 0.0;
    double final_log_likelihood = 0.0;
    int segment_count = 0;
    int samples_per_segment = 0;
    std::vector<std::string> warnings;
};

struct FitOptions {
    double phi_o = 1e-5;
    int max_iter = 1000;
    /// Testing/calibration hook: pin the cgg shape parameter instead of
    /// updating it (cgg with alpha = 1 then walks the cge trajectory).
    std::optional<double> fixed_gamma_alpha;
};

/// E-step for the exponential texture. With varsigma = -Nd/2 + 1 and Bessel
/// argument a_k = 2 sqrt(t1_k / lambda), the posterior of z_k is generalized
/// inverse Gaussian and the moments are Bessel ratios, all taken in log
/// space. Segments with t1 below 1e-12 * median(t1) are floored there and
/// counted in floored_segments.
PosteriorMoments e_step_cge(const SegmentStat& stats, double lambda, int samples_per_segment,
                            int channels, long* floored_segments = nullptr);

/// E-step for the gamma texture: the cge formulas with 1/lambda -> beta and
/// order nu = -Nd/2 + alpha.
PosteriorMoments e_step_cgg(const SegmentStat& stats, double alpha, double beta,
                            int samples_per_segment, int channels,
                            long* floored_segments = nullptr);

/// E-step for the inverse-gamma texture; the posterior is inverse-gamma with
/// alpha* = Nd/2 + alpha and beta*_k = beta + t1_k, so moments are closed
/// form.
PosteriorMoments e_step_cgig(const SegmentStat& stats, double alpha, double beta,
                             int samples_per_segment, int channels);

/// Shared location/scatter update: mu is the eta-weighted mean of segment
/// means; sigma the eta-weighted outer-product average, symmetrized, with a
/// ridge repair when an eigenvalue falls below 1e-10 * tr/d.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> m_step_common(const SegmentedSignal& sig,
                                                          const PosteriorMoments& moments,
                                                          std::vector<std::string>* warnings = nullptr);

/// Exponential-texture update: the mean of <z_k>.
double m_step_lambda(const PosteriorMoments& moments);

/// Solves the shape-parameter likelihood equation
///   K psi(alpha) - K ln(beta(alpha)) -/+ sum<ln z> = 0
/// after substituting the companion beta estimate (beta = K alpha / sum<z>
/// for gamma, K alpha / sum<1/z> for inverse-gamma), which collapses both
/// families to psi(alpha) - ln(alpha) = -D. Newton iteration with a bisection
/// fallback on [1e-3, 1e3]; the result is clamped to [1e-6, 1e6].
double solve_alpha_newton(double sum_ln_z, long segment_count, double companion_moment_sum,
                          Family family);

/// Full EM fit (E-step + M-step alternation, convergence on the summed
/// absolute parameter change phi <= phi_o, observed log-likelihood traced
/// every iteration).
CgFit fit(const SegmentedSignal& sig, Family family, const std::optional<CgFit>& init = {},
          const FitOptions& opts = {});

/// (K, N) selection by KLD grid search.
struct GridSearchResult {
    int best_k = 0;
    int best_n = 0;
    std::vector<int> k_candidates;
    std::vector<int> n_candidates;
    Eigen::MatrixXd kld_table;  // |K| x |N|, NaN where K*N > T
};

GridSearchResult grid_search_kn(const MultichannelRecord& record, Family family,
                                const std::vector<int>& k_candidates,
                                const std::vector<int>& n_candidates, int bins = 100,
                                const FitOptions& opts = {});

}  // namespace cgtex
