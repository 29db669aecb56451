#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cgtex/signal.hpp"
#include "cgtex/texture.hpp"

namespace cgtex {

/// Closed-form marginal density of a fitted compound model, obtained by
/// integrating the texture out of the conditional Gaussian:
///   cge  -> Bessel-type density of order d/2 - 1
///   cgg  -> K-distribution, Bessel order alpha - d/2
///   cgig -> multivariate Student-t with 2*alpha degrees of freedom
/// All evaluation is in log space.
class MarginalModel {
public:
    MarginalModel(Eigen::VectorXd mu, Eigen::MatrixXd sigma, TextureParams texture);

    int dimension() const { return static_cast<int>(mu_.size()); }
    Family family() const { return family_; }
    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::MatrixXd& sigma() const { return sigma_; }
    const TextureParams& texture() const { return texture_; }

    /// ln p(y). The cge/cgg densities are integrably singular at y = mu when
    /// the Bessel order is <= 0; the quadratic form is floored at 1e-300 so
    /// point evaluation stays finite.
    double log_pdf(const Eigen::VectorXd& y) const;

    /// Sum of log_pdf over every sample of the signal: the per-sample
    /// comparison score (treats samples as independent draws of the
    /// marginal).
    double log_likelihood(const SegmentedSignal& sig) const;

    /// Observed-data log-likelihood of the segmented compound model, i.e.
    /// sum_k ln int [prod_n p(y_{n,k}|z)] p(z) dz with the texture shared
    /// within each segment. This is the quantity EM ascends. Closed form per
    /// family via the Bessel-integral identity. Near-constant segments are
    /// floored like the E-step.
    double segment_log_likelihood(const SegmentedSignal& sig) const;

    /// Per-bin probability mass (density at bin center x bin area) on a d = 2
    /// grid. The bin containing mu is refined by 5x5 sub-center averaging for
    /// the singular families. Reported unnormalized.
    Eigen::MatrixXd pdf_grid(const std::vector<double>& x_edges,
                             const std::vector<double>& y_edges) const;

    /// Mahalanobis quadratic form (y-mu)' sigma^{-1} (y-mu).
    double quad_form(const Eigen::VectorXd& y) const;

private:
    double log_pdf_from_quad(double q) const;

    Family family_;
    Eigen::VectorXd mu_;
    Eigen::MatrixXd sigma_;
    TextureParams texture_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double log_det_sigma_;
};

}  // namespace cgtex
