#pragma once

namespace cgtex::sf {

/// Natural log of the modified Bessel function of the second kind K_nu(x).
///
/// Evaluated fully in log space so that neither overflow nor underflow occurs
/// for x up to ~1e6 and |nu| up to ~1e4. Small-x / fractional-order base values
/// come from Temme's series (x <= 2) or the Thompson-Barnett continued
/// fraction (x > 2); integer steps of the order are handled by the scaled
/// three-term recurrence. Symmetric in the order: K_{-nu} = K_{nu}.
///
/// Throws std::domain_error for x <= 0 or non-finite inputs.
double log_bessel_k(double order, double x);

/// ln K_{nu+shift}(x) - ln K_{nu}(x), without forming either value in linear
/// space.
double log_bessel_k_ratio(double order, double x, int order_shift);

/// d/dnu ln K_nu(x), by central difference with step 1e-5*max(1,|nu|).
/// Exactly zero at nu = 0 (K is even in the order).
double dlog_bessel_k_dorder(double order, double x);

/// Digamma function psi(x) for x > 0. Absolute error below 1e-12.
double digamma(double x);

/// Trigamma function psi'(x) for x > 0 (used as the Newton derivative when
/// solving shape-parameter likelihood equations).
double trigamma(double x);

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

}  // namespace cgtex::sf
