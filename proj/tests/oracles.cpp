#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cgtex::oracle {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243104;
// Truncation point for max-subtracted integrands: exp(-60) ~ 9e-27, far below
// every tolerance used here, and it keeps the adaptive rule off the flat tail.
constexpr double kDrop = 60.0;

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    // Stop on the requested tolerance or once delta is indistinguishable from
    // rounding noise; halving tol below that level would recurse to the depth
    // cap on every path.
    const double noise = 5e-16 * (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, noise))
        return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double abs_tol) {
    if (!(hi > lo)) return 0.0;
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fb = f(hi), fm = f(m);
    const double whole = simpson(lo, hi, fa, fm, fb);
    return adaptive_step(f, lo, fa, hi, fb, m, fm, whole, abs_tol, 30);
}

double log_bessel_k_quadrature(double order, double x) {
    if (!(x > 0.0) || !std::isfinite(order))
        throw std::domain_error("log_bessel_k_quadrature: invalid arguments");
    const double nu = std::abs(order);

    // g(t) = -x cosh t + ln cosh(nu t), evaluated without overflow.
    const auto g = [&](double t) {
        const double u = std::abs(nu * t);
        const double log_cosh = u + std::log1p(std::exp(-2.0 * u)) - std::log(2.0);
        return -x * std::cosh(t) + log_cosh;
    };

    // Peak: g'(t) = -x sinh t + nu tanh(nu t); interior only when nu^2 > x.
    double t_peak = 0.0;
    if (nu * nu > x) {
        const auto gp = [&](double t) { return -x * std::sinh(t) + nu * std::tanh(nu * t); };
        double lo = 1e-12, hi = std::asinh(nu / x) + 1.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (gp(mid) > 0.0 ? lo : hi) = mid;
        }
        t_peak = 0.5 * (lo + hi);
    }
    const double g_max = g(t_peak);

    double t_hi = t_peak + 1.0;
    while (g(t_hi) > g_max - kDrop) t_hi += 1.0;

    const auto f = [&](double t) { return std::exp(g(t) - g_max); };
    const double rough = integrate(f, 0.0, t_peak, 1e-6) + integrate(f, t_peak, t_hi, 1e-6);
    const double tol = 1e-13 * rough;
    const double value =
        integrate(f, 0.0, t_peak, tol) + integrate(f, t_peak, t_hi, tol);
    return g_max + std::log(value);
}

namespace {

// Shared machinery: the kernel in u = log z is exp(w(u)), w = p u - a e^{-u} - b e^{u}.
struct LogKernel {
    double p, a, b;
    double u_peak, w_max, u_lo, u_hi;
};

LogKernel prepare_kernel(double p, double a, double b) {
    if (!(a > 0.0) || b < 0.0 || (b == 0.0 && p >= 0.0))
        throw std::domain_error("gig quadrature: non-integrable kernel");
    LogKernel k{p, a, b, 0.0, 0.0, 0.0, 0.0};
    // stationary point of w: b v^2 - p v - a = 0 in v = e^u
    const double v = (b > 0.0) ? (p + std::sqrt(p * p + 4.0 * a * b)) / (2.0 * b) : a / (-p);
    k.u_peak = std::log(v);
    const auto w = [&](double u) { return p * u - a * std::exp(-u) - b * std::exp(u); };
    k.w_max = w(k.u_peak);
    double step = 1.0;
    k.u_lo = k.u_peak - step;
    while (w(k.u_lo) > k.w_max - kDrop) {
        step *= 2.0;
        k.u_lo = k.u_peak - step;
    }
    step = 1.0;
    k.u_hi = k.u_peak + step;
    while (w(k.u_hi) > k.w_max - kDrop) {
        step *= 2.0;
        k.u_hi = k.u_peak + step;
    }
    return k;
}

double kernel_integral(const LogKernel& k, const std::function<double(double)>& weight,
                       double rel_tol) {
    const auto f = [&](double u) {
        const double w = k.p * u - k.a * std::exp(-u) - k.b * std::exp(u);
        return weight(u) * std::exp(w - k.w_max);
    };
    const double rough = integrate(f, k.u_lo, k.u_peak, 1e-6) +
                         integrate(f, k.u_peak, k.u_hi, 1e-6);
    const double tol = rel_tol * std::max(std::abs(rough), 1e-8);
    return integrate(f, k.u_lo, k.u_peak, tol) + integrate(f, k.u_peak, k.u_hi, tol);
}

}  // namespace

double gig_log_normalizer_quadrature(double p, double a, double b) {
    const LogKernel k = prepare_kernel(p, a, b);
    const double value = kernel_integral(k, [](double) { return 1.0; }, 1e-13);
    return k.w_max + std::log(value);
}

GigMoments gig_moments_quadrature(double p, double a, double b) {
    const LogKernel k = prepare_kernel(p, a, b);
    const double norm = kernel_integral(k, [](double) { return 1.0; }, 1e-12);
    const double zi = kernel_integral(k, [](double u) { return std::exp(u); }, 1e-12);
    const double inv = kernel_integral(k, [](double u) { return std::exp(-u); }, 1e-12);
    const double lnz = kernel_integral(k, [](double u) { return u; }, 1e-12);
    return {zi / norm, inv / norm, lnz / norm};
}

double digamma_series(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma_series: requires x > 0");
    constexpr long kTerms = 20000;
    // Kahan summation from the small terms up.
    double sum = 0.0, carry = 0.0;
    for (long k = kTerms - 1; k >= 0; --k) {
        const double term = 1.0 / (k + 1.0) - 1.0 / (k + x);
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    // Euler-Maclaurin tail for sum_{k >= K} f(k).
    const double K = static_cast<double>(kTerms);
    const auto f = [&](double k) { return 1.0 / (k + 1.0) - 1.0 / (k + x); };
    const auto fp = [&](double k) {
        return -1.0 / ((k + 1.0) * (k + 1.0)) + 1.0 / ((k + x) * (k + x));
    };
    const auto fppp = [&](double k) {
        const double a = k + 1.0, b = k + x;
        return -6.0 / (a * a * a * a) + 6.0 / (b * b * b * b);
    };
    const double tail = std::log((K + x) / (K + 1.0)) + 0.5 * f(K) - fp(K) / 12.0 +
                        fppp(K) / 720.0;
    return -kEulerGamma + sum + tail;
}

}  // namespace cgtex::oracle
