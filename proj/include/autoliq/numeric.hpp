#pragma once

// Small numerical toolkit shared by the model headers: golden-section
// maximisation with doubling brackets, pairwise summation, log-log fits.

#include <autoliq/error.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace autoliq::numeric {

template <typename Real>
struct GoldenOptions {
    Real rel_tol = Real(1e-10);
    Real abs_tol = Real(0);
    int max_iter = 200;
};

template <typename Real>
struct GoldenResult {
    Real argmax;
    Real value;
    int iterations;
};

/**
 * Golden-section search for the maximum of a unimodal function on [lo, hi].
 *
 * Stops once the bracket width is below rel_tol * |x| + abs_tol, where x is
 * the current best point. Throws ConvergenceError if max_iter is exhausted.
 * The returned argmax is the best evaluated point (endpoints included), so
 * boundary maxima are reported exactly at the boundary.
 */
template <typename Real, typename F>
GoldenResult<Real> golden_section_maximize(F&& f, Real lo, Real hi,
                                           GoldenOptions<Real> opts = {}) {
    if (!(lo < hi)) throw DomainError("golden_section_maximize: empty interval");
    const Real inv_phi = (std::sqrt(Real(5)) - Real(1)) / Real(2);

    const Real f_lo = f(lo);
    const Real f_hi = f(hi);
    Real a = lo, b = hi;
    Real c = b - inv_phi * (b - a);
    Real d = a + inv_phi * (b - a);
    Real fc = f(c), fd = f(d);

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }

        const Real best_x = fc >= fd ? c : d;
        if (b - a <= opts.rel_tol * std::abs(best_x) + opts.abs_tol) {
            GoldenResult<Real> r{best_x, fc >= fd ? fc : fd, iter};
            // An endpoint may beat every interior probe (monotone objective).
            if (a == lo && f_lo >= r.value) r = {lo, f_lo, iter};
            if (b == hi && f_hi > r.value) r = {hi, f_hi, iter};
            return r;
        }
    }
    throw ConvergenceError("golden_section_maximize: no convergence after " +
                           std::to_string(opts.max_iter) + " iterations");
}

/// Expand [lo, hi] (hi doubling, lo halving) until slope(lo) > 0 > slope(hi).
/// For maximising functions of a strictly positive variable.
template <typename Real, typename Slope>
std::pair<Real, Real> bracket_maximum(Slope&& slope, Real lo, Real hi,
                                      int max_expansions = 200) {
    if (!(lo > 0 && lo < hi)) throw DomainError("bracket_maximum: need 0 < lo < hi");
    int n = 0;
    while (!(slope(hi) < 0)) {
        if (++n > max_expansions)
            throw BracketError("bracket_maximum: objective still increasing at " +
                               std::to_string(static_cast<double>(hi)));
        lo = hi;
        hi *= 2;
    }
    n = 0;
    while (!(slope(lo) > 0)) {
        if (++n > max_expansions)
            throw BracketError("bracket_maximum: objective still decreasing at " +
                               std::to_string(static_cast<double>(lo)));
        hi = lo;
        lo /= 2;
    }
    return {lo, hi};
}

/// Pairwise (cascade) summation; result is independent of evaluation order.
inline double pairwise_sum(std::span<const double> xs) {
    constexpr std::size_t leaf = 16;
    if (xs.size() <= leaf) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("mean: empty input");
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

/// Unbiased sample variance (two-pass).
inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw DomainError("sample_variance: need at least two values");
    const double m = mean(xs);
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
    return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

/// Ordinary least squares slope of y on x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("ols_slope: size mismatch");
    if (x.size() < 2) throw DomainError("ols_slope: need at least two points");
    const double mx = mean(x), my = mean(y);
    std::vector<double> sxy(x.size()), sxx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy[i] = (x[i] - mx) * (y[i] - my);
        sxx[i] = (x[i] - mx) * (x[i] - mx);
    }
    const double den = pairwise_sum(sxx);
    if (den == 0.0) throw DomainError("ols_slope: all x values equal");
    return pairwise_sum(sxy) / den;
}

/// n points geometrically spaced on [lo, hi], endpoints included.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0 && hi > lo) || n < 2) throw DomainError("log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

}  // namespace autoliq::numeric
