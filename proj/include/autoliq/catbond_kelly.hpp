#pragma once

// Discrete Kelly sizing for zero-recovery bonds (catastrophe / de-pegging
// cover): a bond pays r per unit with probability p = 1 - q and loses the
// stake with probability q.

#include <autoliq/csv.hpp>
#include <autoliq/error.hpp>
#include <autoliq/numeric.hpp>

#include <cmath>
#include <ostream>
#include <span>

namespace autoliq {

struct BondSpec {
    double default_prob_q = 0.0;
    double return_r = 1.0;

    void validate() const {
        detail::require(default_prob_q >= 0.0 && default_prob_q < 1.0,
                        "BondSpec: default_prob_q must lie in [0, 1)");
        detail::require(return_r > 0.0 && std::isfinite(return_r), "BondSpec: return_r must be > 0");
    }
};

enum class AllocationMethod { Analytic, Series, BruteForce };

inline const char* to_string(AllocationMethod m) {
    switch (m) {
        case AllocationMethod::Analytic: return "analytic";
        case AllocationMethod::Series: return "series";
        case AllocationMethod::BruteForce: return "brute-force";
    }
    return "?";
}

struct AllocationResult {
    double fraction;
    double growth;
    AllocationMethod method;
    bool clamped = false;  ///< fraction was pulled back into the admissible range
};

/// q log(1 - f) + p log(1 + f r).
template <typename Real = double>
Real single_bond_growth(Real f, const BondSpec& bond) {
    bond.validate();
    if (!(f >= 0 && f < 1)) throw DomainError("single_bond_growth: f must lie in [0, 1)");
    using std::log1p;
    const Real q = bond.default_prob_q;
    const Real p = Real(1) - q;
    const Real lose = q == 0 ? Real(0) : q * log1p(-f);
    return lose + p * log1p(f * Real(bond.return_r));
}

/// d/df of single_bond_growth.
inline double single_bond_growth_slope(double f, const BondSpec& bond) {
    const double q = bond.default_prob_q, r = bond.return_r;
    return -q / (1.0 - f) + (1.0 - q) * r / (1.0 + f * r);
}

/// f = 1 - q - q/r, clamped at 0 for a non-positive edge.
inline AllocationResult single_bond_fraction(const BondSpec& bond) {
    bond.validate();
    const double q = bond.default_prob_q, r = bond.return_r;
    const double f = 1.0 - q * ((r + 1.0) / r);
    const bool clamped = f < 0.0;
    const double frac = clamped ? 0.0 : f;
    return {frac, single_bond_growth(frac, bond), AllocationMethod::Analytic, clamped};
}

/// Golden-section argmax of single_bond_growth on [0, 1 - 1e-12].
inline AllocationResult single_bond_fraction_numeric(const BondSpec& bond) {
    bond.validate();
    using Real = long double;
    auto g = [&](Real f) { return single_bond_growth<Real>(f, bond); };
    numeric::GoldenOptions<Real> opts;
    opts.rel_tol = 0;
    opts.abs_tol = Real(1e-10);
    const auto best = numeric::golden_section_maximize<Real>(g, Real(0), Real(1) - Real(1e-12), opts);
    const double f = static_cast<double>(best.argmax);
    return {f, single_bond_growth(f, bond), AllocationMethod::BruteForce, false};
}

/// First-estimate fraction mean / variance of the per-unit payoff
/// (+r w.p. p, -1 w.p. q). Close to the exact fraction only for small edges.
inline double mean_variance_fraction(const BondSpec& bond) {
    bond.validate();
    const double q = bond.default_prob_q, r = bond.return_r, p = 1.0 - q;
    const double mu = p * r - q;
    const double var = p * r * r + q - mu * mu;
    return mu / var;
}

struct IsoFractionShift {
    double exact;             ///< q delta / (r (1 + r + delta))
    double first_order;       ///< (delta / r) q / (1 + r)
    double geometric_series;  ///< (delta / r) sum_k (q / (1 + r))^k, k >= 1
};

/**
 * Change Delta in default probability that keeps the Kelly fraction fixed
 * when the return moves from r to r + delta_r. Solving
 * 1 - q - q/r = 1 - (q + Delta) - (q + Delta)/(r + delta_r) gives `exact`.
 * The two approximations are reported alongside it for comparison.
 */
inline IsoFractionShift iso_fraction_shift(const BondSpec& bond, double delta_r) {
    bond.validate();
    const double q = bond.default_prob_q, r = bond.return_r;
    detail::require(r + delta_r > 0.0, "iso_fraction_shift: r + delta_r must be > 0");
    const double ratio = q / (1.0 + r);
    return {q * delta_r / (r * (1.0 + r + delta_r)), delta_r / r * ratio,
            delta_r / r * ratio / (1.0 - ratio)};
}

/// Two independent bonds with equal q and r, fraction f in each:
/// p^2 log(1 + 2fr) + 2pq log(1 + f(r - 1)) + q^2 log(1 - 2f).
template <typename Real = double>
Real two_bond_growth(Real f, const BondSpec& bond) {
    bond.validate();
    if (!(f >= 0 && f < Real(0.5))) throw DomainError("two_bond_growth: f must lie in [0, 0.5)");
    using std::log1p;
    const Real q = bond.default_prob_q, r = bond.return_r;
    const Real p = Real(1) - q;
    const Real one_default = f * (r - Real(1));
    if (!(one_default > Real(-1)))
        throw DomainError("two_bond_growth: single-default outcome 1 + f(r - 1) must be > 0");
    Real g = p * p * log1p(Real(2) * f * r);
    if (q != 0) g += Real(2) * p * q * log1p(one_default) + q * q * log1p(Real(-2) * f);
    return g;
}

/// 1/2 - q/r - q^2/(2r^2) - (q/3r)(q/r)^2, clamped into [0, 0.5).
inline AllocationResult two_bond_fraction_series(const BondSpec& bond) {
    bond.validate();
    const double x = bond.default_prob_q / bond.return_r;
    double f = 0.5 - x - x * x / 2.0 - x / 3.0 * x * x;
    bool clamped = false;
    if (f < 0.0) {
        f = 0.0;
        clamped = true;
    } else if (f >= 0.5) {
        f = std::nextafter(0.5, 0.0);
        clamped = true;
    }
    double growth;
    try {
        growth = two_bond_growth(f, bond);
    } catch (const DomainError&) {
        growth = -HUGE_VAL;
    }
    return {f, growth, AllocationMethod::Series, clamped};
}

/// Golden-section argmax of two_bond_growth on [0, 0.5 - 1e-12].
inline AllocationResult two_bond_fraction_numeric(const BondSpec& bond) {
    bond.validate();
    using Real = long double;
    const Real hi = Real(0.5) - Real(1e-12);
    auto g = [&](Real f) { return two_bond_growth<Real>(f, bond); };
    numeric::GoldenOptions<Real> opts;
    opts.rel_tol = 0;
    opts.abs_tol = Real(1e-10);
    const auto best = numeric::golden_section_maximize<Real>(g, Real(0), hi, opts);
    const double f = static_cast<double>(best.argmax);
    return {f, two_bond_growth(f, bond), AllocationMethod::BruteForce, false};
}

/// Return r that makes target_f the Kelly fraction: r = q / (1 - q - f).
inline double implied_return(double q, double target_f) {
    detail::require(q >= 0.0 && q < 1.0, "implied_return: q must lie in [0, 1)");
    detail::require(target_f >= 0.0, "implied_return: target_f must be >= 0");
    const double slack = 1.0 - q - target_f;
    if (!(slack > 0.0)) throw DomainError("implied_return: need target_f < 1 - q");
    return q / slack;
}

struct SweepRow {
    BondSpec bond;
    double f_analytic;
    double f_numeric;
    double f_series;
    double abs_err;  ///< |f_analytic - f_numeric|
};

inline SweepRow sweep_row(const BondSpec& bond) {
    const double a = single_bond_fraction(bond).fraction;
    const double n = single_bond_fraction_numeric(bond).fraction;
    return {bond, a, n, two_bond_fraction_series(bond).fraction, std::abs(a - n)};
}

/// CSV `q,r,f_analytic,f_numeric,f_series,abs_err`.
inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    using csv::format_real;
    os << "q,r,f_analytic,f_numeric,f_series,abs_err\n";
    for (const auto& row : rows)
        csv::write_row(os, {format_real(row.bond.default_prob_q), format_real(row.bond.return_r),
                            format_real(row.f_analytic), format_real(row.f_numeric),
                            format_real(row.f_series), format_real(row.abs_err)});
}

}  // namespace autoliq
