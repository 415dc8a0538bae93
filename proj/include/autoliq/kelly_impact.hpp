#pragma once

// Growth-optimal market impact for a diversified liquidity provider.
//
// The LP maximises the quadratic (cubic-truncated) log-growth
//     g(Q) = Q dP / W - Q^2 sigma^2 / (2 W^2)
// under the capital constraint W = k sqrt(Q). For fractional noise the
// holding horizon is taken proportional to size, T = khat Q, and growth is
// optimised per unit time. Everything here is a closed form except
// optimal_size_numeric, which exists to check those closed forms.

#include <autoliq/csv.hpp>
#include <autoliq/error.hpp>
#include <autoliq/numeric.hpp>
#include <autoliq/stochastic_paths.hpp>

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace autoliq {

struct GrowthModel {
    double capital_scale_k = 1.0;     ///< W = k sqrt(Q)
    double time_per_size_khat = 1.0;  ///< T = khat Q
    double sigma = 1.0;
    double hurst = 0.5;

    void validate() const {
        detail::require(capital_scale_k > 0.0 && std::isfinite(capital_scale_k),
                        "GrowthModel: capital_scale_k must be > 0");
        detail::require(time_per_size_khat > 0.0 && std::isfinite(time_per_size_khat),
                        "GrowthModel: time_per_size_khat must be > 0");
        detail::require(sigma > 0.0 && std::isfinite(sigma), "GrowthModel: sigma must be > 0");
        detail::require(hurst > 0.0 && hurst < 1.0, "GrowthModel: hurst must lie in (0, 1)");
    }

    /// Exponent of the optimal impact curve, 2H - 1/2.
    double impact_exponent() const { return 2.0 * hurst - 0.5; }
};

struct ImpactPoint {
    double size_q;
    double delta_p;
};

inline double growth_rate(double q, double delta_p, double wealth, double sigma) {
    detail::require(wealth > 0.0, "growth_rate: wealth must be > 0");
    detail::require(sigma > 0.0, "growth_rate: sigma must be > 0");
    detail::require(q >= 0.0, "growth_rate: q must be >= 0");
    return q * delta_p / wealth - q * q * sigma * sigma / (2.0 * wealth * wealth);
}

/// Growth with W = k sqrt(Q) substituted: (dP/k) sqrt(Q) - sigma^2 Q / (2 k^2).
inline double growth_rate_constrained(double q, double delta_p, const GrowthModel& model) {
    model.validate();
    detail::require(q > 0.0, "growth_rate_constrained: q must be > 0");
    const double k = model.capital_scale_k;
    return delta_p / k * std::sqrt(q) - model.sigma * model.sigma * q / (2.0 * k * k);
}

/// dP = (sigma^2 / k) sqrt(Q).
inline double optimal_impact_sqrt(double q, const GrowthModel& model) {
    model.validate();
    detail::require(q > 0.0, "optimal_impact_sqrt: q must be > 0");
    return model.sigma * model.sigma / model.capital_scale_k * std::sqrt(q);
}

/// Growth per unit time with T = khat Q:
///     (dP/k) sqrt(Q) - (sigma^2 / 2k^2) khat^{2H-1} Q^{2H}.
template <typename Real = double>
Real growth_per_time_fou(Real q, Real delta_p, const GrowthModel& model) {
    model.validate();
    detail::require(q > 0, "growth_per_time_fou: q must be > 0");
    using std::pow;
    using std::sqrt;
    const Real k = model.capital_scale_k;
    const Real sigma = model.sigma;
    const Real h2 = Real(2) * Real(model.hurst);
    const Real penalty = sigma * sigma / (Real(2) * k * k) * pow(Real(model.time_per_size_khat), h2 - 1);
    return delta_p / k * sqrt(q) - penalty * pow(q, h2);
}

/// d/dQ of growth_per_time_fou.
template <typename Real = double>
Real growth_per_time_fou_slope(Real q, Real delta_p, const GrowthModel& model) {
    using std::pow;
    using std::sqrt;
    const Real k = model.capital_scale_k;
    const Real sigma = model.sigma;
    const Real h2 = Real(2) * Real(model.hurst);
    const Real penalty = sigma * sigma / (Real(2) * k * k) * pow(Real(model.time_per_size_khat), h2 - 1);
    return delta_p / (Real(2) * k * sqrt(q)) - h2 * penalty * pow(q, h2 - 1);
}

/// dP = 2H khat^{2H-1} (sigma^2 / k) Q^{2H - 1/2}. At H = 1/4 the curve is flat.
inline double optimal_impact_fou(double q, const GrowthModel& model) {
    model.validate();
    detail::require(q > 0.0, "optimal_impact_fou: q must be > 0");
    const double h = model.hurst;
    return 2.0 * h * std::pow(model.time_per_size_khat, 2.0 * h - 1.0) * model.sigma * model.sigma /
           model.capital_scale_k * std::pow(q, 2.0 * h - 0.5);
}

/**
 * Position size maximising growth_per_time_fou at a given impact.
 *
 * Brackets the maximum by doubling from [1, 2] until the slope changes
 * sign, then runs a golden-section search in extended precision to a
 * relative tolerance of 1e-10 on q. For H <= 1/4 the objective has no
 * interior maximum and BracketError is thrown.
 */
inline double optimal_size_numeric(double delta_p, const GrowthModel& model) {
    model.validate();
    detail::require(delta_p > 0.0, "optimal_size_numeric: delta_p must be > 0");
    using Real = long double;
    const Real dp = delta_p;
    auto slope = [&](Real q) { return growth_per_time_fou_slope<Real>(q, dp, model); };
    const auto [lo, hi] = numeric::bracket_maximum<Real>(slope, Real(1), Real(2));
    auto objective = [&](Real q) { return growth_per_time_fou<Real>(q, dp, model); };
    numeric::GoldenOptions<Real> opts;
    opts.rel_tol = Real(1e-10);
    opts.max_iter = 200;
    return static_cast<double>(numeric::golden_section_maximize<Real>(objective, lo, hi, opts).argmax);
}

/// OLS slope of log dP on log Q.
inline double impact_exponent(std::span<const ImpactPoint> points) {
    detail::require(points.size() >= 3, "impact_exponent: need at least 3 points");
    std::vector<double> lx, ly;
    lx.reserve(points.size());
    ly.reserve(points.size());
    for (const auto& p : points) {
        detail::require(p.size_q > 0.0 && p.delta_p > 0.0, "impact_exponent: points must be positive");
        lx.push_back(std::log(p.size_q));
        ly.push_back(std::log(p.delta_p));
    }
    return numeric::ols_slope(lx, ly);
}

inline std::vector<ImpactPoint> impact_curve(std::span<const double> sizes, const GrowthModel& model) {
    std::vector<ImpactPoint> pts;
    pts.reserve(sizes.size());
    for (double q : sizes) pts.push_back({q, optimal_impact_fou(q, model)});
    return pts;
}

/// CSV `q,delta_p,exponent_model`.
inline void write_impact_csv(std::ostream& os, std::span<const ImpactPoint> points, const GrowthModel& model) {
    os << "q,delta_p,exponent_model\n";
    const std::string expo = csv::format_real(model.impact_exponent());
    for (const auto& p : points)
        csv::write_row(os, {csv::format_real(p.size_q), csv::format_real(p.delta_p), expo});
}

/**
 * Impact from the leverage parametrisation: with P Q = f W and W = k sqrt(Q),
 * W = k^2 f / P and Q = k^2 f^2 / P^2, so the constrained leverage is
 * f = P sqrt(Q) / k. Growth g(f) = (dP/P) f - sigma^2 f^2 / (2 P^2) is
 * stationary at dP P = sigma^2 f, which fixes dP.
 */
inline double optimal_impact_leverage_form(double q, double price_level, const GrowthModel& model) {
    model.validate();
    detail::require(q > 0.0, "optimal_impact_leverage_form: q must be > 0");
    detail::require(price_level > 0.0, "optimal_impact_leverage_form: price_level must be > 0");
    detail::require(model.hurst == 0.5, "optimal_impact_leverage_form: requires hurst = 0.5");
    const double k = model.capital_scale_k;
    const double leverage = price_level * std::sqrt(q) / k;
    return model.sigma * model.sigma * leverage / price_level;
}

/// Growth of the leverage parametrisation, g(f) = (dP/P) f - sigma^2 f^2 / (2 P^2).
inline double leverage_growth(double f, double delta_p, double price_level, double sigma) {
    detail::require(price_level > 0.0, "leverage_growth: price_level must be > 0");
    return delta_p / price_level * f - sigma * sigma * f * f / (2.0 * price_level * price_level);
}

// -- single-asset OU strategy -------------------------------------------------

/// f = kappa (p - level) / sigma^2.
inline double kelly_fraction_ou(double p, const FouParams& params) {
    params.validate();
    detail::require(params.sigma > 0.0, "kelly_fraction_ou: sigma must be > 0");
    return params.kappa * (p - params.level) / (params.sigma * params.sigma);
}

/// Instantaneous growth f dP - f^2 sigma^2 / 2 at the Kelly fraction.
inline double instantaneous_growth_ou(double p, const FouParams& params) {
    const double f = kelly_fraction_ou(p, params);
    const double edge = params.kappa * (p - params.level);
    return f * edge - 0.5 * f * f * params.sigma * params.sigma;
}

/// W_t = W_0 exp((kappa / sigma^2)(P_t - P_0)); defined for level = 0.
inline double wealth_closed_form(double p_t, double p0, const FouParams& params, double w0) {
    params.validate();
    detail::require(params.level == 0.0, "wealth_closed_form: requires level = 0");
    detail::require(params.sigma > 0.0, "wealth_closed_form: sigma must be > 0");
    detail::require(w0 > 0.0, "wealth_closed_form: w0 must be > 0");
    return w0 * std::exp(params.kappa / (params.sigma * params.sigma) * (p_t - p0));
}

/// Self-financing wealth W_{i+1} = W_i + Q_i (P_{i+1} - P_i) with the
/// Kelly holding Q_i = W_i kappa (P_i - level) / (P_i sigma^2).
inline SamplePath simulate_self_financing(const SamplePath& path, const FouParams& params, double w0) {
    params.validate();
    detail::require(params.sigma > 0.0, "simulate_self_financing: sigma must be > 0");
    detail::require(w0 > 0.0, "simulate_self_financing: w0 must be > 0");
    detail::require(!path.values.empty() && path.values.size() == path.times.size(),
                    "simulate_self_financing: malformed path");
    for (std::size_t i = 0; i < path.values.size(); ++i)
        if (!(path.values[i] > 0.0))
            throw DomainError("simulate_self_financing: price not strictly positive at index " +
                              std::to_string(i));

    const double s2 = params.sigma * params.sigma;
    SamplePath w;
    w.times = path.times;
    w.seed = path.seed;
    w.meta = path.meta + ";wealth=self-financing";
    w.values.resize(path.values.size());
    w.values[0] = w0;
    for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
        const double p = path.values[i];
        const double holding = w.values[i] * params.kappa * (p - params.level) / (p * s2);
        w.values[i + 1] = w.values[i] + holding * (path.values[i + 1] - p);
    }
    return w;
}

}  // namespace autoliq
