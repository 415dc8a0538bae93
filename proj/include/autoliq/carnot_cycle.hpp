#pragma once

// Four-stage DEX cycle as a ledger over (pool, investor in pool, investor
// outside pool):
//   1. switch alpha of X out of the pool for beta of Y   (swap)
//   2. add M of X and N of Y at the pool ratio           (liquidity in)
//   3. switch delta of Y out of the pool for sigma of X  (swap)
//   4. remove G of X and H of Y                          (liquidity out)
// Tokens only move between pool and outside, so pool + outside equals the
// starting pool at every stage. Outside balances may go negative (short).

#include <autoliq/cpmm.hpp>
#include <autoliq/csv.hpp>
#include <autoliq/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>

namespace autoliq {

enum class CycleStage { Start, AfterStage1, AfterStage2, AfterStage3, AfterStage4 };

enum class Stage3Formula {
    ExactInvariant,  ///< delta keeps the post-stage-2 reserve product fixed
    Printed,         ///< delta = sigma (YX/(X-a)) (1 + M/(X-a)) / (X + M)
};

enum class RemovalMode {
    Proportional,  ///< (G, H) must match the pool ratio
    Closing,       ///< any (G, H); used with closure_parameters
};

inline const char* to_string(CycleStage s) {
    switch (s) {
        case CycleStage::Start: return "start";
        case CycleStage::AfterStage1: return "stage1";
        case CycleStage::AfterStage2: return "stage2";
        case CycleStage::AfterStage3: return "stage3";
        case CycleStage::AfterStage4: return "stage4";
    }
    return "?";
}

inline const char* to_string(Stage3Formula f) {
    return f == Stage3Formula::ExactInvariant ? "exact-invariant" : "printed";
}

struct TokenPair {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const TokenPair&, const TokenPair&) = default;
};

class CycleLedger {
public:
    static CycleLedger open(const PoolState& start) { return CycleLedger(start); }

    const PoolState& pool() const noexcept { return pool_; }
    const TokenPair& inside() const noexcept { return inside_; }
    const TokenPair& outside() const noexcept { return outside_; }
    const TokenPair& origin() const noexcept { return origin_; }
    CycleStage stage() const noexcept { return stage_; }

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double m() const noexcept { return m_; }
    double n() const noexcept { return n_; }
    double sigma_amt() const noexcept { return sigma_; }
    double delta() const noexcept { return delta_; }

    /// max |pool + outside - origin| over both tokens.
    double conservation_residual() const {
        return std::max(std::abs(pool_.reserve_x() + outside_.x - origin_.x),
                        std::abs(pool_.reserve_y() + outside_.y - origin_.y));
    }

private:
    explicit CycleLedger(const PoolState& start)
        : pool_(start), origin_{start.reserve_x(), start.reserve_y()} {}

    friend CycleLedger stage1_switch(const CycleLedger&, double);
    friend CycleLedger stage2_add(const CycleLedger&, double);
    friend CycleLedger stage3_switch(const CycleLedger&, double, Stage3Formula);
    friend CycleLedger stage4_remove(const CycleLedger&, double, double, RemovalMode);

    PoolState pool_;
    TokenPair origin_;
    TokenPair inside_{};
    TokenPair outside_{};
    CycleStage stage_ = CycleStage::Start;
    double alpha_ = 0.0, beta_ = 0.0, m_ = 0.0, n_ = 0.0, sigma_ = 0.0, delta_ = 0.0;
};

namespace detail {

inline void require_stage(const CycleLedger& l, CycleStage expected, const char* op) {
    if (l.stage() != expected)
        throw StageOrderError(std::string(op) + ": expected ledger at '" + to_string(expected) +
                              "', found '" + to_string(l.stage()) + "'");
}

}  // namespace detail

/// Pool becomes (X - alpha, XY / (X - alpha)); outside becomes (alpha, -beta).
inline CycleLedger stage1_switch(const CycleLedger& ledger, double alpha) {
    detail::require_stage(ledger, CycleStage::Start, "stage1_switch");
    const double x = ledger.pool().reserve_x(), y = ledger.pool().reserve_y();
    detail::require(alpha > 0.0 && alpha < x, "stage1_switch: alpha must lie in (0, X)");
    const double y_new = x * y / (x - alpha);

    CycleLedger next = ledger;
    next.alpha_ = alpha;
    next.beta_ = y_new - y;
    next.pool_ = PoolState(x - alpha, y_new);
    next.outside_ = {ledger.outside().x + alpha, ledger.outside().y - next.beta_};
    next.stage_ = CycleStage::AfterStage1;
    return next;
}

/// Adds (M, N) with N = M Y X / (X - alpha)^2, i.e. at the post-stage-1 ratio.
inline CycleLedger stage2_add(const CycleLedger& ledger, double m) {
    detail::require_stage(ledger, CycleStage::AfterStage1, "stage2_add");
    detail::require(m >= 0.0, "stage2_add: m must be >= 0");
    const double x0 = ledger.origin().x, y0 = ledger.origin().y;
    const double shifted = x0 - ledger.alpha();
    const double n = m * y0 * x0 / (shifted * shifted);

    CycleLedger next = ledger;
    next.m_ = m;
    next.n_ = n;
    if (m > 0.0) next.pool_ = add_liquidity(ledger.pool(), m, n);
    next.inside_ = {ledger.inside().x + m, ledger.inside().y + n};
    next.outside_ = {ledger.outside().x - m, ledger.outside().y - n};
    next.stage_ = CycleStage::AfterStage2;
    return next;
}

/// delta of Y received for sigma_amt of X paid into the pool.
inline double stage3_delta(const CycleLedger& ledger, double sigma_amt, Stage3Formula formula) {
    if (formula == Stage3Formula::ExactInvariant) {
        const double x2 = ledger.pool().reserve_x();
        return ledger.pool().invariant() * sigma_amt / (x2 * (x2 + sigma_amt));
    }
    const double x0 = ledger.origin().x, y0 = ledger.origin().y;
    const double shifted = x0 - ledger.alpha();
    return sigma_amt * (y0 * x0 / shifted) * (1.0 + ledger.m() / shifted) / (x0 + ledger.m());
}

inline CycleLedger stage3_switch(const CycleLedger& ledger, double sigma_amt,
                                 Stage3Formula formula = Stage3Formula::ExactInvariant) {
    detail::require_stage(ledger, CycleStage::AfterStage2, "stage3_switch");
    detail::require(sigma_amt > 0.0, "stage3_switch: sigma_amt must be > 0");
    const double delta = stage3_delta(ledger, sigma_amt, formula);
    if (!(delta < ledger.pool().reserve_y()))
        throw DomainError("stage3_switch: delta " + csv::format_real(delta) + " drains the pool");

    CycleLedger next = ledger;
    next.sigma_ = sigma_amt;
    next.delta_ = delta;
    next.pool_ = PoolState(ledger.pool().reserve_x() + sigma_amt, ledger.pool().reserve_y() - delta);
    next.outside_ = {ledger.outside().x - sigma_amt, ledger.outside().y + delta};
    next.stage_ = CycleStage::AfterStage3;
    return next;
}

/// Pool loses (g, h); inside becomes (M - g, N - h); outside gains (g, h).
inline CycleLedger stage4_remove(const CycleLedger& ledger, double g_amt, double h_amt,
                                 RemovalMode mode = RemovalMode::Proportional) {
    detail::require_stage(ledger, CycleStage::AfterStage3, "stage4_remove");
    detail::require(g_amt >= 0.0 && h_amt >= 0.0, "stage4_remove: amounts must be >= 0");
    const PoolState& pool = ledger.pool();
    if (!(g_amt < pool.reserve_x() && h_amt < pool.reserve_y()))
        throw DomainError("stage4_remove: removal exceeds reserves");
    const bool empty = g_amt == 0.0 && h_amt == 0.0;
    if (mode == RemovalMode::Proportional && !empty) {
        if (g_amt == 0.0 || h_amt == 0.0)
            throw RatioMismatchError("stage4_remove: one-sided removal is not at the pool ratio");
        detail::require_pool_ratio(pool, g_amt, h_amt, "stage4_remove");
    }

    CycleLedger next = ledger;
    next.pool_ = PoolState(pool.reserve_x() - g_amt, pool.reserve_y() - h_amt);
    next.inside_ = {ledger.inside().x - g_amt, ledger.inside().y - h_amt};
    next.outside_ = {ledger.outside().x + g_amt, ledger.outside().y + h_amt};
    next.stage_ = CycleStage::AfterStage4;
    return next;
}

struct CycleConfig {
    double x0 = 100.0;
    double y0 = 100.0;
    double alpha = 10.0;
    double m = 9.0;
    double sigma_amt = 1.0;
    /// Explicit stage-4 removal (checked against the pool ratio); when
    /// empty the closing removal from closure_parameters is used.
    std::optional<TokenPair> removal;

    void validate() const {
        detail::require(x0 > 0.0 && y0 > 0.0, "CycleConfig: starting reserves must be > 0");
        detail::require(alpha > 0.0 && alpha < x0, "CycleConfig: alpha must lie in (0, x0)");
        detail::require(m >= 0.0, "CycleConfig: m must be >= 0");
        detail::require(sigma_amt > 0.0, "CycleConfig: sigma_amt must be > 0");
    }
};

/**
 * Stage-4 amounts returning the pool to (X, Y):
 *     G = M - alpha + sigma
 *     H = (YX / (X - alpha)) (1 + M / (X - alpha)) - delta - Y
 * Only the pool closes; the investor's inside/outside positions generally
 * do not. Throws DomainError if either amount is negative.
 */
inline TokenPair closure_parameters(const CycleConfig& config,
                                    Stage3Formula formula = Stage3Formula::ExactInvariant) {
    config.validate();
    const double x = config.x0, y = config.y0, a = config.alpha, m = config.m;
    const auto after2 = stage2_add(stage1_switch(CycleLedger::open(PoolState(x, y)), a), m);
    const double delta = stage3_delta(after2, config.sigma_amt, formula);

    const double g = m - a + config.sigma_amt;
    const double h = (y * x / (x - a)) * (1.0 + m / (x - a)) - delta - y;
    // Rounding can leave an exact-zero amount slightly negative.
    const double tol = 1e-12 * std::max(x, y);
    if (g < -tol || h < -tol)
        throw DomainError("closure_parameters: infeasible closure, G=" + csv::format_real(g) +
                          " H=" + csv::format_real(h));
    return {std::max(g, 0.0), std::max(h, 0.0)};
}

struct CycleReport {
    std::array<CycleLedger, 5> snapshots;
    Stage3Formula formula;
    bool closing;
    TokenPair removal;
    double start_price;           ///< Y0 / X0, used for valuation
    double work_analogue;         ///< final outside valued at start_price
    double gross_short_exposure;  ///< max over stages of short outside value at start_price

    const CycleLedger& final_ledger() const { return snapshots.back(); }
};

inline CycleReport run_cycle(const CycleConfig& config,
                             Stage3Formula formula = Stage3Formula::ExactInvariant) {
    config.validate();
    const bool closing = !config.removal.has_value();
    const TokenPair removal = closing ? closure_parameters(config, formula) : *config.removal;

    const auto s0 = CycleLedger::open(PoolState(config.x0, config.y0));
    const auto s1 = stage1_switch(s0, config.alpha);
    const auto s2 = stage2_add(s1, config.m);
    const auto s3 = stage3_switch(s2, config.sigma_amt, formula);
    const auto s4 = stage4_remove(s3, removal.x, removal.y,
                                  closing ? RemovalMode::Closing : RemovalMode::Proportional);

    const double price = config.y0 / config.x0;
    double short_exposure = 0.0;
    for (const auto* s : {&s0, &s1, &s2, &s3, &s4}) {
        const auto& o = s->outside();
        short_exposure = std::max(short_exposure, std::max(0.0, -o.x) * price + std::max(0.0, -o.y));
    }
    const auto& out = s4.outside();
    return CycleReport{{s0, s1, s2, s3, s4}, formula, closing, removal, price,
                       out.x * price + out.y, short_exposure};
}

/// CSV `stage,pool_x,pool_y,inside_x,inside_y,outside_x,outside_y` plus a
/// trailing `summary,...` line.
inline void write_cycle_csv(std::ostream& os, const CycleReport& report) {
    using csv::format_real;
    os << "stage,pool_x,pool_y,inside_x,inside_y,outside_x,outside_y\n";
    for (const auto& s : report.snapshots)
        csv::write_row(os, {to_string(s.stage()), format_real(s.pool().reserve_x()),
                            format_real(s.pool().reserve_y()), format_real(s.inside().x),
                            format_real(s.inside().y), format_real(s.outside().x),
                            format_real(s.outside().y)});
    os << "summary,work_analogue=" << format_real(report.work_analogue)
       << ",gross_short_exposure=" << format_real(report.gross_short_exposure)
       << ",valuation=start_spot,stage3=" << to_string(report.formula)
       << ",removal=" << (report.closing ? "closing" : "proportional") << '\n';
}

}  // namespace autoliq
