#pragma once

// Zero-fee constant-product pool, X * Y = K, in continuous quantities.

#include <autoliq/csv.hpp>
#include <autoliq/error.hpp>

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace autoliq {

/// Relative tolerance on m/n vs X/Y for add/remove liquidity.
inline constexpr double kRatioTolerance = 1e-9;

class PoolState {
public:
    PoolState(double reserve_x, double reserve_y) : x_(reserve_x), y_(reserve_y) {
        detail::require(reserve_x > 0.0 && std::isfinite(reserve_x), "PoolState: reserve_x must be > 0");
        detail::require(reserve_y > 0.0 && std::isfinite(reserve_y), "PoolState: reserve_y must be > 0");
    }

    double reserve_x() const noexcept { return x_; }
    double reserve_y() const noexcept { return y_; }
    double invariant() const noexcept { return x_ * y_; }

    friend bool operator==(const PoolState&, const PoolState&) = default;

private:
    double x_;
    double y_;
};

struct SwapResult {
    PoolState pool;
    double amount_out;
};

namespace detail {

/// a * b / a_new with one rounding at the end, so that split trades land
/// within a couple of ulp of the single trade.
inline double rebalance(double a, double b, double a_new) {
    return static_cast<double>(static_cast<long double>(a) * b / a_new);
}

}  // namespace detail

/// P = Y / X.
inline double spot_price(const PoolState& pool) { return pool.reserve_y() / pool.reserve_x(); }

inline SwapResult swap_x_for_y(const PoolState& pool, double dx) {
    detail::require(dx > 0.0, "swap_x_for_y: dx must be > 0");
    const double x_new = pool.reserve_x() + dx;
    const double y_new = detail::rebalance(pool.reserve_x(), pool.reserve_y(), x_new);
    // Y dx / (X + dx) equals Y - K / x_new without the cancellation.
    return {PoolState(x_new, y_new), pool.reserve_y() * dx / x_new};
}

inline SwapResult swap_y_for_x(const PoolState& pool, double dy) {
    detail::require(dy > 0.0, "swap_y_for_x: dy must be > 0");
    const double y_new = pool.reserve_y() + dy;
    const double x_new = detail::rebalance(pool.reserve_y(), pool.reserve_x(), y_new);
    return {PoolState(x_new, y_new), pool.reserve_x() * dy / y_new};
}

/// Exact-output swap: pay X, receive exactly dy_out of Y. amount_out holds
/// the X paid in.
inline SwapResult swap_x_for_exact_y(const PoolState& pool, double dy_out) {
    detail::require(dy_out > 0.0, "swap_x_for_exact_y: dy_out must be > 0");
    if (!(dy_out < pool.reserve_y()))
        throw DomainError("swap_x_for_exact_y: cannot drain reserve_y (" + csv::format_real(dy_out) +
                          " >= " + csv::format_real(pool.reserve_y()) + ")");
    const double y_new = pool.reserve_y() - dy_out;
    const double x_new = pool.invariant() / y_new;
    return {PoolState(x_new, y_new), x_new - pool.reserve_x()};
}

inline SwapResult swap_y_for_exact_x(const PoolState& pool, double dx_out) {
    detail::require(dx_out > 0.0, "swap_y_for_exact_x: dx_out must be > 0");
    if (!(dx_out < pool.reserve_x()))
        throw DomainError("swap_y_for_exact_x: cannot drain reserve_x (" + csv::format_real(dx_out) +
                          " >= " + csv::format_real(pool.reserve_x()) + ")");
    const double x_new = pool.reserve_x() - dx_out;
    const double y_new = pool.invariant() / x_new;
    return {PoolState(x_new, y_new), y_new - pool.reserve_y()};
}

namespace detail {

inline void require_pool_ratio(const PoolState& pool, double m, double n, const char* op) {
    const double pool_ratio = pool.reserve_x() / pool.reserve_y();
    const double given = m / n;
    if (std::abs(given - pool_ratio) > kRatioTolerance * pool_ratio)
        throw RatioMismatchError(std::string(op) + ": amount ratio " + csv::format_real(given) +
                                 " does not match pool ratio " + csv::format_real(pool_ratio));
}

}  // namespace detail

inline PoolState add_liquidity(const PoolState& pool, double m, double n) {
    detail::require(m > 0.0 && n > 0.0, "add_liquidity: amounts must be > 0");
    detail::require_pool_ratio(pool, m, n, "add_liquidity");
    return PoolState(pool.reserve_x() + m, pool.reserve_y() + n);
}

inline PoolState remove_liquidity(const PoolState& pool, double g, double h) {
    detail::require(g > 0.0 && h > 0.0, "remove_liquidity: amounts must be > 0");
    if (!(g < pool.reserve_x() && h < pool.reserve_y()))
        throw DomainError("remove_liquidity: removal exceeds reserves");
    detail::require_pool_ratio(pool, g, h, "remove_liquidity");
    return PoolState(pool.reserve_x() - g, pool.reserve_y() - h);
}

/// Exact relative price change (X / (X + dx))^2 - 1 after adding dx of X.
inline double exact_relative_impact(const PoolState& pool, double dx) {
    const double x = pool.reserve_x();
    detail::require(dx > -x, "exact_relative_impact: dx must exceed -X");
    const double r = x / (x + dx);
    return r * r - 1.0;
}

/// First-order impact from P'(X) = -2 P / X: dP/P = -2 dx / X.
inline double linearized_relative_impact(const PoolState& pool, double dx) {
    return -2.0 * dx / pool.reserve_x();
}

/// Records pool transitions for the `step,action,reserve_x,reserve_y,spot_price` trace.
class PoolTrace {
public:
    struct Entry {
        std::size_t step;
        std::string action;
        PoolState pool;
    };

    explicit PoolTrace(const PoolState& initial) { entries_.push_back({0, "init", initial}); }

    const PoolState& current() const { return entries_.back().pool; }
    const std::vector<Entry>& entries() const { return entries_; }

    void record(std::string action, const PoolState& pool) {
        entries_.push_back({entries_.size(), std::move(action), pool});
    }

    void write_csv(std::ostream& os) const {
        os << "step,action,reserve_x,reserve_y,spot_price\n";
        for (const auto& e : entries_)
            csv::write_row(os, {std::to_string(e.step), e.action, csv::format_real(e.pool.reserve_x()),
                                csv::format_real(e.pool.reserve_y()), csv::format_real(spot_price(e.pool))});
    }

private:
    std::vector<Entry> entries_;
};

}  // namespace autoliq
