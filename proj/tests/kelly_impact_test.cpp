#include <autoliq/kelly_impact.hpp>
#include <autoliq/numeric.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

using namespace autoliq;

namespace {

GrowthModel unit(double hurst = 0.5) { return {1.0, 1.0, 1.0, hurst}; }

}  // namespace

TEST(GrowthRate, DirectEvaluation) {
    EXPECT_EQ(growth_rate(0.0, 3.0, 2.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(growth_rate(1.0, 1.0, 1.0, 1.0), 0.5);
    EXPECT_THROW(growth_rate(1.0, 1.0, 0.0, 1.0), DomainError);
    EXPECT_THROW(growth_rate(1.0, 1.0, 1.0, 0.0), DomainError);
}

TEST(GrowthRate, MaximiserIsEdgeTimesWealthOverVariance) {
    const double dp = 0.3, w = 2.0, s = 0.7;
    auto g = [&](double q) { return growth_rate(q, dp, w, s); };
    const auto best = numeric::golden_section_maximize<double>(g, 0.0, 10.0);
    EXPECT_NEAR(best.argmax, dp * w / (s * s), 1e-8);
}

TEST(GrowthRateConstrained, ValueAndStationarity) {
    const GrowthModel m{2.0, 1.0, 1.5, 0.5};
    const double s2 = m.sigma * m.sigma;
    EXPECT_DOUBLE_EQ(growth_rate_constrained(1.0, s2 / m.capital_scale_k, m), s2 / (2.0 * 4.0));
    EXPECT_NEAR(growth_rate_constrained(1e-14, 1.0, m), 0.0, 1e-6);
    // d/dq at dP = (sigma^2/k) sqrt(q) vanishes.
    const double q = 2.5, dp = optimal_impact_sqrt(q, m), h = 1e-5;
    const double slope = (growth_rate_constrained(q + h, dp, m) - growth_rate_constrained(q - h, dp, m)) / (2 * h);
    EXPECT_NEAR(slope, 0.0, 1e-9);
}

TEST(OptimalImpactSqrt, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(optimal_impact_sqrt(4.0, unit()), 2.0);
    EXPECT_DOUBLE_EQ(optimal_impact_sqrt(1.0, unit()), 1.0);
    const GrowthModel m{0.5, 1.0, 0.3, 0.5};
    EXPECT_NEAR(optimal_impact_sqrt(12.0, m), 2.0 * optimal_impact_sqrt(3.0, m), 1e-15);
    EXPECT_THROW(optimal_impact_sqrt(0.0, m), DomainError);
}

TEST(GrowthModel, ValidatesInvariants) {
    EXPECT_THROW(optimal_impact_fou(1.0, {0.0, 1.0, 1.0, 0.5}), DomainError);
    EXPECT_THROW(optimal_impact_fou(1.0, {1.0, -1.0, 1.0, 0.5}), DomainError);
    EXPECT_THROW(optimal_impact_fou(1.0, {1.0, 1.0, 0.0, 0.5}), DomainError);
    EXPECT_THROW(optimal_impact_fou(1.0, {1.0, 1.0, 1.0, 1.0}), DomainError);
}

TEST(GrowthPerTimeFou, ReducesToConstrainedAtBrownianUnitHorizon) {
    const GrowthModel m{1.7, 1.0, 0.9, 0.5};
    for (double q : {0.01, 0.5, 3.0, 250.0})
        EXPECT_NEAR(growth_per_time_fou(q, 0.4, m), growth_rate_constrained(q, 0.4, m), 1e-13);
}

TEST(GrowthPerTimeFou, FrozenValue) {
    // mpmath, 40 digits.
    const GrowthModel m{1.5, 2.0, 0.8, 0.7};
    EXPECT_NEAR(growth_per_time_fou(2.0, 1.3, m), 0.73040521138155397648, 1e-14);
    EXPECT_NEAR(optimal_impact_fou(2.0, m), 1.4708071924760599879, 1e-14);
}

TEST(OptimalImpactFou, SpecialCases) {
    for (double q : {0.3, 1.0, 17.0}) EXPECT_NEAR(optimal_impact_fou(q, unit()), optimal_impact_sqrt(q, unit()), 1e-15);
    EXPECT_DOUBLE_EQ(optimal_impact_fou(16.0, unit(0.25)), 0.5);
    EXPECT_DOUBLE_EQ(unit(0.75).impact_exponent(), 1.0);
}

TEST(OptimalImpactFou, IsStationaryPointOfGrowthPerTime) {
    for (double h : {0.3, 0.5, 0.7, 0.9}) {
        const GrowthModel m{1.3, 0.6, 1.1, h};
        for (double q : {0.2, 5.0}) {
            const double dp = optimal_impact_fou(q, m);
            EXPECT_NEAR(growth_per_time_fou_slope<long double>(q, dp, m), 0.0L, 1e-12L) << "H=" << h;
        }
    }
}

TEST(OptimalSizeNumeric, InvertsClosedForm) {
    for (double h : {0.3, 0.5, 0.7})
        for (double q : {0.1, 1.0, 10.0}) {
            const auto m = unit(h);
            EXPECT_NEAR(optimal_size_numeric(optimal_impact_fou(q, m), m) / q, 1.0, 1e-6) << "H=" << h;
        }
    EXPECT_NEAR(optimal_size_numeric(2.0, unit()), 4.0, 4e-9);
}

TEST(OptimalSizeNumeric, MonotoneInImpact) {
    for (double h : {0.3, 0.6}) {
        double prev = 0.0;
        for (double dp : {0.05, 0.2, 1.0, 4.0, 30.0}) {
            const double q = optimal_size_numeric(dp, unit(h));
            EXPECT_GT(q, prev);
            prev = q;
        }
    }
}

TEST(OptimalSizeNumeric, NoInteriorMaximumBelowQuarterHurst) {
    EXPECT_THROW(optimal_size_numeric(1.0, unit(0.25)), BracketError);
    EXPECT_THROW(optimal_size_numeric(1.0, unit(0.2)), BracketError);
    EXPECT_THROW(optimal_size_numeric(0.0, unit()), DomainError);
}

TEST(OptimalSizeNumeric, RandomisedInversion) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uh(0.3, 0.95), ul(-3.0, 3.0), us(0.2, 5.0);
    for (int i = 0; i < 200; ++i) {
        const GrowthModel m{us(rng), us(rng), us(rng), uh(rng)};
        const double q = std::pow(10.0, ul(rng));
        EXPECT_NEAR(optimal_size_numeric(optimal_impact_fou(q, m), m) / q, 1.0, 1e-6);
    }
}

TEST(ImpactExponent, RecoversModelSlope) {
    const auto grid = numeric::log_grid(0.01, 1e4, 61);
    for (double h : {0.3, 0.5, 0.7, 0.75})
        EXPECT_NEAR(impact_exponent(impact_curve(grid, unit(h))), 2.0 * h - 0.5, 1e-6);
    std::vector<ImpactPoint> flat{{1.0, 2.0}, {2.0, 2.0}, {5.0, 2.0}};
    EXPECT_NEAR(impact_exponent(flat), 0.0, 1e-15);
    std::vector<ImpactPoint> same{{1.0, 2.0}, {1.0, 3.0}, {1.0, 4.0}};
    EXPECT_THROW(impact_exponent(same), DomainError);
    EXPECT_THROW(impact_exponent(std::vector<ImpactPoint>{{1.0, 1.0}, {2.0, 2.0}}), DomainError);
}

TEST(WriteImpactCsv, Format) {
    std::ostringstream os;
    const std::vector<ImpactPoint> pts{{4.0, 2.0}};
    write_impact_csv(os, pts, unit());
    EXPECT_EQ(os.str(), "q,delta_p,exponent_model\n4,2,0.5\n");
}

TEST(LeverageForm, MatchesSquareRootLawForAnyPrice) {
    for (double p : {0.1, 1.0, 10.0}) {
        EXPECT_NEAR(optimal_impact_leverage_form(4.0, p, unit()), 2.0, 1e-15);
        EXPECT_NEAR(optimal_impact_leverage_form(1.0, p, {1.0, 1.0, 2.0, 0.5}), 4.0, 1e-15);
    }
    EXPECT_THROW(optimal_impact_leverage_form(1.0, 1.0, unit(0.7)), DomainError);
}

TEST(LeverageForm, GrowthMaximisedAtImpliedLeverage) {
    const double q = 2.0, p = 3.0;
    const GrowthModel m{0.8, 1.0, 1.2, 0.5};
    const double dp = optimal_impact_leverage_form(q, p, m);
    auto g = [&](double f) { return leverage_growth(f, dp, p, m.sigma); };
    const auto best = numeric::golden_section_maximize<double>(g, 0.0, 100.0);
    EXPECT_NEAR(best.argmax, p * std::sqrt(q) / m.capital_scale_k, 1e-7);
}

TEST(KellyOu, FractionAndGrowth) {
    const FouParams pr{1.0, 0.0, 1.0, 0.5};
    EXPECT_EQ(kelly_fraction_ou(0.0, pr), 0.0);
    EXPECT_DOUBLE_EQ(kelly_fraction_ou(0.5, pr), 0.5);
    const FouParams q{-0.4, 2.0, 0.5, 0.5};
    for (double p : {0.5, 2.0, 3.7}) {
        const double edge = q.kappa * (p - q.level);
        EXPECT_NEAR(instantaneous_growth_ou(p, q), 0.5 * std::pow(edge / q.sigma, 2), 1e-14);
        EXPECT_GE(instantaneous_growth_ou(p, q), 0.0);
    }
    EXPECT_THROW(kelly_fraction_ou(1.0, {1.0, 0.0, 0.0, 0.5}), DomainError);
}

TEST(WealthClosedForm, Identities) {
    const FouParams pr{1.0, 0.0, 1.0, 0.5};
    EXPECT_EQ(wealth_closed_form(3.0, 3.0, pr, 1.5), 1.5);
    EXPECT_NEAR(wealth_closed_form(1.0 + std::log(2.0), 1.0, pr, 1.5), 3.0, 1e-14);
    EXPECT_THROW(wealth_closed_form(1.0, 1.0, {1.0, 0.5, 1.0, 0.5}, 1.0), DomainError);
}

TEST(SelfFinancing, ConstantWealthWithoutPositionOrMoves) {
    const auto path = simulate_fou({0.0, 0.0, 1.0, 0.5}, 50.0, 100, 0.01, 3);
    for (double w : simulate_self_financing(path, {0.0, 0.0, 1.0, 0.5}, 2.0).values) EXPECT_EQ(w, 2.0);
    SamplePath flat{{0.0, 1.0, 2.0}, {5.0, 5.0, 5.0}, 0, ""};
    for (double w : simulate_self_financing(flat, {-0.3, 0.0, 1.0, 0.5}, 2.0).values) EXPECT_EQ(w, 2.0);
}

TEST(SelfFinancing, NamesFirstNonPositiveIndex) {
    SamplePath bad{{0.0, 1.0, 2.0, 3.0}, {1.0, 0.5, -0.1, 0.0}, 0, ""};
    try {
        simulate_self_financing(bad, {-0.1, 0.0, 1.0, 0.5}, 1.0);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos);
    }
}

TEST(SelfFinancing, ErrorShrinksAsDriverIsRefined) {
    const FouParams pr{-0.05, 0.0, 1.0, 0.5};
    const FbmGenerator gen(800, 1.0 / 800, 0.5);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto driver = gen.path(seed);
        double prev = HUGE_VAL;
        for (std::size_t factor : {8u, 4u, 2u, 1u}) {
            const auto price = simulate_fou_on_driver(pr, 1000.0, coarsen(driver, factor));
            const double w = simulate_self_financing(price, pr, 1.0).values.back();
            const double ref = wealth_closed_form(price.values.back(), 1000.0, pr, 1.0);
            const double err = std::abs(w - ref) / ref;
            EXPECT_LT(err, prev) << "seed " << seed << " factor " << factor;
            prev = err;
        }
        EXPECT_LT(prev, 0.01);
    }
}
