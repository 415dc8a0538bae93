// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <autoliq/carnot_cycle.hpp>
#include <autoliq/catbond_kelly.hpp>
#include <autoliq/cpmm.hpp>
#include <autoliq/experiment.hpp>
#include <autoliq/kelly_impact.hpp>
#include <autoliq/numeric.hpp>
#include <autoliq/stochastic_paths.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace autoliq;
namespace fs = std::filesystem;

namespace tol {
constexpr double kInversionRel = 1e-6;
constexpr double kInversionSeconds = 1.0;
constexpr double kExponentAbs = 1e-6;
constexpr double kExponentSeconds = 1.0;
constexpr double kLeverageRel = 1e-9;
constexpr double kScalingAbs = 0.05;
constexpr double kScalingSeconds = 30.0;
constexpr double kWealthFinestRel = 0.01;
constexpr double kCpmmFactor = 3.5;
constexpr double kCpmmExactAbs = 1e-9;
constexpr double kCycleAbs = 1e-12;
constexpr double kNonzeroOutside = 1e-9;  ///< relative to X0; rounding is ~1e-15
constexpr double kCatbondAbs = 1e-8;
constexpr double kTwoBondAbs = 5e-4;
constexpr double kIsoAbs = 1e-12;
constexpr double kIsoFirstOrderFactor = 2.0;
}  // namespace tol

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GrowthModel unit_model(double h) { return {1.0, 1.0, 1.0, h}; }

Outcome impact_inversion() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double h : {0.3, 0.5, 0.7})
        for (double q : {0.1, 1.0, 10.0, 100.0}) {
            const auto m = unit_model(h);
            worst = std::max(worst, std::abs(optimal_size_numeric(optimal_impact_fou(q, m), m) - q) / q);
        }
    const double secs = seconds_since(t0);
    return {worst <= tol::kInversionRel && secs < tol::kInversionSeconds,
            fmt("max rel err %.3e (<= %.0e), %.3f s (< %.0f s)", worst, tol::kInversionRel, secs,
                tol::kInversionSeconds)};
}

Outcome exponent_reproduction() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = numeric::log_grid(0.01, 1e4, 61);
    double worst = 0.0;
    std::string slopes;
    for (double h : {0.3, 0.5, 0.7, 0.75}) {
        const double slope = impact_exponent(impact_curve(grid, unit_model(h)));
        worst = std::max(worst, std::abs(slope - (2.0 * h - 0.5)));
        slopes += fmt(" H=%.2f:%.9f", h, slope);
    }
    const double secs = seconds_since(t0);
    return {worst <= tol::kExponentAbs && secs < tol::kExponentSeconds,
            fmt("max |slope-(2H-1/2)| %.3e (<= %.0e);%s; %.3f s", worst, tol::kExponentAbs, slopes.c_str(), secs)};
}

Outcome leverage_equivalence() {
    double worst = 0.0;
    const GrowthModel m = unit_model(0.5);
    for (double p : {0.1, 1.0, 10.0})
        for (double q : {0.25, 1.0, 4.0}) {
            const double ref = m.sigma * m.sigma / m.capital_scale_k * std::sqrt(q);
            worst = std::max(worst, std::abs(optimal_impact_leverage_form(q, p, m) - ref) / ref);
        }
    return {worst <= tol::kLeverageRel, fmt("max rel err %.3e (<= %.0e)", worst, tol::kLeverageRel)};
}

Outcome fbm_scaling() {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr std::size_t paths = 2000, steps = 1024;
    bool ok = true;
    std::string detail;
    for (double h : {0.3, 0.7}) {
        const FbmGenerator gen(steps, 1.0 / steps, h);
        // Per-time accumulators, filled path by path in seed order.
        std::vector<std::vector<double>> columns(steps + 1, std::vector<double>(paths));
        for (std::size_t s = 0; s < paths; ++s) {
            const auto p = gen.path(1 + s);
            for (std::size_t i = 1; i <= steps; ++i) columns[i][s] = p.values[i];
        }
        std::vector<double> lt, lv;
        for (std::size_t i = 1; i <= steps; ++i) {
            lt.push_back(std::log(static_cast<double>(i) / steps));
            lv.push_back(std::log(numeric::sample_variance(columns[i])));
        }
        const double slope = numeric::ols_slope(lt, lv);
        ok &= std::abs(slope - 2.0 * h) <= tol::kScalingAbs;
        detail += fmt("H=%.1f slope %.4f (2H=%.1f, +/-%.2f); ", h, slope, 2.0 * h, tol::kScalingAbs);
    }
    const double secs = seconds_since(t0);
    ok &= secs < tol::kScalingSeconds;
    return {ok, detail + fmt("%.2f s (< %.0f s)", secs, tol::kScalingSeconds)};
}

Outcome self_financing() {
    // Wealth-path Euler error on one Brownian driver observed at dt = 1e-2 .. 1.25e-3.
    const FouParams params{-0.05, 0.0, 1.0, 0.5};
    const auto rows = experiment::self_financing_refinement(params, 1000.0, 1.0, 1.0, 800, 4, 42);
    bool decreasing = true;
    std::string errs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) decreasing &= rows[i].rel_err < rows[i - 1].rel_err;
        errs += fmt(" dt=%g:%.4e", rows[i].dt, rows[i].rel_err);
    }
    const double finest = rows.back().rel_err;
    return {decreasing && finest < tol::kWealthFinestRel,
            fmt("strictly decreasing=%s;%s (finest < %.0e)", decreasing ? "yes" : "no", errs.c_str(),
                tol::kWealthFinestRel)};
}

Outcome cpmm_linearization() {
    const PoolState pool(100.0, 100.0);
    double worst_ratio = 0.0;
    for (double u : {0.01, 0.02, 0.05, 0.1}) {
        const double gap =
            std::abs(exact_relative_impact(pool, u * 100.0) - linearized_relative_impact(pool, u * 100.0));
        worst_ratio = std::max(worst_ratio, gap / (u * u));
    }
    const double exact = exact_relative_impact(pool, 10.0);
    const double exact_err = std::abs(exact - (-21.0 / 121.0));
    return {worst_ratio <= tol::kCpmmFactor && exact_err <= tol::kCpmmExactAbs,
            fmt("max |exact-linear|/u^2 %.4f (<= %.1f); exact(100,10)=%.12f err %.1e (<= %.0e)", worst_ratio,
                tol::kCpmmFactor, exact, exact_err, tol::kCpmmExactAbs)};
}

Outcome cycle_closure() {
    const CycleConfig config{100.0, 100.0, 10.0, 9.0, 1.0, std::nullopt};
    const auto report = run_cycle(config, Stage3Formula::ExactInvariant);
    double conservation = 0.0;
    for (const auto& s : report.snapshots) conservation = std::max(conservation, s.conservation_residual());
    const auto& fin = report.final_ledger();
    const double pool_err =
        std::max(std::abs(fin.pool().reserve_x() - 100.0), std::abs(fin.pool().reserve_y() - 100.0));
    const auto& out = fin.outside();
    const double out_size = std::max(std::abs(out.x), std::abs(out.y));
    const bool nonzero = out_size > tol::kNonzeroOutside * config.x0;
    return {conservation <= tol::kCycleAbs && pool_err <= tol::kCycleAbs && nonzero,
            fmt("conservation %.1e (<= %.0e); final pool err %.1e (<= %.0e); final outside (%.3g, %.3g) "
                "nonzero=%s (> %.0e); final inside (%.6g, %.6g)",
                conservation, tol::kCycleAbs, pool_err, tol::kCycleAbs, out.x, out.y, nonzero ? "yes" : "no",
                tol::kNonzeroOutside * config.x0, fin.inside().x, fin.inside().y)};
}

Outcome catbond_agreement() {
    double worst = 0.0;
    for (double q : {0.01, 0.1, 0.3})
        for (double r : {0.1, 0.5, 1.0, 2.0}) {
            const BondSpec b{q, r};
            worst = std::max(worst, std::abs(single_bond_fraction(b).fraction - single_bond_fraction_numeric(b).fraction));
        }
    const double f = single_bond_fraction({0.2, 1.0}).fraction;
    auto two_bond_err = [](double q) {
        const BondSpec b{q, 1.0};
        return std::abs(two_bond_fraction_series(b).fraction - two_bond_fraction_numeric(b).fraction);
    };
    const double err_001 = two_bond_err(0.01);
    bool decreasing = true;
    double prev = HUGE_VAL;
    std::string series;
    for (double q : {0.02, 0.01, 0.005, 0.0025}) {
        const double e = two_bond_err(q);
        decreasing &= e < prev;
        prev = e;
        series += fmt(" %g:%.3e", q, e);
    }
    const bool ok = worst <= tol::kCatbondAbs && f == 0.6 && err_001 <= tol::kTwoBondAbs && decreasing;
    return {ok, fmt("grid max err %.2e (<= %.0e); f(0.2,1)=%.17g exact=%s; two-bond err at q=0.01 %.3e (<= %.0e); "
                    "decreasing=%s [%s ]",
                    worst, tol::kCatbondAbs, f, f == 0.6 ? "yes" : "no", err_001, tol::kTwoBondAbs,
                    decreasing ? "yes" : "no", series.c_str())};
}

Outcome iso_fraction() {
    const BondSpec b{0.1, 1.0};
    const double f0 = single_bond_fraction(b).fraction;
    double worst = 0.0, worst_ratio = 0.0;
    for (double d : {1e-2, 1e-3}) {
        const auto s = iso_fraction_shift(b, d);
        worst = std::max(worst, std::abs(single_bond_fraction({b.default_prob_q + s.exact, b.return_r + d}).fraction - f0));
        worst_ratio = std::max(worst_ratio, std::abs(s.exact - s.first_order) / (d * d * b.default_prob_q));
    }
    return {worst <= tol::kIsoAbs && worst_ratio <= tol::kIsoFirstOrderFactor,
            fmt("fraction drift %.2e (<= %.0e); max |exact-first|/(delta^2 q) %.4f (<= %.0f)", worst, tol::kIsoAbs,
                worst_ratio, tol::kIsoFirstOrderFactor)};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const auto base = fs::temp_directory_path() / ("autoliq_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(base);
    std::size_t compared = 0;
    bool same = true;
    for (const std::string name : {"impact-verify", "fbm-gen"}) {
        const auto overrides = name == "fbm-gen" ? config::parse_config("n_paths=4\n") : config::ConfigMap{};
        const auto a = experiment::run_experiment(name, {}, overrides, 20240601, base / (name + "_a"));
        const auto b = experiment::run_experiment(name, {}, overrides, 20240601, base / (name + "_b"));
        same &= a.outputs.size() == b.outputs.size();
        for (std::size_t i = 0; same && i < a.outputs.size(); ++i) {
            same &= slurp(base / (name + "_a") / a.outputs[i].name) == slurp(base / (name + "_b") / b.outputs[i].name);
            ++compared;
        }
    }
    fs::remove_all(base);
    return {same && compared > 0, fmt("%zu CSV pairs byte-identical=%s", compared, same ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"impact-law inversion", impact_inversion},
        {"impact exponent reproduction", exponent_reproduction},
        {"leverage-form equivalence", leverage_equivalence},
        {"fbm variance scaling", fbm_scaling},
        {"self-financing convergence", self_financing},
        {"cpmm linearization", cpmm_linearization},
        {"cycle conservation and closure", cycle_closure},
        {"cat-bond oracle agreement", catbond_agreement},
        {"iso-fraction sensitivity", iso_fraction},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed;
}
