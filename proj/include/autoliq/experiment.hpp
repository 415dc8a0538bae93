#pragma once

// Named, seeded experiments over the model headers. Each run writes its CSV
// artefacts plus `manifest.txt` (key=value) into an output directory.

#include <autoliq/carnot_cycle.hpp>
#include <autoliq/catbond_kelly.hpp>
#include <autoliq/config.hpp>
#include <autoliq/cpmm.hpp>
#include <autoliq/csv.hpp>
#include <autoliq/error.hpp>
#include <autoliq/kelly_impact.hpp>
#include <autoliq/numeric.hpp>
#include <autoliq/stochastic_paths.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace autoliq::experiment {

inline constexpr const char* kToolVersion = "0.1.0";

/// Output directory missing/unwritable or a file could not be written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputFile {
    std::string name;  ///< relative to the output directory
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct RunManifest {
    std::string experiment;
    config::ConfigMap config;
    std::uint64_t seed = 0;
    std::string fbm_method = "none";
    std::string prng = kPrngLabel;
    std::string normal = kNormalLabel;
    std::string tool_version = kToolVersion;
    std::vector<OutputFile> outputs;
    std::vector<std::pair<std::string, std::string>> results;
    double wall_clock_seconds = 0.0;

    void write(std::ostream& os) const {
        os << "experiment=" << experiment << '\n'
           << "tool_version=" << tool_version << '\n'
           << "seed=" << seed << '\n'
           << "fbm_method=" << fbm_method << '\n'
           << "prng=" << prng << '\n'
           << "normal=" << normal << '\n';
        for (const auto& [k, v] : config) os << "config." << k << '=' << config::to_text(v) << '\n';
        for (const auto& [k, v] : results) os << "result." << k << '=' << v << '\n';
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            os << "output." << i << '=' << outputs[i].name << '\n'
               << "output." << i << ".bytes=" << outputs[i].bytes << '\n'
               << "output." << i << ".sha256=" << outputs[i].sha256 << '\n';
        }
        os << "wall_clock_seconds=" << csv::format_real(wall_clock_seconds) << '\n';
    }
};

inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

/// Terminal self-financing wealth vs the closed form on successively
/// coarser views of one Brownian driver.
struct RefinementRow {
    double dt;
    std::size_t n_steps;
    double p_terminal;
    double wealth_simulated;
    double wealth_closed_form;
    double rel_err;
};

inline std::vector<RefinementRow> self_financing_refinement(const FouParams& params, double p0, double w0,
                                                            double horizon, std::size_t finest_steps,
                                                            int levels, std::uint64_t seed,
                                                            std::string* method_label = nullptr) {
    detail::require(levels >= 1, "self_financing_refinement: levels must be >= 1");
    const std::size_t coarsest_factor = std::size_t{1} << (levels - 1);
    detail::require(finest_steps % coarsest_factor == 0,
                    "self_financing_refinement: finest_steps must be divisible by 2^(levels-1)");
    const FbmGenerator gen(finest_steps, horizon / static_cast<double>(finest_steps), 0.5);
    const SamplePath driver = gen.path(seed);
    if (method_label) *method_label = gen.method_label();

    std::vector<RefinementRow> rows;
    for (int level = levels - 1; level >= 0; --level) {
        const std::size_t factor = std::size_t{1} << level;
        const SamplePath coarse = coarsen(driver, factor);
        const SamplePath price = simulate_fou_on_driver(params, p0, coarse);
        const SamplePath wealth = simulate_self_financing(price, params, w0);
        const double closed = wealth_closed_form(price.values.back(), p0, params, w0);
        const double sim = wealth.values.back();
        rows.push_back({coarse.times[1] - coarse.times[0], coarse.values.size() - 1, price.values.back(), sim,
                        closed, std::abs(sim - closed) / closed});
    }
    return rows;
}

namespace detail {

using config::Kind;
using config::KeySpec;
using config::Value;

inline std::function<bool(const Value&)> real_in(double lo, double hi, bool open_lo = true, bool open_hi = true) {
    return [=](const Value& v) {
        const double x = std::holds_alternative<std::int64_t>(v) ? static_cast<double>(std::get<std::int64_t>(v))
                                                                 : std::get<double>(v);
        const bool lo_ok = open_lo ? x > lo : x >= lo;
        const bool hi_ok = open_hi ? x < hi : x <= hi;
        return lo_ok && hi_ok;
    };
}

inline std::function<bool(const Value&)> int_in(std::int64_t lo, std::int64_t hi) {
    return [=](const Value& v) {
        const auto x = std::get<std::int64_t>(v);
        return x >= lo && x <= hi;
    };
}

inline std::function<bool(const Value&)> one_of(std::vector<std::string> options) {
    return [options = std::move(options)](const Value& v) {
        return std::find(options.begin(), options.end(), std::get<std::string>(v)) != options.end();
    };
}

inline std::function<bool(const Value&)> list_in(double lo, double hi) {
    return [=](const Value& v) {
        const auto xs = config::parse_real_list(v);
        if (xs.empty()) return false;
        for (double x : xs)
            if (!(x > lo && x < hi)) return false;
        return true;
    };
}

constexpr double kInf = std::numeric_limits<double>::infinity();

inline KeySpec hurst_key(std::string def) { return {"hurst", Kind::Real, std::move(def), "(0, 1)", real_in(0, 1)}; }
inline KeySpec positive(std::string name, std::string def) {
    return {std::move(name), Kind::Real, std::move(def), "(0, inf)", real_in(0, kInf)};
}
inline KeySpec finite(std::string name, std::string def) {
    return {std::move(name), Kind::Real, std::move(def), "(-inf, inf)", real_in(-kInf, kInf)};
}
inline KeySpec seed_key() { return {"seed", Kind::Integer, "42", "[0, 2^63)", int_in(0, INT64_MAX)}; }

inline std::vector<KeySpec> growth_model_keys(std::string hurst) {
    return {hurst_key(std::move(hurst)), positive("sigma", "1"), positive("k", "1"), positive("khat", "1")};
}

inline GrowthModel growth_model(const config::Settings& s) {
    return {s.real("k"), s.real("khat"), s.real("sigma"), s.real("hurst")};
}

inline FbmMethod fbm_method(const std::string& name) {
    if (name == "davies-harte") return FbmMethod::DaviesHarte;
    if (name == "cholesky") return FbmMethod::Cholesky;
    return FbmMethod::Auto;
}

/// Buffers one output file so it can be checksummed and listed.
class Outputs {
public:
    explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& contents) {
        const auto path = dir_ / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
        f << contents;
        f.close();
        if (!f) throw IoError("failed writing '" + path.string() + "'");
        files_.push_back({name, contents.size(), sha256_hex(contents)});
    }

    std::vector<OutputFile>& files() { return files_; }
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<OutputFile> files_;
};

struct Context {
    const config::Settings& settings;
    Outputs& out;
    RunManifest& manifest;
    std::uint64_t seed;
};

// -- experiments --------------------------------------------------------------

inline std::vector<KeySpec> fbm_gen_keys() {
    return {{"process", Kind::Text, "fbm", "{fbm, fou}", one_of({"fbm", "fou"})},
            {"n_steps", Kind::Integer, "1024", "[1, 1048576]", int_in(1, 1 << 20)},
            positive("dt", "0.0009765625"),
            hurst_key("0.7"),
            {"method", Kind::Text, "auto", "{auto, davies-harte, cholesky}",
             one_of({"auto", "davies-harte", "cholesky"})},
            {"n_paths", Kind::Integer, "1", "[1, 10000]", int_in(1, 10000)},
            finite("kappa", "0"),
            finite("level", "0"),
            {"sigma", Kind::Real, "1", "[0, inf)", real_in(0, kInf, false)},
            finite("p0", "0"),
            seed_key()};
}

inline void run_fbm_gen(Context& c) {
    const auto& s = c.settings;
    const auto n = static_cast<std::size_t>(s.integer("n_steps"));
    const FbmGenerator gen(n, s.real("dt"), s.real("hurst"), fbm_method(s.text("method")));
    const FouParams fou{s.real("kappa"), s.real("level"), s.real("sigma"), s.real("hurst")};
    const bool is_fou = s.text("process") == "fou";
    c.manifest.fbm_method = gen.method_label();

    const auto paths = s.integer("n_paths");
    for (std::int64_t i = 0; i < paths; ++i) {
        SamplePath p = gen.path(c.seed + static_cast<std::uint64_t>(i));
        if (is_fou) p = simulate_fou_on_driver(fou, s.real("p0"), p);
        std::ostringstream os;
        write_path_csv(os, p);
        char name[32];
        std::snprintf(name, sizeof name, "path_%04lld.csv", static_cast<long long>(i));
        c.out.write(name, os.str());
    }
    c.manifest.results.push_back({"fbm_fallback", gen.fell_back() ? "true" : "false"});
}

inline std::vector<KeySpec> impact_curve_keys() {
    auto keys = growth_model_keys("0.5");
    keys.push_back(positive("q_min", "0.01"));
    keys.push_back(positive("q_max", "10000"));
    keys.push_back({"q_points", Kind::Integer, "61", "[3, 100000]", int_in(3, 100000)});
    return keys;
}

inline void run_impact_curve(Context& c) {
    const auto& s = c.settings;
    const auto model = growth_model(s);
    if (!(s.real("q_max") > s.real("q_min"))) throw config::ConfigError("key 'q_max': must exceed q_min", "q_max");
    const auto grid = numeric::log_grid(s.real("q_min"), s.real("q_max"),
                                        static_cast<std::size_t>(s.integer("q_points")));
    const auto pts = impact_curve(grid, model);
    std::ostringstream os;
    write_impact_csv(os, pts, model);
    c.out.write("impact_curve.csv", os.str());
    c.manifest.results.push_back({"model_exponent", csv::format_real(model.impact_exponent())});
    c.manifest.results.push_back({"fitted_exponent", csv::format_real(impact_exponent(pts))});
}

inline std::vector<KeySpec> impact_verify_keys() {
    auto keys = growth_model_keys("0.5");
    keys.push_back(positive("q_min", "0.1"));
    keys.push_back(positive("q_max", "100"));
    keys.push_back({"q_points", Kind::Integer, "13", "[2, 100000]", int_in(2, 100000)});
    keys.push_back(finite("sf_kappa", "-0.05"));
    keys.push_back(positive("sf_sigma", "1"));
    keys.push_back(positive("sf_p0", "1000"));
    keys.push_back(positive("sf_w0", "1"));
    keys.push_back(positive("sf_horizon", "1"));
    keys.push_back({"sf_finest_steps", Kind::Integer, "800", "[8, 1048576], divisible by 2^(levels-1)",
                    int_in(8, 1 << 20)});
    keys.push_back({"sf_levels", Kind::Integer, "4", "[2, 10]", int_in(2, 10)});
    keys.push_back(seed_key());
    return keys;
}

inline void run_impact_verify(Context& c) {
    const auto& s = c.settings;
    const auto model = growth_model(s);
    if (!(s.real("q_max") > s.real("q_min"))) throw config::ConfigError("key 'q_max': must exceed q_min", "q_max");
    const auto grid = numeric::log_grid(s.real("q_min"), s.real("q_max"),
                                        static_cast<std::size_t>(s.integer("q_points")));
    std::ostringstream os;
    os << "q,delta_p,q_numeric,rel_err\n";
    double worst = 0.0;
    for (double q : grid) {
        const double dp = optimal_impact_fou(q, model);
        const double qn = optimal_size_numeric(dp, model);
        const double err = std::abs(qn - q) / q;
        worst = std::max(worst, err);
        csv::write_row(os, {csv::format_real(q), csv::format_real(dp), csv::format_real(qn), csv::format_real(err)});
    }
    c.out.write("impact_verify.csv", os.str());
    c.manifest.results.push_back({"max_inversion_rel_err", csv::format_real(worst)});

    const FouParams fou{s.real("sf_kappa"), 0.0, s.real("sf_sigma"), 0.5};
    std::string meta;
    const auto rows = self_financing_refinement(fou, s.real("sf_p0"), s.real("sf_w0"), s.real("sf_horizon"),
                                                static_cast<std::size_t>(s.integer("sf_finest_steps")),
                                                static_cast<int>(s.integer("sf_levels")), c.seed, &meta);
    c.manifest.fbm_method = meta;
    std::ostringstream sf;
    sf << "dt,n_steps,p_terminal,wealth_simulated,wealth_closed_form,rel_err\n";
    for (const auto& r : rows)
        csv::write_row(sf, {csv::format_real(r.dt), std::to_string(r.n_steps), csv::format_real(r.p_terminal),
                            csv::format_real(r.wealth_simulated), csv::format_real(r.wealth_closed_form),
                            csv::format_real(r.rel_err)});
    c.out.write("self_financing.csv", sf.str());
    c.manifest.results.push_back({"finest_wealth_rel_err", csv::format_real(rows.back().rel_err)});
}

inline std::vector<KeySpec> cpmm_compare_keys() {
    return {positive("x0", "100"),
            positive("y0", "100"),
            {"u_max", Kind::Real, "0.1", "(0, 1)", real_in(0, 1)},
            {"u_points", Kind::Integer, "10", "[1, 100000]", int_in(1, 100000)}};
}

inline void run_cpmm_compare(Context& c) {
    const auto& s = c.settings;
    const PoolState start(s.real("x0"), s.real("y0"));
    const auto points = static_cast<std::size_t>(s.integer("u_points"));
    const double u_max = s.real("u_max");

    std::ostringstream cmp;
    cmp << "u,dx,exact,linear,abs_err,bound\n";
    for (std::size_t i = 1; i <= points; ++i) {
        const double u = u_max * static_cast<double>(i) / static_cast<double>(points);
        const double dx = u * start.reserve_x();
        const double exact = exact_relative_impact(start, dx);
        const double linear = linearized_relative_impact(start, dx);
        csv::write_row(cmp, {csv::format_real(u), csv::format_real(dx), csv::format_real(exact),
                             csv::format_real(linear), csv::format_real(std::abs(exact - linear)),
                             csv::format_real(3.5 * u * u)});
    }
    c.out.write("impact_compare.csv", cmp.str());

    // Step-wise crawl of equal X sales, then one swap returning all Y.
    PoolTrace trace(start);
    const double step = u_max * start.reserve_x() / static_cast<double>(points);
    double y_received = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const auto r = swap_x_for_y(trace.current(), step);
        y_received += r.amount_out;
        trace.record("swap_x_for_y", r.pool);
    }
    const auto back = swap_y_for_x(trace.current(), y_received);
    trace.record("swap_y_for_x", back.pool);
    std::ostringstream tr;
    trace.write_csv(tr);
    c.out.write("pool_trace.csv", tr.str());
    c.manifest.results.push_back({"round_trip_x_rel_err",
                                  csv::format_real(std::abs(back.pool.reserve_x() - start.reserve_x()) /
                                                   start.reserve_x())});
}

inline std::vector<KeySpec> cycle_run_keys() {
    return {positive("x0", "100"),
            positive("y0", "100"),
            positive("alpha", "10"),
            {"m", Kind::Real, "9", "[0, inf)", real_in(0, kInf, false)},
            positive("sigma_amt", "1"),
            {"stage3", Kind::Text, "exact", "{exact, printed}", one_of({"exact", "printed"})},
            {"removal", Kind::Text, "closing", "{closing, proportional}", one_of({"closing", "proportional"})},
            {"g_amt", Kind::Real, "0", "[0, inf)", real_in(0, kInf, false)},
            {"h_amt", Kind::Real, "0", "[0, inf)", real_in(0, kInf, false)}};
}

inline void run_cycle_run(Context& c) {
    const auto& s = c.settings;
    CycleConfig cfg{s.real("x0"), s.real("y0"), s.real("alpha"), s.real("m"), s.real("sigma_amt"), std::nullopt};
    if (!(cfg.alpha < cfg.x0)) throw config::ConfigError("key 'alpha': must be below x0", "alpha");
    if (s.text("removal") == "proportional") cfg.removal = TokenPair{s.real("g_amt"), s.real("h_amt")};
    const auto formula = s.text("stage3") == "exact" ? Stage3Formula::ExactInvariant : Stage3Formula::Printed;
    const auto report = run_cycle(cfg, formula);
    std::ostringstream os;
    write_cycle_csv(os, report);
    c.out.write("cycle_report.csv", os.str());
    c.manifest.results.push_back({"removal_g", csv::format_real(report.removal.x)});
    c.manifest.results.push_back({"removal_h", csv::format_real(report.removal.y)});
    c.manifest.results.push_back({"work_analogue", csv::format_real(report.work_analogue)});
}

inline std::vector<KeySpec> catbond_optimize_keys() {
    return {{"q", Kind::Real, "0.2", "[0, 1)", real_in(0, 1, false)}, positive("r", "1")};
}

inline void run_catbond_optimize(Context& c) {
    const BondSpec bond{c.settings.real("q"), c.settings.real("r")};
    const std::array rows{sweep_row(bond)};
    std::ostringstream os;
    write_sweep_csv(os, rows);
    c.out.write("catbond_optimize.csv", os.str());

    const auto series = two_bond_fraction_series(bond);
    const auto brute = two_bond_fraction_numeric(bond);
    std::ostringstream two;
    two << "q,r,f_series,f_numeric,abs_err,series_clamped\n";
    csv::write_row(two, {csv::format_real(bond.default_prob_q), csv::format_real(bond.return_r),
                         csv::format_real(series.fraction), csv::format_real(brute.fraction),
                         csv::format_real(std::abs(series.fraction - brute.fraction)),
                         series.clamped ? "true" : "false"});
    c.out.write("two_bond.csv", two.str());
    const auto analytic = single_bond_fraction(bond);
    c.manifest.results.push_back({"f_analytic", csv::format_real(analytic.fraction)});
    c.manifest.results.push_back({"growth_analytic", csv::format_real(analytic.growth)});
    c.manifest.results.push_back({"clamped", analytic.clamped ? "true" : "false"});
}

inline std::vector<KeySpec> catbond_sensitivity_keys() {
    return {{"q_grid", Kind::RealList, "0.01,0.1,0.3", "list in (0, 1)", list_in(0, 1)},
            {"r_grid", Kind::RealList, "0.1,0.5,1,2", "list in (0, inf)", list_in(0, kInf)},
            {"delta_r_grid", Kind::RealList, "0.01,0.001", "list in (-inf, inf)", list_in(-kInf, kInf)}};
}

inline void run_catbond_sensitivity(Context& c) {
    const auto& s = c.settings;
    std::vector<SweepRow> rows;
    std::ostringstream iso;
    iso << "q,r,delta_r,delta_exact,delta_first_order,delta_geometric,f_before,f_after\n";
    double worst = 0.0;
    for (double q : s.reals("q_grid")) {
        for (double r : s.reals("r_grid")) {
            const BondSpec bond{q, r};
            rows.push_back(sweep_row(bond));
            worst = std::max(worst, rows.back().abs_err);
            for (double dr : s.reals("delta_r_grid")) {
                if (!(r + dr > 0.0)) continue;
                const auto shift = iso_fraction_shift(bond, dr);
                const double before = single_bond_fraction(bond).fraction;
                const double q_after = q + shift.exact;
                const double after = q_after < 1.0 ? single_bond_fraction({q_after, r + dr}).fraction : 0.0;
                using csv::format_real;
                csv::write_row(iso, {format_real(q), format_real(r), format_real(dr), format_real(shift.exact),
                                     format_real(shift.first_order), format_real(shift.geometric_series),
                                     format_real(before), format_real(after)});
            }
        }
    }
    std::ostringstream os;
    write_sweep_csv(os, rows);
    c.out.write("catbond_sweep.csv", os.str());
    c.out.write("iso_fraction.csv", iso.str());
    c.manifest.results.push_back({"max_abs_err", csv::format_real(worst)});
}

struct Experiment {
    std::string_view name;
    std::vector<KeySpec> (*keys)();
    void (*run)(Context&);
};

inline const std::array<Experiment, 7>& registry() {
    static const std::array<Experiment, 7> r{{
        {"fbm-gen", fbm_gen_keys, run_fbm_gen},
        {"impact-curve", impact_curve_keys, run_impact_curve},
        {"impact-verify", impact_verify_keys, run_impact_verify},
        {"cpmm-compare", cpmm_compare_keys, run_cpmm_compare},
        {"cycle-run", cycle_run_keys, run_cycle_run},
        {"catbond-optimize", catbond_optimize_keys, run_catbond_optimize},
        {"catbond-sensitivity", catbond_sensitivity_keys, run_catbond_sensitivity},
    }};
    return r;
}

}  // namespace detail

inline std::vector<std::string> experiment_names() {
    std::vector<std::string> names;
    for (const auto& e : detail::registry()) names.emplace_back(e.name);
    return names;
}

inline std::vector<config::KeySpec> experiment_keys(std::string_view name) {
    for (const auto& e : detail::registry())
        if (e.name == name) return e.keys();
    throw config::ConfigError("unknown experiment '" + std::string(name) + "'");
}

/**
 * Runs `name` with defaults < file_values < overrides (< seed, when given),
 * writes outputs and manifest.txt into out_dir (created if missing) and
 * returns the manifest. Throws config::ConfigError, IoError, DomainError or
 * NumericalError.
 */
inline RunManifest run_experiment(std::string_view name, const config::ConfigMap& file_values,
                                  const config::ConfigMap& overrides, std::optional<std::uint64_t> seed,
                                  const std::filesystem::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    const auto* exp = [&]() -> const detail::Experiment* {
        for (const auto& e : detail::registry())
            if (e.name == name) return &e;
        return nullptr;
    }();
    if (!exp) throw config::ConfigError("unknown experiment '" + std::string(name) + "'");

    auto schema = exp->keys();
    config::ConfigMap layered = overrides;
    const bool has_seed_key = std::any_of(schema.begin(), schema.end(), [](const auto& k) { return k.name == "seed"; });
    if (seed && has_seed_key) layered["seed"] = static_cast<std::int64_t>(*seed);
    const auto settings = config::resolve(schema, file_values, layered);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("output directory '" + out_dir.string() + "' is not usable");

    RunManifest manifest;
    manifest.experiment = std::string(name);
    manifest.config = settings.values();
    manifest.seed = has_seed_key ? static_cast<std::uint64_t>(settings.integer("seed")) : seed.value_or(0);

    detail::Outputs outputs(out_dir);
    detail::Context ctx{settings, outputs, manifest, manifest.seed};
    exp->run(ctx);
    manifest.outputs = outputs.files();
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream mf(out_dir / "manifest.txt", std::ios::binary | std::ios::trunc);
    if (!mf) throw IoError("cannot write manifest in '" + out_dir.string() + "'");
    manifest.write(mf);
    if (!mf) throw IoError("failed writing manifest in '" + out_dir.string() + "'");
    return manifest;
}

}  // namespace autoliq::experiment
