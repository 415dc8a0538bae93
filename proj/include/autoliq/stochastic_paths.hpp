#pragma once

// Seeded fractional Brownian motion and (fractional) Ornstein-Uhlenbeck
// paths on a uniform time grid.
//
// Random numbers: one std::mt19937_64 stream per path, seeded with the path
// seed (batch runs use base_seed + path_index). Standard normals come from
// the Box-Muller transform, u1 = (k + 1) / 2^53 and u2 = k' / 2^53 with k, k'
// the top 53 bits of consecutive engine outputs; both normals of each pair
// are used, cosine first.

#include <autoliq/csv.hpp>
#include <autoliq/error.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace autoliq {

/// Parameters of dP = kappa (P - level) dt + sigma dB^H.
/// The drift is used exactly as written: kappa < 0 reverts towards `level`,
/// kappa > 0 pushes away from it.
struct FouParams {
    double kappa = 0.0;
    double level = 0.0;
    double sigma = 1.0;
    double hurst = 0.5;

    void validate() const {
        detail::require(std::isfinite(kappa), "FouParams: kappa must be finite");
        detail::require(std::isfinite(level), "FouParams: level must be finite");
        detail::require(std::isfinite(sigma) && sigma >= 0.0, "FouParams: sigma must be >= 0");
        detail::require(hurst > 0.0 && hurst < 1.0, "FouParams: hurst must lie in (0, 1)");
    }
};

struct SamplePath {
    std::vector<double> times;
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string meta;
};

enum class FbmMethod {
    Auto,         ///< Davies-Harte, Cholesky if the embedding is not PSD.
    DaviesHarte,  ///< Davies-Harte only; GenerationError if not PSD.
    Cholesky,
};

inline const char* to_string(FbmMethod m) {
    switch (m) {
        case FbmMethod::Auto: return "auto";
        case FbmMethod::DaviesHarte: return "davies-harte";
        case FbmMethod::Cholesky: return "cholesky";
    }
    return "?";
}

inline constexpr const char* kPrngLabel = "mt19937_64";
inline constexpr const char* kNormalLabel = "box-muller";

/// Cov(B^H_s, B^H_t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2.
inline double fbm_covariance(double s, double t, double hurst) {
    detail::require(hurst > 0.0 && hurst < 1.0, "fbm_covariance: hurst must lie in (0, 1)");
    detail::require(s >= 0.0 && t >= 0.0, "fbm_covariance: times must be non-negative");
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

/// Autocovariance of unit-spaced fractional Gaussian noise at integer lag.
inline double fgn_autocovariance(std::size_t lag, double hurst) {
    const double k = static_cast<double>(lag);
    const double h2 = 2.0 * hurst;
    if (lag == 0) return 1.0;
    return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(k - 1.0, h2));
}

/// Standard normal stream (see file comment for the exact transform).
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * scale;
        const double u2 = static_cast<double>(engine_() >> 11) * scale;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/**
 * Exact fBM sampler for a fixed grid. The spectral factorisation (or
 * Cholesky factor) is computed once; `path(seed)` can then be called
 * concurrently from several threads.
 */
class FbmGenerator {
public:
    FbmGenerator(std::size_t n_steps, double dt, double hurst, FbmMethod method = FbmMethod::Auto)
        : n_(n_steps), dt_(dt), hurst_(hurst) {
        detail::require(n_steps >= 1, "generate_fbm: n_steps must be >= 1");
        detail::require(dt > 0.0 && std::isfinite(dt), "generate_fbm: dt must be > 0");
        detail::require(hurst > 0.0 && hurst < 1.0, "generate_fbm: hurst must lie in (0, 1)");

        if (method != FbmMethod::Cholesky) {
            if (init_davies_harte()) {
                used_ = FbmMethod::DaviesHarte;
                return;
            }
            if (method == FbmMethod::DaviesHarte)
                throw GenerationError("davies-harte",
                                      "circulant embedding has a negative eigenvalue for n=" +
                                          std::to_string(n_) + ", H=" + std::to_string(hurst_));
            fell_back_ = true;
        }
        init_cholesky();
        used_ = FbmMethod::Cholesky;
    }

    std::size_t n_steps() const noexcept { return n_; }
    double dt() const noexcept { return dt_; }
    double hurst() const noexcept { return hurst_; }
    FbmMethod method() const noexcept { return used_; }
    bool fell_back() const noexcept { return fell_back_; }

    /// "davies-harte", "cholesky" or "cholesky(fallback)".
    std::string method_label() const {
        std::string m = to_string(used_);
        if (fell_back_) m += "(fallback)";
        return m;
    }

    std::string meta() const {
        std::string m = "fbm=" + method_label();
        m += ";prng=";
        m += kPrngLabel;
        m += ";normal=";
        m += kNormalLabel;
        return m;
    }

    /// n_steps increments B(t_{i+1}) - B(t_i).
    std::vector<double> increments(std::uint64_t seed) const {
        GaussianStream rng(seed);
        std::vector<double> unit = used_ == FbmMethod::DaviesHarte ? sample_davies_harte(rng)
                                                                   : sample_cholesky(rng);
        const double scale = std::pow(dt_, hurst_);
        for (double& x : unit) x *= scale;
        return unit;
    }

    SamplePath path(std::uint64_t seed) const {
        const auto inc = increments(seed);
        SamplePath p;
        p.seed = seed;
        p.meta = meta();
        p.times.resize(n_ + 1);
        p.values.resize(n_ + 1);
        p.times[0] = 0.0;
        p.values[0] = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            p.times[i + 1] = static_cast<double>(i + 1) * dt_;
            p.values[i + 1] = p.values[i] + inc[i];
        }
        return p;
    }

private:
    // Circulant of size 2n whose first row embeds the fGn autocovariance.
    bool init_davies_harte() {
        const std::size_t m = 2 * n_;
        std::vector<double> row(m);
        for (std::size_t j = 0; j <= n_; ++j) row[j] = fgn_autocovariance(j, hurst_);
        for (std::size_t j = n_ + 1; j < m; ++j) row[j] = row[m - j];

        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> spectrum;
        fft.fwd(spectrum, row);

        double largest = 0.0;
        for (const auto& c : spectrum) largest = std::max(largest, c.real());
        const double tol = 1e-12 * largest;
        eigen_sqrt_.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            double lambda = spectrum[k].real();
            if (lambda < -tol) return false;
            lambda = std::max(lambda, 0.0);
            eigen_sqrt_[k] = std::sqrt(lambda / static_cast<double>(m));
        }
        return true;
    }

    void init_cholesky() {
        Eigen::MatrixXd cov(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                cov(i, j) = fgn_autocovariance(i > j ? i - j : j - i, hurst_);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw GenerationError("cholesky", "increment covariance is not positive definite");
        chol_ = llt.matrixL();
    }

    // w_0, w_n real; w_k, w_{2n-k} conjugate pairs with E|w_k|^2 = lambda_k / 2n.
    std::vector<double> sample_davies_harte(GaussianStream& rng) const {
        const std::size_t m = 2 * n_;
        std::vector<std::complex<double>> w(m);
        w[0] = eigen_sqrt_[0] * rng.next();
        w[n_] = eigen_sqrt_[n_] * rng.next();
        for (std::size_t k = 1; k < n_; ++k) {
            const double a = rng.next(), b = rng.next();
            const double s = eigen_sqrt_[k] * std::numbers::sqrt2 / 2.0;
            w[k] = {s * a, s * b};
            w[m - k] = std::conj(w[k]);
        }
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> out;
        fft.fwd(out, w);
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = out[i].real();
        return x;
    }

    std::vector<double> sample_cholesky(GaussianStream& rng) const {
        Eigen::VectorXd z(n_);
        for (std::size_t i = 0; i < n_; ++i) z[i] = rng.next();
        const Eigen::VectorXd x = chol_.triangularView<Eigen::Lower>() * z;
        return std::vector<double>(x.data(), x.data() + x.size());
    }

    std::size_t n_;
    double dt_;
    double hurst_;
    FbmMethod used_ = FbmMethod::DaviesHarte;
    bool fell_back_ = false;
    std::vector<double> eigen_sqrt_;
    Eigen::MatrixXd chol_;
};

/// fBM on t_i = i * dt, i = 0..n_steps, anchored at zero.
inline SamplePath generate_fbm(std::size_t n_steps, double dt, double hurst, std::uint64_t seed,
                               FbmMethod method = FbmMethod::Auto) {
    return FbmGenerator(n_steps, dt, hurst, method).path(seed);
}

/// Euler scheme driven by an existing fBM path (its increments are used
/// verbatim, so several schemes can share one driver).
inline SamplePath simulate_fou_on_driver(const FouParams& params, double p0, const SamplePath& driver) {
    params.validate();
    detail::require(std::isfinite(p0), "simulate_fou: p0 must be finite");
    detail::require(driver.values.size() >= 2 && driver.times.size() == driver.values.size(),
                    "simulate_fou: driver path needs at least two aligned points");
    SamplePath p;
    p.times = driver.times;
    p.seed = driver.seed;
    p.meta = driver.meta + ";scheme=euler";
    p.values.resize(driver.values.size());
    p.values[0] = p0;
    for (std::size_t i = 0; i + 1 < driver.values.size(); ++i) {
        const double dt = driver.times[i + 1] - driver.times[i];
        const double db = driver.values[i + 1] - driver.values[i];
        const double prev = p.values[i];
        p.values[i + 1] = prev + params.kappa * (prev - params.level) * dt + params.sigma * db;
    }
    return p;
}

inline SamplePath simulate_fou(const FouParams& params, double p0, std::size_t n_steps, double dt,
                               std::uint64_t seed, FbmMethod method = FbmMethod::Auto) {
    params.validate();
    return simulate_fou_on_driver(params, p0, generate_fbm(n_steps, dt, params.hurst, seed, method));
}

/// Keep every `factor`-th point (a Brownian path observed on a coarser grid).
inline SamplePath coarsen(const SamplePath& path, std::size_t factor) {
    detail::require(factor >= 1, "coarsen: factor must be >= 1");
    detail::require(path.values.size() >= 1 && (path.values.size() - 1) % factor == 0,
                    "coarsen: step count must be divisible by factor");
    SamplePath out;
    out.seed = path.seed;
    out.meta = path.meta;
    for (std::size_t i = 0; i < path.values.size(); i += factor) {
        out.times.push_back(path.times[i]);
        out.values.push_back(path.values[i]);
    }
    return out;
}

/// CSV: header `t,value`, 17 significant digits, LF endings.
inline void write_path_csv(std::ostream& os, const SamplePath& path) {
    os << "t,value\n";
    for (std::size_t i = 0; i < path.values.size(); ++i)
        csv::write_row(os, {csv::format_real(path.times[i]), csv::format_real(path.values[i])});
}

}  // namespace autoliq
