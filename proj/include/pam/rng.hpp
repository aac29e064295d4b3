#ifndef PAM_RNG_HPP
#define PAM_RNG_HPP

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace pam {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// A stream is keyed by (base_seed, stream_id) only, so replicate k gets the
// same numbers no matter which thread runs it. The engine is mt19937_64 and
// every sampler below is written out by hand: std:: distributions are
// implementation defined and would break cross-platform reproducibility.
class Stream {
public:
    Stream(std::uint64_t base_seed, std::uint64_t stream_id)
        : base_(base_seed), id_(stream_id),
          eng_(splitmix64(base_seed ^ splitmix64(stream_id ^ 0x5851f42d4c957f2dULL))) {}

    std::uint64_t base_seed() const { return base_; }
    std::uint64_t stream_id() const { return id_; }

    // child stream, e.g. per replicate of a derived experiment
    Stream split(std::uint64_t sub) const {
        return Stream(splitmix64(base_ ^ 0xd1b54a32d192ed03ULL) ^ id_, sub);
    }

    std::uint64_t bits() { return eng_(); }

    // uniform on the open interval (0,1)
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

    // uniform integer in [0, k)
    std::uint64_t below(std::uint64_t k) {
        // Lemire's multiply-shift with rejection
        unsigned __int128 m = static_cast<unsigned __int128>(eng_()) * k;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < k) {
            std::uint64_t t = (0 - k) % k;
            while (lo < t) {
                m = static_cast<unsigned __int128>(eng_()) * k;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    std::uint64_t base_, id_;
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline double open_unit(double x) {
    if (!(x > 0.0)) return std::numeric_limits<double>::denorm_min();
    if (!(x < 1.0)) return std::nextafter(1.0, 0.0);
    return x;
}

// Marsaglia & Tsang; shape < 1 via the U^(1/shape) boost.
inline double sample_gamma(Stream& s, double shape, double rate = 1.0) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape))
        throw ParameterError("gamma: shape and rate must be positive");
    if (shape < 1.0) {
        double g = sample_gamma(s, shape + 1.0, 1.0);
        double x = g * std::pow(s.uniform(), 1.0 / shape);
        if (!(x > 0.0)) x = std::numeric_limits<double>::denorm_min();
        return x / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = s.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = s.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

inline double sample_beta(Stream& s, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("beta: parameters must be positive");
    double x = sample_gamma(s, a);
    double y = sample_gamma(s, b);
    return open_unit(x / (x + y));
}

inline double sample_exponential(Stream& s, double rate = 1.0) {
    return -std::log(s.uniform()) / rate;
}

// Poisson: multiplication for small means, PTRS (Hoermann 1993) otherwise.
inline std::int64_t sample_poisson(Stream& s, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw ParameterError("poisson: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        double prod = s.uniform();
        std::int64_t k = 0;
        while (prod > limit) {
            prod *= s.uniform();
            ++k;
        }
        return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = s.uniform() - 0.5;
        double v = s.uniform();
        double us = 0.5 - std::fabs(u);
        auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= vr) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + static_cast<double>(k) * loglam - std::lgamma(static_cast<double>(k) + 1.0))
            return k;
    }
}

inline std::int64_t sample_mixed_poisson(Stream& s, double intensity) { return sample_poisson(s, intensity); }

} // namespace pam

#endif
