#ifndef PAM_SPECTRAL_HPP
#define PAM_SPECTRAL_HPP

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "rng.hpp"

namespace pam {

enum Label { OLD = 0, YOUNG = 1 };

struct SpectralSummary {
    int m = 1;
    double delta = 0.0;
    double chi = 0.5;
    double tau_e = 3.0;
    std::array<std::array<double, 2>, 2> c{}; // c[s][t], s,t in {OLD, YOUNG}
    double lambda_m = 0.0;                    // Perron root of c
    std::array<double, 2> eigvec{};           // right eigenvector p of c
    double r_full = std::numeric_limits<double>::infinity();
    double pi_c = 0.0;
    double beta_c = 0.0;
    bool conjectured = false; // m = 1, delta <= 0: zero threshold is believed, not proved
};

inline std::array<std::array<double, 2>, 2> c_matrix(int m, double delta) {
    const double den = 2.0 * m + delta;
    const double coo = m * (m + delta) / den;
    return {{{coo, m * (m + 1.0 + delta) / den}, {(m - 1.0) * (m + delta) / den, coo}}};
}

inline SpectralSummary spectral_summary(int m, double delta) {
    if (m < 1) throw ParameterError("spectral: m must be >= 1");
    if (!(delta > -m)) throw ParameterError("spectral: delta must exceed -m");
    SpectralSummary s;
    s.m = m;
    s.delta = delta;
    s.chi = (m + delta) / (2.0 * m + delta);
    s.tau_e = 3.0 + delta / m;
    s.c = c_matrix(m, delta);
    const double cross = s.c[OLD][YOUNG] * s.c[YOUNG][OLD];
    s.lambda_m = s.c[OLD][OLD] + std::sqrt(cross);
    s.eigvec = {std::sqrt(s.c[OLD][YOUNG]), std::sqrt(s.c[YOUNG][OLD])};
    if (delta > 0.0) {
        s.r_full = 2.0 * (m * (m + delta) + std::sqrt(m * (m - 1.0) * (m + delta) * (m + 1.0 + delta))) / delta;
        s.pi_c = 1.0 / s.r_full;
        s.beta_c = std::atanh(s.pi_c);
    } else {
        s.conjectured = (m == 1);
    }
    return s;
}

inline double pi_critical(int m, double delta) { return spectral_summary(m, delta).pi_c; }

inline double beta_critical(int m, double delta) { return spectral_summary(m, delta).beta_c; }

struct TypedAge {
    double age;
    Label label;
};

// kernel of the mean offspring operator
inline double kernel(int m, double delta, TypedAge x, TypedAge y) {
    const auto c = c_matrix(m, delta);
    const double chi = (m + delta) / (2.0 * m + delta);
    const bool hit = (y.label == OLD && x.age > y.age) || (y.label == YOUNG && x.age < y.age);
    if (!hit) return 0.0;
    const double hi = std::max(x.age, y.age), lo = std::min(x.age, y.age);
    return c[x.label][y.label] / (std::pow(hi, chi) * std::pow(lo, 1.0 - chi));
}

struct TruncatedSpectral {
    double b = 1.0;
    double q = 0.0;
    std::array<std::array<double, 2>, 2> mb{};
    double lambda_b = 0.0;
    double r_b = 0.0;
    std::array<double, 2> u{};          // right eigenvector of mb
    std::array<std::array<double, 2>, 2> p{}; // label transition matrix
    std::array<double, 2> stationary{}; // upsilon
};

inline TruncatedSpectral truncated_spectral(int m, double delta, double b) {
    if (!(delta > 0.0)) throw ParameterError("truncated spectral: delta must be positive");
    if (!(b >= 1.0)) throw ParameterError("truncated spectral: b must be >= 1");
    const auto c = c_matrix(m, delta);
    const double chi = (m + delta) / (2.0 * m + delta);
    TruncatedSpectral t;
    t.b = b;
    t.q = 1.0 - std::pow(b, 0.5 - chi);
    const double cc = c[OLD][OLD], coy = c[OLD][YOUNG], cyo = c[YOUNG][OLD];
    t.mb = {{{cc, coy * t.q}, {cyo, cc * t.q}}};
    const double root = std::sqrt(std::pow((1.0 - t.q) * cc, 2) + 4.0 * t.q * coy * cyo);
    t.lambda_b = 0.5 * ((1.0 + t.q) * cc + root);
    t.r_b = 2.0 * t.lambda_b / (2.0 * chi - 1.0);
    // lambda_b - cc without cancellation; exactly 0 when cyo = 0 (m = 1)
    const double excess = root > 0.0 ? 2.0 * t.q * coy * cyo / ((1.0 - t.q) * cc + root) : 0.0;
    if (t.mb[OLD][YOUNG] > 0.0) t.u = {t.mb[OLD][YOUNG], excess};
    else t.u = {t.lambda_b - t.mb[YOUNG][YOUNG], t.mb[YOUNG][OLD]};
    if (t.u[OLD] == 0.0 && t.u[YOUNG] == 0.0) t.u = {1.0, 0.0};
    for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r)
            t.p[s][r] = t.u[s] > 0.0 ? t.mb[s][r] * t.u[r] / (t.lambda_b * t.u[s]) : (s == r ? 1.0 : 0.0);
    // rows sum to 1 in exact arithmetic
    for (auto& row : t.p) {
        const double z = row[OLD] + row[YOUNG];
        row[OLD] /= z;
        row[YOUNG] /= z;
    }
    // theta_O / theta_Y = p_YO / p_OY
    const double a = t.p[YOUNG][OLD], d = t.p[OLD][YOUNG];
    if (a + d > 0.0) t.stationary = {a / (a + d), d / (a + d)};
    else t.stationary = {1.0, 0.0};
    return t;
}

// E[log R | label] for the spine walk
inline double expected_log_ratio(Label label, double chi, double b) {
    const double k = chi - 0.5;
    if (label == OLD) return -1.0 / k;
    const double c0 = std::pow(b, -k);
    return ((1.0 - c0) / k - c0 * std::log(b)) / (1.0 - c0);
}

struct SpineStep {
    Label label;
    double log_increment;
};

struct SpineWalk {
    std::vector<SpineStep> steps;
    double mean_log_increment = 0.0; // log X_n / n
    double drift = 0.0;              // closed-form limit
    std::array<double, 2> label_frequency{};
};

inline SpineWalk spine_walk(int m, double delta, double b, long steps, Stream& s, bool keep_steps = false) {
    const auto t = truncated_spectral(m, delta, b);
    const double chi = (m + delta) / (2.0 * m + delta);
    const double k = chi - 0.5;
    const double c0 = std::pow(b, -k);
    SpineWalk w;
    w.drift = t.stationary[OLD] * expected_log_ratio(OLD, chi, b) + t.stationary[YOUNG] * expected_log_ratio(YOUNG, chi, b);
    Label cur = s.uniform() < t.stationary[OLD] ? OLD : YOUNG;
    double total = 0.0;
    long counts[2] = {0, 0};
    if (keep_steps) w.steps.reserve(static_cast<std::size_t>(steps));
    for (long i = 0; i < steps; ++i) {
        cur = s.uniform() < t.p[cur][OLD] ? OLD : YOUNG;
        double lr;
        if (cur == OLD) lr = std::log(s.uniform()) / k;
        else lr = -std::log(c0 + s.uniform() * (1.0 - c0)) / k;
        total += lr;
        ++counts[cur];
        if (keep_steps) w.steps.push_back({cur, lr});
    }
    w.mean_log_increment = steps > 0 ? total / static_cast<double>(steps) : 0.0;
    if (steps > 0)
        w.label_frequency = {counts[OLD] / static_cast<double>(steps), counts[YOUNG] / static_cast<double>(steps)};
    return w;
}

// Mean offspring of the single-type elbow-children process pruned at age h
// (delta <= 0). At delta = 0 this is 2 c_oy c_yo pi^2 log(1/h), the limit of
// the delta < 0 expression as chi -> 1/2.
inline double elbow_mean_offspring(int m, double delta, double pi, double h) {
    if (m < 2) throw ParameterError("elbow: m must be >= 2");
    if (delta > 0.0 || !(delta > -m)) throw ParameterError("elbow: delta must lie in (-m, 0]");
    if (!(h > 0.0 && h <= 1.0)) throw ParameterError("elbow: h must lie in (0, 1]");
    const auto c = c_matrix(m, delta);
    const double chi = (m + delta) / (2.0 * m + delta);
    const double k = c[OLD][YOUNG] * c[YOUNG][OLD] * pi * pi;
    if (delta == 0.0) return 2.0 * k * std::log(1.0 / h);
    return k * std::pow(h, 2.0 * chi - 1.0) * (1.0 - std::pow(h, 1.0 - 2.0 * chi)) / (chi * (1.0 - 2.0 * chi));
}

// largest h <= 1/2 with mean offspring >= 1, or 0 if none (pi = 0)
inline double elbow_threshold(int m, double delta, double pi) {
    if (!(pi > 0.0)) return 0.0;
    if (elbow_mean_offspring(m, delta, pi, 0.5) >= 1.0) return 0.5;
    double lo = 0.0, hi = 0.5;
    // mean is decreasing in h and diverges as h -> 0; bracket on a log scale
    double probe = 0.25;
    while (elbow_mean_offspring(m, delta, pi, probe) < 1.0) {
        hi = probe;
        probe *= probe;
        if (probe < std::numeric_limits<double>::min()) return 0.0;
    }
    lo = probe;
    for (int i = 0; i < 200; ++i) {
        double mid = std::sqrt(lo * hi);
        if (elbow_mean_offspring(m, delta, pi, mid) >= 1.0) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return lo;
}

} // namespace pam

#endif
