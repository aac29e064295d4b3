#ifndef PAM_STATS_HPP
#define PAM_STATS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace pam::stats {

struct Summary {
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double stderr_ = 0.0;
    std::size_t count = 0;
};

// Welford
inline Summary summarize(const std::vector<double>& xs) {
    Summary s;
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double x : xs) {
        ++k;
        double dx = x - mean;
        mean += dx / static_cast<double>(k);
        m2 += dx * (x - mean);
    }
    s.count = k;
    s.mean = mean;
    s.variance = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
    s.stderr_ = k > 0 ? std::sqrt(s.variance / static_cast<double>(k)) : 0.0;
    return s;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// ordinary least squares y = intercept + slope x
inline LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols: need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

struct ChiSquare {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

// Goodness of fit of counts against probabilities. Cells with expected count
// below min_expected are pooled into one cell.
inline ChiSquare chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                                double min_expected = 5.0) {
    if (observed.size() != probs.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
    const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
    double stat = 0.0, pool_o = 0.0, pool_e = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = probs[i] * n;
        if (e < min_expected) {
            pool_o += observed[i];
            pool_e += e;
            continue;
        }
        stat += (observed[i] - e) * (observed[i] - e) / e;
        ++cells;
    }
    if (pool_e > 0.0) {
        if (pool_e >= 1e-12) stat += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
        else if (pool_o > 0) stat = std::numeric_limits<double>::infinity();
        ++cells;
    }
    ChiSquare r;
    r.statistic = stat;
    r.dof = std::max(1, cells - 1);
    if (!std::isfinite(stat)) r.p_value = 0.0;
    else r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), stat));
    return r;
}

// Two-sample homogeneity test on count vectors.
inline ChiSquare chi_square_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                       double min_expected = 5.0) {
    if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
    const double na = std::accumulate(a.begin(), a.end(), 0.0);
    const double nb = std::accumulate(b.begin(), b.end(), 0.0);
    double stat = 0.0, pa = 0.0, pb = 0.0;
    int cells = 0;
    auto add = [&](double x, double y) {
        double t = x + y;
        double ea = t * na / (na + nb), eb = t * nb / (na + nb);
        stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
        ++cells;
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] + b[i];
        if (t * std::min(na, nb) / (na + nb) < min_expected) {
            pa += a[i];
            pb += b[i];
            continue;
        }
        add(a[i], b[i]);
    }
    if (pa + pb > 0.0) add(pa, pb);
    ChiSquare r;
    r.statistic = stat;
    r.dof = std::max(1, cells - 1);
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), stat));
    return r;
}

// sup |F_n - F| for a sample against a continuous CDF
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

} // namespace pam::stats

#endif
