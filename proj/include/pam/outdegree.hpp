#ifndef PAM_OUTDEGREE_HPP
#define PAM_OUTDEGREE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rng.hpp"

namespace pam {

namespace detail {

// inversion sampler over k = first, first+1, ... from unnormalised weights
class TableSampler {
public:
    TableSampler() = default;
    TableSampler(long first, const std::vector<double>& w) : first_(first), cdf_(w.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i];
            cdf_[i] = acc;
        }
        for (auto& c : cdf_) c /= acc;
    }
    long sample(Stream& s) const {
        double u = s.uniform();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) --it;
        return first_ + static_cast<long>(it - cdf_.begin());
    }

private:
    long first_ = 1;
    std::vector<double> cdf_;
};

} // namespace detail

class SizeBiased;

// Law of the out-degree M. Built-ins: fixed(m), shifted geometric on {1,2,...}
// with success probability p, and zeta(s) truncated to {1..cap}.
class OutDegreeLaw {
public:
    enum class Kind { Fixed, Geometric, Zeta };

    static OutDegreeLaw fixed(int m) {
        if (m < 1) throw ParameterError("fixed out-degree must be >= 1");
        OutDegreeLaw l;
        l.kind_ = Kind::Fixed;
        l.m_ = m;
        return l;
    }
    static OutDegreeLaw geometric(double p) {
        if (!(p > 0.0 && p <= 1.0)) throw ParameterError("geometric success probability must be in (0,1]");
        OutDegreeLaw l;
        l.kind_ = Kind::Geometric;
        l.p_ = p;
        return l;
    }
    static OutDegreeLaw zeta(double s, long cap) {
        if (!(s > 1.0) || cap < 1) throw ParameterError("zeta law needs s > 1 and cap >= 1");
        OutDegreeLaw l;
        l.kind_ = Kind::Zeta;
        l.s_ = s;
        l.cap_ = cap;
        std::vector<double> w(static_cast<std::size_t>(cap));
        double z = 0.0, zm = 0.0;
        for (long k = 1; k <= cap; ++k) {
            w[k - 1] = std::pow(static_cast<double>(k), -s);
            z += w[k - 1];
            zm += static_cast<double>(k) * w[k - 1];
        }
        l.norm_ = z;
        l.zeta_mean_ = zm / z;
        l.table_ = std::make_shared<detail::TableSampler>(1, w);
        return l;
    }

    // "fixed:2", "geometric:0.5", "zeta:3.5:1000000"
    static OutDegreeLaw parse(const std::string& text) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
        try {
            if (parts.size() == 1) return fixed(std::stoi(parts[0]));
            if (parts[0] == "fixed" && parts.size() == 2) return fixed(std::stoi(parts[1]));
            if (parts[0] == "geometric" && parts.size() == 2) return geometric(std::stod(parts[1]));
            if (parts[0] == "zeta" && parts.size() == 3) return zeta(std::stod(parts[1]), std::stol(parts[2]));
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ParameterError*>(&e)) throw;
        }
        throw ParameterError("cannot parse out-degree law '" + text + "'");
    }

    Kind kind() const { return kind_; }
    int fixed_value() const { return m_; }

    std::string describe() const {
        std::ostringstream os;
        switch (kind_) {
        case Kind::Fixed: os << "fixed:" << m_; break;
        case Kind::Geometric: os << "geometric:" << p_; break;
        case Kind::Zeta: os << "zeta:" << s_ << ":" << cap_; break;
        }
        return os.str();
    }

    int min_support() const { return kind_ == Kind::Fixed ? m_ : 1; }

    bool degenerate() const {
        return kind_ == Kind::Fixed || (kind_ == Kind::Geometric && p_ == 1.0) || (kind_ == Kind::Zeta && cap_ == 1);
    }

    double mean() const {
        switch (kind_) {
        case Kind::Fixed: return m_;
        case Kind::Geometric: return 1.0 / p_;
        case Kind::Zeta: return zeta_mean_;
        }
        return 0.0;
    }

    double pmf(long k) const {
        switch (kind_) {
        case Kind::Fixed: return k == m_ ? 1.0 : 0.0;
        case Kind::Geometric: return k >= 1 ? p_ * std::pow(1.0 - p_, static_cast<double>(k - 1)) : 0.0;
        case Kind::Zeta: return (k >= 1 && k <= cap_) ? std::pow(static_cast<double>(k), -s_) / norm_ : 0.0;
        }
        return 0.0;
    }

    // power-law exponent of the pmf; infinite for light tails
    double tail_exponent() const {
        return kind_ == Kind::Zeta ? s_ : std::numeric_limits<double>::infinity();
    }

    long sample(Stream& st) const {
        if (degenerate()) return kind_ == Kind::Fixed ? m_ : 1;
        if (kind_ == Kind::Geometric)
            return 1 + static_cast<long>(std::floor(std::log(st.uniform()) / std::log1p(-p_)));
        return table_->sample(st);
    }

    // Law of M^(delta): P(M^(delta) = k) = (k + delta) P(M = k) / (E[M] + delta).
    // delta = 0 gives the size-biased law M^(0).
    SizeBiased size_biased(double delta) const;

private:
    Kind kind_ = Kind::Fixed;
    int m_ = 1;
    double p_ = 1.0;
    double s_ = 2.0;
    long cap_ = 1;
    double norm_ = 1.0;
    double zeta_mean_ = 1.0;
    std::shared_ptr<detail::TableSampler> table_;
};

class SizeBiased {
public:
    long sample(Stream& st) const {
        if (law_.degenerate()) return law_.sample(st);
        if (law_.kind() == OutDegreeLaw::Kind::Geometric) {
            // k p^2 (1-p)^(k-1) proposal, thinned by (k + delta)/k
            const double bound = delta_ >= 0.0 ? 1.0 + delta_ : 1.0;
            for (;;) {
                long k = law_.sample(st) + law_.sample(st) - 1;
                double acc = (1.0 + delta_ / static_cast<double>(k)) / bound;
                if (st.uniform() < acc) return k;
            }
        }
        return table_->sample(st);
    }
    double pmf(long k) const {
        return (static_cast<double>(k) + delta_) * law_.pmf(k) / (law_.mean() + delta_);
    }
    double delta() const { return delta_; }

private:
    friend class OutDegreeLaw;
    OutDegreeLaw law_;
    double delta_ = 0.0;
    std::shared_ptr<detail::TableSampler> table_;
};

inline SizeBiased OutDegreeLaw::size_biased(double delta) const {
    if (!(delta > -min_support())) throw ParameterError("size bias needs delta > -min support");
    SizeBiased sb;
    sb.law_ = *this;
    sb.delta_ = delta;
    if (kind_ == Kind::Zeta && !degenerate()) {
        std::vector<double> w(static_cast<std::size_t>(cap_));
        for (long k = 1; k <= cap_; ++k)
            w[k - 1] = (static_cast<double>(k) + delta) * std::pow(static_cast<double>(k), -s_);
        sb.table_ = std::make_shared<detail::TableSampler>(1, w);
    }
    return sb;
}

inline long sample_out_degree_law(Stream& s, const OutDegreeLaw& law) { return law.sample(s); }

} // namespace pam

#endif
