#ifndef PAM_PPT_HPP
#define PAM_PPT_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "outdegree.hpp"
#include "rng.hpp"

namespace pam {

struct PptParams {
    OutDegreeLaw law = OutDegreeLaw::fixed(1);
    double delta = 0.0;

    double chi() const {
        const double em = law.mean();
        return (em + delta) / (2.0 * em + delta);
    }
    void validate() const {
        if (!(delta > -law.min_support())) throw ParameterError("ppt: delta must exceed -min support of M");
    }
};

enum class NodeKind { Root, Old, Young };

inline char kind_letter(NodeKind k) { return k == NodeKind::Root ? 'R' : (k == NodeKind::Old ? 'O' : 'Y'); }

struct PptNode {
    int parent = -1;
    int depth = 0;
    int first_child = -1; // children are contiguous in breadth-first storage
    int child_count = 0;
    double age = 1.0;
    NodeKind kind = NodeKind::Root;
    double strength = 1.0;
    int reserved_out = 0; // m_-(w): number of Old children
};

struct PptTree {
    std::vector<PptNode> nodes; // breadth-first order, root at 0
    bool truncated_by_budget = false;

    // Ulam-Harris word of node i, e.g. {} for the root, {2,1} for the first child of the second child
    std::vector<int> label(int i) const {
        std::vector<int> w;
        while (nodes[i].parent >= 0) {
            const auto& p = nodes[nodes[i].parent];
            w.push_back(i - p.first_child + 1);
            i = nodes[i].parent;
        }
        std::reverse(w.begin(), w.end());
        return w;
    }
};

// lambda(a) = (1 - a^(1-chi)) / a^(1-chi): mean number of Young children per unit strength
inline double young_intensity(double a, double chi) { return std::pow(a, chi - 1.0) - 1.0; }

// Draws children for one node. Shared by the tree sampler, the lazy
// percolation explorer and the Ising cavity sampler.
class PptSampler {
public:
    explicit PptSampler(const PptParams& p)
        : params_(p), chi_(p.chi()), m_delta_(p.law.size_biased(p.delta)), m_zero_(p.law.size_biased(0.0)) {
        p.validate();
    }

    double chi() const { return chi_; }
    const PptParams& params() const { return params_; }

    PptNode root(Stream& s) const {
        PptNode r;
        r.age = s.uniform();
        r.kind = NodeKind::Root;
        r.reserved_out = static_cast<int>(params_.law.sample(s));
        r.strength = sample_gamma(s, r.reserved_out + params_.delta);
        return r;
    }

    PptNode old_node(double age, Stream& s) const {
        PptNode c;
        c.age = age;
        c.kind = NodeKind::Old;
        c.reserved_out = static_cast<int>(m_delta_.sample(s));
        c.strength = sample_gamma(s, c.reserved_out + 1.0 + params_.delta);
        return c;
    }

    PptNode young_node(double age, Stream& s) const {
        PptNode c;
        c.age = age;
        c.kind = NodeKind::Young;
        c.reserved_out = static_cast<int>(m_zero_.sample(s)) - 1;
        c.strength = sample_gamma(s, c.reserved_out + 1.0 + params_.delta);
        return c;
    }

    double old_child_age(double parent_age, Stream& s) const { return parent_age * std::pow(s.uniform(), 1.0 / chi_); }

    // inversion of the density (1-chi) x^-chi / (1 - a^(1-chi)) on [a, 1]
    double young_child_age(double parent_age, Stream& s) const {
        const double e = 1.0 - chi_;
        const double lo = std::pow(parent_age, e);
        double x = std::pow(lo + s.uniform() * (1.0 - lo), 1.0 / e);
        return std::clamp(x, parent_age, 1.0);
    }

    // Children of `node` with percolation probability pi (pi = 1: the full tree).
    // Old children first, then Young children by increasing age. Returns false
    // (Young children dropped) when there would be more than `limit` of them;
    // very old nodes can have astronomically many.
    bool children(const PptNode& node, Stream& s, std::vector<PptNode>& out, double pi = 1.0,
                  std::size_t limit = std::numeric_limits<std::size_t>::max()) const {
        out.clear();
        for (int i = 0; i < node.reserved_out; ++i) {
            if (pi < 1.0 && !(s.uniform() < pi)) continue;
            out.push_back(old_node(old_child_age(node.age, s), s));
        }
        const double mean = pi * node.strength * young_intensity(node.age, chi_);
        const double cap = std::min(static_cast<double>(limit), 1e15);
        if (mean > 2.0 * cap + 1000.0) return false;
        const auto k = sample_poisson(s, std::max(0.0, mean));
        if (static_cast<double>(k) > cap) return false;
        std::vector<double> ages(static_cast<std::size_t>(k));
        for (auto& a : ages) a = young_child_age(node.age, s);
        std::sort(ages.begin(), ages.end());
        for (double a : ages) out.push_back(young_node(a, s));
        return true;
    }

private:
    PptParams params_;
    double chi_;
    SizeBiased m_delta_, m_zero_;
};

// Breadth-first growth of the subtree below `start` to the given depth
// (relative to start). Stops adding nodes once node_budget is reached and
// flags the tree.
inline PptTree grow_ppt(const PptSampler& sampler, const PptNode& start, int depth, Stream& s,
                        std::size_t node_budget = 10'000'000) {
    if (depth < 0) throw ParameterError("ppt: depth must be >= 0");
    PptTree t;
    t.nodes.push_back(start);
    t.nodes[0].parent = -1;
    t.nodes[0].depth = 0;
    t.nodes[0].first_child = -1;
    t.nodes[0].child_count = 0;
    std::vector<PptNode> kids;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i].depth >= depth) continue;
        const std::size_t room = node_budget > t.nodes.size() ? node_budget - t.nodes.size() : 0;
        if (!sampler.children(t.nodes[i], s, kids, 1.0, room) || t.nodes.size() + kids.size() > node_budget) {
            t.truncated_by_budget = true;
            break;
        }
        t.nodes[i].first_child = static_cast<int>(t.nodes.size());
        t.nodes[i].child_count = static_cast<int>(kids.size());
        const int d = t.nodes[i].depth + 1;
        for (auto& k : kids) {
            k.parent = static_cast<int>(i);
            k.depth = d;
            t.nodes.push_back(k);
        }
    }
    return t;
}

inline PptTree sample_ppt(const PptParams& params, int depth, Stream& s, std::size_t node_budget = 10'000'000) {
    PptSampler sampler(params);
    const PptNode root = sampler.root(s);
    return grow_ppt(sampler, root, depth, s, node_budget);
}

// "label age kind strength" per node; the root's label is written as "0"
inline void write_tree(std::ostream& os, const PptTree& t) {
    os.precision(17);
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        auto w = t.label(static_cast<int>(i));
        if (w.empty()) os << '0';
        for (std::size_t k = 0; k < w.size(); ++k) os << (k ? "." : "") << w[k];
        const auto& n = t.nodes[i];
        os << ' ' << n.age << ' ' << kind_letter(n.kind) << ' ' << n.strength << '\n';
    }
}

// ---- degree laws for fixed m --------------------------------------------

inline double tau_e(int m, double delta) { return 3.0 + delta / m; }

// P(Y(m', a) = j): negative binomial mixture of Poisson(Gamma(m'+delta) lambda(a))
inline double log_mixed_poisson_kernel(double shape, long j, double u) {
    // u = a^(1-chi)
    return std::lgamma(j + shape) - std::lgamma(shape) - std::lgamma(j + 1.0) + j * std::log1p(-u) + shape * std::log(u);
}

inline double root_degree_pmf(int m, double delta, long k) {
    if (k < m) return 0.0;
    const double te = tau_e(m, delta);
    return (te - 1.0) * std::exp(std::lgamma(k + delta) + std::lgamma(m + delta + te - 1.0) - std::lgamma(m + delta) -
                                 std::lgamma(k + delta + te));
}

inline double old_age_density(double a, double chi) {
    return chi / (1.0 - chi) * std::pow(a, chi - 1.0) * (1.0 - std::pow(a, 1.0 - chi));
}

inline double old_age_cdf(double a, double chi) {
    return a + std::pow(a, chi) * (1.0 - std::pow(a, 1.0 - chi)) / (1.0 - chi);
}

// integral_0^u x^(te-2) / (1 - x) dx
inline double young_age_integral(double u, double te) {
    if (u <= 0.0) return 0.0;
    if (u <= 0.99) {
        double sum = 0.0, pw = std::pow(u, te - 1.0);
        for (int i = 0; i < 100000; ++i) {
            double term = pw / (te - 1.0 + i);
            sum += term;
            if (term < 1e-12 * sum) break;
            pw *= u;
        }
        return sum;
    }
    // -log(1-u) minus a bounded remainder
    auto f = [te](double x) { return x >= 1.0 ? te - 2.0 : (1.0 - std::pow(x, te - 2.0)) / (1.0 - x); };
    double rem = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, u, 12, 1e-13);
    return -std::log1p(-u) - rem;
}

inline double young_age_density(double a, double chi, double te) {
    if (a <= 0.0) return 0.0;
    // a^(1-chi) rounds to 1 just below a = 1; the log singularity there is integrable
    const double u = std::min(std::pow(a, 1.0 - chi), std::nextafter(1.0, 0.0));
    return std::pow(a, -chi) * young_age_integral(u, te);
}

inline double neighbour_age_density(NodeKind kind, double a, int m, double delta) {
    const double chi = (m + delta) / (2.0 * m + delta);
    if (kind == NodeKind::Old) return old_age_density(a, chi);
    return young_age_density(a, chi, tau_e(m, delta));
}

struct NeighbourDegreeLaws {
    int m;
    double delta;
    double tau_old;
    double tau_young;

    // degree of a uniform Old neighbour of the root: 1 + m + Y(m+1, A_old)
    double pmf_old(long k) const {
        const long j = k - m - 1;
        if (j < 0) return 0.0;
        const double chi = (m + delta) / (2.0 * m + delta);
        const double shape = m + 1 + delta;
        auto f = [&](double a) {
            const double u = std::pow(a, 1.0 - chi);
            if (a <= 0.0 || u >= 1.0) return 0.0;
            return old_age_density(a, chi) * std::exp(log_mixed_poisson_kernel(shape, j, u));
        };
        boost::math::quadrature::tanh_sinh<double> ts;
        return ts.integrate(f, 0.0, 1.0);
    }

    // degree of a uniform Young neighbour of the root: m + Y(m, A_young)
    double pmf_young(long k) const {
        const long j = k - m;
        if (j < 0) return 0.0;
        const double chi = (m + delta) / (2.0 * m + delta);
        const double te = tau_e(m, delta);
        const double shape = m + delta;
        auto f = [&](double a) {
            const double u = std::pow(a, 1.0 - chi);
            if (a <= 0.0 || u >= 1.0) return 0.0;
            return young_age_density(a, chi, te) * std::exp(log_mixed_poisson_kernel(shape, j, u));
        };
        boost::math::quadrature::gauss_kronrod<double, 61> gk;
        return gk.integrate(f, 0.0, 1.0, 15, 1e-11);
    }
};

// tail_m: power-law exponent of M (infinity for fixed m)
inline NeighbourDegreeLaws neighbour_degree_laws(int m, double delta,
                                                 double tail_m = std::numeric_limits<double>::infinity()) {
    if (m < 1 || !(delta > -m)) throw ParameterError("neighbour laws need m >= 1 and delta > -m");
    const double te = tau_e(m, delta);
    return NeighbourDegreeLaws{m, delta, std::min(te - 1.0, tail_m - 1.0), std::min(te + 1.0, tail_m - 1.0)};
}

} // namespace pam

#endif
