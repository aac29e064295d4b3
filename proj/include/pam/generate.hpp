#ifndef PAM_GENERATE_HPP
#define PAM_GENERATE_HPP

#include <cassert>
#include <cmath>
#include <string>
#include <vector>

#include "graph.hpp"
#include "outdegree.hpp"
#include "rng.hpp"

namespace pam {

enum class Model { A, B, D, E, F };

inline char model_letter(Model m) { return "ABDEF"[static_cast<int>(m)]; }

inline Model parse_model(const std::string& s) {
    if (s.size() == 1) {
        switch (s[0]) {
        case 'a': case 'A': return Model::A;
        case 'b': case 'B': return Model::B;
        case 'd': case 'D': return Model::D;
        case 'e': case 'E': return Model::E;
        case 'f': case 'F': return Model::F;
        }
    }
    throw ParameterError("unknown model '" + s + "' (expected one of a, b, d, e, f)");
}

struct PaConfig {
    Model model = Model::D;
    OutDegreeLaw law = OutDegreeLaw::fixed(1);
    double delta = 0.0;
    int a1 = 1; // initial degrees of vertices 1 and 2
    int a2 = 1;
    int n = 2;
    // Optional realised out-degrees m_v, indexed by v (entries 0..2 ignored).
    // When empty, m_v for v >= 3 are drawn i.i.d. from `law`.
    std::vector<int> out_degrees;
};

inline void validate(const PaConfig& c) {
    if (c.n < 2) throw ParameterError("n must be at least 2");
    if (c.a1 < 1 || c.a2 < 1) throw ParameterError("initial degrees must be positive");
    if ((c.a1 - c.a2) % 2 != 0) throw ParameterError("initial degrees a1, a2 must have equal parity");
    int min_m = c.law.min_support();
    if (!c.out_degrees.empty()) {
        if (static_cast<int>(c.out_degrees.size()) < c.n + 1)
            throw ParameterError("out_degrees must hold an entry for every vertex");
        for (int v = 3; v <= c.n; ++v) {
            if (c.out_degrees[v] < 1) throw ParameterError("out-degrees must be positive");
            min_m = v == 3 ? c.out_degrees[v] : std::min(min_m, c.out_degrees[v]);
        }
    }
    if (!(c.delta > -min_m)) throw ParameterError("delta must exceed minus the smallest out-degree");
    if (!(c.a1 + c.delta > 0.0) || !(c.a2 + c.delta > 0.0))
        throw ParameterError("initial vertices need a_i + delta > 0");
}

// m_v for v = 1..n with m_1 = m_2 = 1
inline std::vector<int> realize_out_degrees(const PaConfig& c, Stream& s) {
    std::vector<int> m(static_cast<std::size_t>(c.n) + 1, 1);
    m[0] = 0;
    for (int v = 3; v <= c.n; ++v)
        m[v] = c.out_degrees.empty() ? static_cast<int>(c.law.sample(s)) : c.out_degrees[v];
    return m;
}

// Two vertices with degrees a1, a2: min(a1,a2) parallel edges plus self-loops
// on the vertex with the larger degree.
inline MultiGraph initial_graph(int a1, int a2) {
    MultiGraph g(2);
    int common = std::min(a1, a2);
    for (int i = 0; i < common; ++i) g.add_edge(1, 2);
    for (int i = 0; i < (a1 - common) / 2; ++i) g.add_edge(1, 1);
    for (int i = 0; i < (a2 - common) / 2; ++i) g.add_edge(2, 2);
    return g;
}

// Normaliser c_{v,j} of edge j of vertex v. mprev = m_[v-1] = sum of m_u, u < v.
inline double attachment_normalizer(Model model, int a_sum, long mprev, int v, int j, int mv, double delta) {
    const double vm1 = v - 1;
    switch (model) {
    case Model::A: return a_sum + 2.0 * static_cast<double>(mprev + j - 2) - 1.0 + vm1 * delta + j * delta / mv;
    case Model::B: return a_sum + 2.0 * static_cast<double>(mprev + j - 3) + vm1 * delta + (j - 1) * delta / mv;
    case Model::D: return a_sum + 2.0 * static_cast<double>(mprev - 2) + (j - 1) + vm1 * delta;
    case Model::E:
    case Model::F: return a_sum + 2.0 * static_cast<double>(mprev - 2) + vm1 * delta;
    }
    return 0.0;
}

namespace detail {

// Fenwick tree over positive vertex weights, sampled by descent.
class WeightTree {
public:
    explicit WeightTree(int n) : n_(n), tree_(static_cast<std::size_t>(n) + 1, 0.0), w_(tree_.size(), 0.0) {
        top_ = 1;
        while (top_ * 2 <= n_) top_ *= 2;
    }
    void add(int i, double dw) {
        w_[i] += dw;
        total_ += dw;
        for (; i <= n_; i += i & -i) tree_[i] += dw;
    }
    double weight(int i) const { return w_[i]; }
    double total() const { return total_; }
    // index i with prefix(i-1) <= x < prefix(i), clamped to [1, limit]
    int find(double x, int limit) const {
        int pos = 0;
        for (int step = top_; step > 0; step >>= 1) {
            int nxt = pos + step;
            if (nxt <= n_ && tree_[nxt] <= x) {
                pos = nxt;
                x -= tree_[nxt];
            }
        }
        int i = pos + 1;
        if (i > limit) i = limit;
        while (i > 1 && w_[i] <= 0.0) --i;
        return i;
    }

private:
    int n_;
    int top_ = 1;
    std::vector<double> tree_, w_;
    double total_ = 0.0;
};

} // namespace detail

struct GenerateInfo {
    std::vector<int> out_degrees;
    long discarded_edges = 0; // model F only: edges with no admissible target left
};

inline MultiGraph generate(const PaConfig& c, Stream& s, GenerateInfo* info = nullptr) {
    validate(c);
    std::vector<int> m = realize_out_degrees(c, s);
    MultiGraph g = initial_graph(c.a1, c.a2);
    g.edges.reserve(static_cast<std::size_t>(c.n) * 2);
    const double d = c.delta;
    [[maybe_unused]] const int a_sum = c.a1 + c.a2;
    detail::WeightTree wt(c.n);
    wt.add(1, g.degree[1] + d);
    wt.add(2, g.degree[2] + d);
    long mprev = 2;
    long discarded = 0;
    std::vector<int> picked;
    for (int v = 3; v <= c.n; ++v) {
        g.add_vertex();
        const int mv = m[v];
        switch (c.model) {
        case Model::A:
        case Model::B:
        case Model::D:
            for (int j = 1; j <= mv; ++j) {
                double self = 0.0;
                if (c.model == Model::A) self = g.degree[v] + 1.0 + j * d / mv;
                else if (c.model == Model::B) self = g.degree[v] + (j - 1) * d / mv;
                const double total = wt.total() + self;
#ifndef NDEBUG
                {
                    double cn = attachment_normalizer(c.model, a_sum, mprev, v, j, mv, d);
                    assert(std::fabs(total - cn) <= 1e-9 * std::max(1.0, std::fabs(cn)));
                }
#endif
                const double x = s.uniform() * total;
                if (x < self) {
                    g.add_edge(v, v);
                } else {
                    int u = wt.find(x - self, v - 1);
                    g.add_edge(v, u);
                    wt.add(u, 1.0);
                }
            }
            break;
        case Model::E:
            picked.clear();
            for (int j = 1; j <= mv; ++j) picked.push_back(wt.find(s.uniform() * wt.total(), v - 1));
            for (int u : picked) g.add_edge(v, u);
            for (int u : picked) wt.add(u, 1.0);
            break;
        case Model::F: {
            picked.clear();
            const int draws = std::min(mv, v - 1);
            discarded += mv - draws;
            for (int j = 1; j <= draws; ++j) {
                int u = wt.find(s.uniform() * wt.total(), v - 1);
                picked.push_back(u);
                wt.add(u, -wt.weight(u));
            }
            for (int u : picked) {
                g.add_edge(v, u);
                wt.add(u, g.degree[u] + d);
            }
            break;
        }
        }
        wt.add(v, g.degree[v] + d);
        mprev += mv;
    }
    if (info) {
        info->out_degrees = std::move(m);
        info->discarded_edges = discarded;
    }
    return g;
}

} // namespace pam

#endif
