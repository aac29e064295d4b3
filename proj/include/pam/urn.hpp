#ifndef PAM_URN_HPP
#define PAM_URN_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "generate.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace pam {

enum class UrnVariant { SL, NSL };

// collapsed = true: urn tree on the m_[n] pre-vertices, collapsed with C_m.
// collapsed = false, NSL: one psi per vertex, m_v edges per vertex.
// collapsed = false, SL only makes sense for m = 1, where it equals the collapsed urn.
struct UrnConfig {
    UrnVariant variant = UrnVariant::NSL;
    bool collapsed = false;
    std::vector<int> out_degrees; // m_v, v = 1..n; m_1 = m_2 = 1
    double delta = 0.0;
    int a1 = 1;
    int a2 = 1;
    int n = 2;
};

struct BetaParams {
    double alpha, beta;
};

// Beta parameters for psi_1..psi_N (index 0 unused; psi_1 = 1 is marked by alpha = 0).
inline std::vector<BetaParams> psi_schedule(const UrnConfig& c) {
    const auto& m = c.out_degrees;
    if (static_cast<int>(m.size()) < c.n + 1) throw ParameterError("urn: out_degrees must cover vertices 1..n");
    const bool pre = c.collapsed || c.variant == UrnVariant::SL;
    if (!c.collapsed && c.variant == UrnVariant::SL)
        for (int v = 3; v <= c.n; ++v)
            if (m[v] != 1) throw ParameterError("urn: uncollapsed self-loop urn needs m = 1");
    const double d = c.delta;
    const int a_sum = c.a1 + c.a2;
    std::vector<BetaParams> p(1, BetaParams{0, 0});
    p.push_back({0.0, 0.0});
    if (c.n >= 2) p.push_back({c.a2 + d, c.a1 + d});
    long mprev = 2;
    for (int k = 3; k <= c.n; ++k) {
        const int mk = m[k];
        if (pre) {
            for (int l = 1; l <= mk; ++l) {
                double b = a_sum + 2.0 * static_cast<double>(mprev + l - 3) + (k - 1) * d + (l - 1) * d / mk;
                if (c.variant == UrnVariant::NSL) b += 1.0;
                p.push_back({1.0 + d / mk, b});
            }
        } else {
            p.push_back({mk + d, a_sum + 2.0 * static_cast<double>(mprev - 2) + mk + (k - 1) * d});
        }
        mprev += mk;
    }
    for (std::size_t s = 2; s < p.size(); ++s)
        if (!(p[s].alpha > 0.0) || !(p[s].beta > 0.0)) throw ParameterError("urn: non-positive Beta parameter");
    return p;
}

struct UrnSample {
    MultiGraph graph;
    std::vector<double> psi;       // psi[1..N]
    std::vector<double> positions; // S_0..S_N
};

inline std::vector<double> urn_positions(const std::vector<double>& psi) {
    const std::size_t N = psi.size() - 1;
    std::vector<double> S(N + 1);
    S[N] = 1.0;
    for (std::size_t k = N; k >= 1; --k) S[k - 1] = S[k] * (1.0 - psi[k]);
    S[0] = 0.0;
    return S;
}

// interval index u with S_{u-1} <= x < S_u
inline int locate(const std::vector<double>& S, double x) {
    auto it = std::upper_bound(S.begin(), S.end(), x);
    int u = static_cast<int>(it - S.begin());
    if (u < 1) u = 1;
    if (u >= static_cast<int>(S.size())) u = static_cast<int>(S.size()) - 1;
    return u;
}

inline UrnSample build_urn_graph(const UrnConfig& c, Stream& s) {
    if (c.n < 2) throw ParameterError("urn: n must be at least 2");
    if (c.a1 < 1 || c.a2 < 1 || (c.a1 - c.a2) % 2 != 0) throw ParameterError("urn: bad initial degrees");
    const auto sched = psi_schedule(c);
    const int N = static_cast<int>(sched.size()) - 1;
    UrnSample out;
    out.psi.assign(static_cast<std::size_t>(N) + 1, 0.0);
    out.psi[1] = 1.0;
    for (int k = 2; k <= N; ++k) out.psi[k] = sample_beta(s, sched[k].alpha, sched[k].beta);
    out.positions = urn_positions(out.psi);
    const auto& S = out.positions;
    const auto& m = c.out_degrees;
    MultiGraph g = initial_graph(c.a1, c.a2);
    const bool pre = c.collapsed || c.variant == UrnVariant::SL;
    if (pre) {
        // group[t] = collapsed vertex of pre-vertex t
        std::vector<int> group(static_cast<std::size_t>(N) + 1, 0);
        group[1] = 1;
        group[2] = 2;
        int t = 3;
        for (int v = 3; v <= c.n; ++v)
            for (int l = 0; l < m[v]; ++l) group[t++] = v;
        t = 3;
        for (int v = 3; v <= c.n; ++v) {
            g.add_vertex();
            for (int l = 0; l < m[v]; ++l, ++t) {
                double scale = c.variant == UrnVariant::SL ? S[t] : S[t - 1];
                int u = locate(S, s.uniform() * scale);
                g.add_edge(v, group[u]);
            }
        }
    } else {
        for (int v = 3; v <= c.n; ++v) {
            g.add_vertex();
            for (int j = 0; j < m[v]; ++j) g.add_edge(v, locate(S, s.uniform() * S[v - 1]));
        }
    }
    out.graph = std::move(g);
    return out;
}

// E[psi^a (1-psi)^b] for psi ~ Beta(alpha, beta)
inline double log_beta_moment(double alpha, double beta, long a, long b) {
    double r = 0.0;
    for (long i = 0; i < a; ++i) r += std::log(alpha + i);
    for (long i = 0; i < b; ++i) r += std::log(beta + i);
    for (long i = 0; i < a + b; ++i) r -= std::log(alpha + beta + i);
    return r;
}

inline double beta_moment(double alpha, double beta, long a, long b) {
    if (!(alpha > 0.0) || !(beta > 0.0) || a < 0 || b < 0) throw ParameterError("beta_moment: bad arguments");
    return std::exp(log_beta_moment(alpha, beta, a, b));
}

namespace detail {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline bool check_prefix(const MultiGraph& g, int a1, int a2, std::size_t& start) {
    MultiGraph init = initial_graph(a1, a2);
    if (g.edges.size() < init.edges.size()) return false;
    for (std::size_t i = 0; i < init.edges.size(); ++i)
        if (g.edges[i] != init.edges[i]) return false;
    start = init.edges.size();
    return true;
}

inline long edge_total(const std::vector<int>& m, int n) {
    long e = 0;
    for (int v = 3; v <= n; ++v) e += m[v];
    return e;
}

} // namespace detail

// Exact log-probability that the given model produces g edge by edge.
// Edges after the initial graph must appear as (v, target) in (v, j) order.
inline double log_graph_probability_model(Model model, const MultiGraph& g, const PaConfig& c) {
    validate(c);
    const auto& m = c.out_degrees;
    if (static_cast<int>(m.size()) < c.n + 1) throw ParameterError("model probability needs realised out-degrees");
    std::size_t e = 0;
    if (g.n != c.n || !detail::check_prefix(g, c.a1, c.a2, e)) return detail::neg_inf;
    long expected = detail::edge_total(m, c.n);
    if (model == Model::F) {
        expected = 0;
        for (int v = 3; v <= c.n; ++v) expected += std::min(m[v], v - 1);
    }
    if (static_cast<long>(g.edges.size() - e) != expected) return detail::neg_inf;

    const double d = c.delta;
    const int a_sum = c.a1 + c.a2;
    MultiGraph init = initial_graph(c.a1, c.a2);
    std::vector<long> deg(static_cast<std::size_t>(c.n) + 1, 0);
    deg[1] = init.degree[1];
    deg[2] = init.degree[2];
    long mprev = 2;
    double lp = 0.0;
    std::vector<long> frozen;
    std::vector<int> chosen;
    for (int v = 3; v <= c.n; ++v) {
        const int mv = m[v];
        frozen.assign(deg.begin(), deg.end());
        chosen.clear();
        const int draws = model == Model::F ? std::min(mv, v - 1) : mv;
        double removed = 0.0;
        for (int j = 1; j <= draws; ++j, ++e) {
            auto [src, u] = g.edges[e];
            if (src != v || u < 1 || u > v) return detail::neg_inf;
            double w = 0.0, cn = 0.0;
            if (model == Model::F) {
                if (u == v || std::find(chosen.begin(), chosen.end(), u) != chosen.end()) return detail::neg_inf;
                w = frozen[u] + d;
                cn = attachment_normalizer(Model::F, a_sum, mprev, v, j, mv, d) - removed;
                removed += w;
                chosen.push_back(u);
            } else {
                if (u == v) {
                    if (model == Model::A) w = deg[v] + 1.0 + j * d / mv;
                    else if (model == Model::B) w = deg[v] + (j - 1) * d / mv;
                } else {
                    w = (model == Model::E ? frozen[u] : deg[u]) + d;
                }
                cn = attachment_normalizer(model, a_sum, mprev, v, j, mv, d);
            }
            if (!(w > 0.0)) return detail::neg_inf;
            lp += std::log(w / cn);
            ++deg[v];
            ++deg[u];
        }
        mprev += mv;
    }
    return lp;
}

inline double graph_probability_model(Model model, const MultiGraph& g, const PaConfig& c) {
    return std::exp(log_graph_probability_model(model, g, c));
}

// Exact urn probability of g, integrating psi out with Beta moments. For the
// collapsed urns this sums over every pre-collapsed tree that collapses to g.
inline double graph_probability_urn(const UrnConfig& c, const MultiGraph& g) {
    const auto sched = psi_schedule(c);
    const int N = static_cast<int>(sched.size()) - 1;
    const auto& m = c.out_degrees;
    std::size_t e0 = 0;
    if (g.n != c.n || !detail::check_prefix(g, c.a1, c.a2, e0)) return 0.0;
    if (static_cast<long>(g.edges.size() - e0) != detail::edge_total(m, c.n)) return 0.0;
    const bool pre = c.collapsed || c.variant == UrnVariant::SL;
    const bool sl = c.variant == UrnVariant::SL;

    // source pre-vertex and admissible target range [lo, hi] per edge
    struct Slot {
        int src, lo, hi;
    };
    std::vector<Slot> slots;
    std::vector<long> first(static_cast<std::size_t>(c.n) + 1, 0), last(first);
    first[1] = last[1] = 1;
    first[2] = last[2] = 2;
    {
        long t = 2;
        for (int v = 3; v <= c.n; ++v) {
            first[v] = t + 1;
            t += pre ? m[v] : 1;
            last[v] = t;
        }
    }
    std::size_t e = e0;
    for (int v = 3; v <= c.n; ++v) {
        for (int j = 1; j <= m[v]; ++j, ++e) {
            auto [src, u] = g.edges[e];
            if (src != v || u < 1 || u > v) return 0.0;
            if (!pre) {
                if (u == v) return 0.0;
                slots.push_back({v, u, u});
                continue;
            }
            int s = static_cast<int>(first[v]) + j - 1;
            if (u < v) slots.push_back({s, static_cast<int>(first[u]), static_cast<int>(last[u])});
            else {
                int hi = sl ? s : s - 1;
                if (hi < first[v]) return 0.0;
                slots.push_back({s, static_cast<int>(first[v]), hi});
            }
        }
    }

    std::vector<int> pick(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) pick[i] = slots[i].lo;
    std::vector<long> p(static_cast<std::size_t>(N) + 2), q(p);
    double total = 0.0;
    for (;;) {
        std::fill(p.begin(), p.end(), 0);
        std::fill(q.begin(), q.end(), 0);
        for (std::size_t i = 0; i < slots.size(); ++i) {
            int t = pick[i];
            int top = sl ? slots[i].src : slots[i].src - 1; // (t, top] carries a (1 - psi) factor
            ++p[t];
            if (top > t) {
                ++q[t + 1];
                --q[top + 1];
            }
        }
        double lp = 0.0;
        long run = 0;
        for (int t = 1; t <= N; ++t) {
            run += q[t];
            if (t == 1) continue; // psi_1 = 1
            lp += log_beta_moment(sched[t].alpha, sched[t].beta, p[t], run);
        }
        total += std::exp(lp);
        std::size_t i = 0;
        for (; i < slots.size(); ++i) {
            if (pick[i] < slots[i].hi) {
                ++pick[i];
                break;
            }
            pick[i] = slots[i].lo;
        }
        if (i == slots.size()) break;
    }
    return total;
}

// Every edge-ordered outcome with targets in [1, v], for oracle enumeration.
// Impossible outcomes are included; both probability functions return 0 there.
inline std::vector<MultiGraph> enumerate_candidates(const std::vector<int>& m, int n, int a1, int a2) {
    std::vector<int> src;
    for (int v = 3; v <= n; ++v)
        for (int j = 0; j < m[v]; ++j) src.push_back(v);
    std::vector<int> pick(src.size(), 1);
    std::vector<MultiGraph> out;
    for (;;) {
        MultiGraph g = initial_graph(a1, a2);
        std::size_t k = 0;
        for (int v = 3; v <= n; ++v) {
            g.add_vertex();
            for (int j = 0; j < m[v]; ++j, ++k) g.add_edge(v, pick[k]);
        }
        out.push_back(std::move(g));
        std::size_t i = 0;
        for (; i < src.size(); ++i) {
            if (pick[i] < src[i]) {
                ++pick[i];
                break;
            }
            pick[i] = 1;
        }
        if (i == src.size()) break;
    }
    return out;
}

// mixed-radix index of an outcome in enumerate_candidates order
inline long candidate_index(const MultiGraph& g, const std::vector<int>& m, int n, int a1, int a2) {
    std::size_t e = initial_graph(a1, a2).edges.size();
    long idx = 0, radix = 1;
    for (int v = 3; v <= n; ++v)
        for (int j = 0; j < m[v]; ++j, ++e) {
            idx += (g.edges[e].second - 1) * radix;
            radix *= v;
        }
    return idx;
}

} // namespace pam

#endif
