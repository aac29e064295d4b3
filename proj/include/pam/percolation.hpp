#ifndef PAM_PERCOLATION_HPP
#define PAM_PERCOLATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "generate.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "ppt.hpp"
#include "rng.hpp"

namespace pam {

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n) + 1), size_(parent_.size(), 1) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }
    int size_of(int x) { return size_[find(x)]; }

private:
    std::vector<int> parent_, size_;
};

struct PercolationOutcome {
    double pi = 0.0;
    long kept_edges = 0;
    long c1 = 0;
    long c2 = 0;
    long component_count = 0;
};

// Harris coupling: one uniform per edge, edge kept iff U_e <= pi
inline std::vector<double> harris_marks(const MultiGraph& g, Stream& s) {
    std::vector<double> u(g.edges.size());
    for (auto& x : u) x = s.uniform();
    return u;
}

inline PercolationOutcome percolate_with_marks(const MultiGraph& g, const std::vector<double>& marks, double pi,
                                               std::vector<std::pair<int, int>>* kept = nullptr) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw ParameterError("percolation probability must lie in [0,1]");
    PercolationOutcome o;
    o.pi = pi;
    UnionFind uf(g.n);
    long comps = g.n;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (!(marks[e] <= pi)) continue;
        ++o.kept_edges;
        auto [u, v] = g.edges[e];
        if (kept) kept->push_back(g.edges[e]);
        if (u != v && uf.unite(u, v)) --comps;
    }
    o.component_count = comps;
    for (int v = 1; v <= g.n; ++v) {
        if (uf.find(v) != v) continue;
        long s = uf.size_of(v);
        if (s > o.c1) {
            o.c2 = o.c1;
            o.c1 = s;
        } else if (s > o.c2) {
            o.c2 = s;
        }
    }
    return o;
}

inline PercolationOutcome percolate(const MultiGraph& g, double pi, Stream& s, MultiGraph* retained = nullptr) {
    auto marks = harris_marks(g, s);
    if (!retained) return percolate_with_marks(g, marks, pi);
    std::vector<std::pair<int, int>> kept;
    auto o = percolate_with_marks(g, marks, pi, &kept);
    *retained = MultiGraph(g.n);
    for (auto [u, v] : kept) retained->add_edge(u, v);
    return o;
}

inline std::vector<PercolationOutcome> percolation_sweep(const MultiGraph& g, const std::vector<double>& pis, Stream& s) {
    auto marks = harris_marks(g, s);
    std::vector<PercolationOutcome> out;
    out.reserve(pis.size());
    for (double p : pis) out.push_back(percolate_with_marks(g, marks, p));
    return out;
}

struct SurvivalEstimate {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long survivors = 0;
    long reps = 0;
    long budget_hits = 0; // replicates counted as survivors because the frontier outgrew the budget
};

// Wilson score interval at z
inline void wilson(long k, long n, double z, double& lo, double& hi) {
    if (n == 0) {
        lo = 0.0;
        hi = 1.0;
        return;
    }
    const double p = static_cast<double>(k) / n, nn = static_cast<double>(n);
    const double den = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / den;
    lo = std::max(0.0, centre - half);
    hi = std::min(1.0, centre + half);
    if (k == 0) lo = 0.0;
}

// Does the pi-percolated cluster of the root reach depth_cap? Grown lazily,
// one generation at a time.
inline bool ppt_cluster_survives(const PptSampler& sampler, double pi, int depth_cap, Stream& s,
                                 std::size_t node_budget, bool* budget_hit = nullptr) {
    if (budget_hit) *budget_hit = false;
    if (!(pi > 0.0)) return false;
    std::vector<PptNode> frontier{sampler.root(s)}, next, kids;
    std::size_t seen = 1;
    for (int depth = 0; depth < depth_cap; ++depth) {
        next.clear();
        for (const auto& node : frontier) {
            const std::size_t used = seen + next.size();
            const bool ok = sampler.children(node, s, kids, pi, used < node_budget ? node_budget - used : 0);
            next.insert(next.end(), kids.begin(), kids.end());
            if (!ok || seen + next.size() > node_budget) {
                if (budget_hit) *budget_hit = true;
                return true;
            }
        }
        if (next.empty()) return false;
        seen += next.size();
        frontier.swap(next);
    }
    return true;
}

inline SurvivalEstimate ppt_survival(const PptParams& params, double pi, int depth_cap, long reps, std::uint64_t seed,
                                     int workers = 1, std::size_t node_budget = 10'000'000) {
    if (depth_cap < 1) throw ParameterError("survival: depth cap must be >= 1");
    if (!(pi >= 0.0 && pi <= 1.0)) throw ParameterError("survival: pi must lie in [0,1]");
    PptSampler sampler(params);
    std::vector<char> alive(static_cast<std::size_t>(reps)), hit(alive.size());
    parallel_for(alive.size(), workers, [&](std::size_t r) {
        Stream s(seed, r);
        bool h = false;
        alive[r] = ppt_cluster_survives(sampler, pi, depth_cap, s, node_budget, &h);
        hit[r] = h;
    });
    SurvivalEstimate e;
    e.reps = reps;
    for (std::size_t r = 0; r < alive.size(); ++r) {
        e.survivors += alive[r];
        e.budget_hits += hit[r];
    }
    e.estimate = reps ? static_cast<double>(e.survivors) / reps : 0.0;
    wilson(e.survivors, reps, 1.959963984540054, e.ci_low, e.ci_high);
    return e;
}

struct ExperimentRecord {
    long n = 0;
    long replicate = 0;
    double pi = 0.0;
    long c1 = 0;
    long c2 = 0;
    long dmax = 0;
    long kept_edges = 0;
    std::uint64_t seed = 0;
};

// Stream id for one (size, replicate) cell; independent of scheduling.
inline std::uint64_t cell_stream_id(long n, long replicate) {
    return splitmix64(static_cast<std::uint64_t>(n)) ^ static_cast<std::uint64_t>(replicate);
}

// One graph per (n, replicate), percolated at every pi with shared marks.
// Rows are ordered by n, then replicate, then pi.
inline std::vector<ExperimentRecord> giant_experiment(const PaConfig& base, const std::vector<double>& pis,
                                                      const std::vector<long>& sizes, long reps, std::uint64_t seed,
                                                      int workers = 1) {
    const std::size_t cells = sizes.size() * static_cast<std::size_t>(reps);
    std::vector<std::vector<ExperimentRecord>> slot(cells);
    parallel_for(cells, workers, [&](std::size_t k) {
        const long n = sizes[k / reps];
        const long r = static_cast<long>(k % reps);
        Stream s(seed, cell_stream_id(n, r));
        PaConfig c = base;
        c.n = static_cast<int>(n);
        MultiGraph g = generate(c, s);
        const long dmax = max_degree(g);
        auto sweep = percolation_sweep(g, pis, s);
        for (const auto& o : sweep) slot[k].push_back({n, r, o.pi, o.c1, o.c2, dmax, o.kept_edges, seed});
    });
    std::vector<ExperimentRecord> rows;
    rows.reserve(cells * pis.size());
    for (auto& v : slot) rows.insert(rows.end(), v.begin(), v.end());
    return rows;
}

} // namespace pam

#endif
