#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <vector>

#include <pam/generate.hpp>
#include <pam/percolation.hpp>
#include <pam/spectral.hpp>
#include <pam/stats.hpp>

using namespace pam;

namespace {

MultiGraph pa_graph(int m, double delta, int n, std::uint64_t id) {
    PaConfig c;
    c.model = Model::D;
    c.law = OutDegreeLaw::fixed(m);
    c.delta = delta;
    c.n = n;
    Stream s(99, id);
    return generate(c, s);
}

MultiGraph complete(int n) {
    MultiGraph g(n);
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) g.add_edge(u, v);
    return g;
}

// component label per vertex by breadth-first search
std::vector<int> bfs_labels(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> label(static_cast<std::size_t>(n) + 1, 0);
    int next = 0;
    for (int s = 1; s <= n; ++s) {
        if (label[s]) continue;
        label[s] = ++next;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u])
                if (!label[v]) {
                    label[v] = next;
                    q.push(v);
                }
        }
    }
    return label;
}

} // namespace

TEST(Percolate, FullAndEmpty) {
    auto g = pa_graph(1, 0.5, 3000, 1);
    Stream s(1, 1);
    auto full = percolate(g, 1.0, s);
    EXPECT_EQ(full.c1, 3000);
    EXPECT_EQ(full.component_count, 1);
    EXPECT_EQ(full.kept_edges, static_cast<long>(g.edge_count()));
    auto none = percolate(g, 0.0, s);
    EXPECT_EQ(none.c1, 1);
    EXPECT_EQ(none.c2, 1);
    EXPECT_EQ(none.component_count, 3000);
    EXPECT_EQ(none.kept_edges, 0);
    EXPECT_THROW(percolate(g, 1.5, s), ParameterError);
    EXPECT_THROW(percolate(g, -0.1, s), ParameterError);
}

TEST(Percolate, CompleteGraphDegree) {
    const int n = 200;
    const double lambda = 2.0;
    auto g = complete(n);
    const double edges = n * (n - 1) / 2.0, p = lambda / n;
    std::vector<double> mean_degree;
    for (int r = 0; r < 50; ++r) {
        Stream s(2, static_cast<std::uint64_t>(r));
        mean_degree.push_back(2.0 * percolate(g, p, s).kept_edges / n);
    }
    const double expect = 2.0 * edges * p / n;
    const double sd = 2.0 * std::sqrt(edges * p * (1 - p)) / n / std::sqrt(50.0);
    EXPECT_NEAR(stats::summarize(mean_degree).mean, expect, 3 * sd);
}

TEST(Percolate, SelfLoopsDoNotConnect) {
    MultiGraph g(3);
    g.add_edge(1, 1);
    g.add_edge(2, 2);
    g.add_edge(2, 3);
    auto o = percolate_with_marks(g, {0.1, 0.1, 0.9}, 0.5);
    EXPECT_EQ(o.kept_edges, 2);
    EXPECT_EQ(o.component_count, 3);
    EXPECT_EQ(o.c1, 1);
}

TEST(UnionFind, MatchesBfsOnRandomGraphs) {
    Stream s(3, 3);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(s.below(50));
        const int e = static_cast<int>(s.below(2 * n + 1));
        MultiGraph g(n);
        for (int i = 0; i < e; ++i) g.add_edge(1 + static_cast<int>(s.below(n)), 1 + static_cast<int>(s.below(n)));
        const double pi = s.uniform();
        auto marks = harris_marks(g, s);
        std::vector<std::pair<int, int>> kept;
        auto o = percolate_with_marks(g, marks, pi, &kept);
        auto label = bfs_labels(n, kept);
        UnionFind uf(n);
        for (auto [u, v] : kept) uf.unite(u, v);
        std::vector<long> sizes(static_cast<std::size_t>(n) + 1, 0);
        for (int u = 1; u <= n; ++u) {
            ++sizes[label[u]];
            for (int v = 1; v <= n; ++v) ASSERT_EQ(label[u] == label[v], uf.find(u) == uf.find(v));
        }
        std::sort(sizes.rbegin(), sizes.rend());
        const long comps = std::count_if(sizes.begin(), sizes.end(), [](long x) { return x > 0; });
        ASSERT_EQ(o.component_count, comps);
        ASSERT_EQ(o.c1, sizes[0]);
        ASSERT_EQ(o.c2, sizes[1]);
    }
}

TEST(Sweep, MonotoneCoupling) {
    auto g = pa_graph(2, 1.0, 5000, 4);
    std::vector<double> pis;
    for (int i = 0; i <= 20; ++i) pis.push_back(i / 20.0);
    Stream s(4, 4);
    auto sweep = percolation_sweep(g, pis, s);
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        EXPECT_GE(sweep[i].c1, sweep[i - 1].c1);
        EXPECT_GE(sweep[i].kept_edges, sweep[i - 1].kept_edges);
        EXPECT_LE(sweep[i].component_count, sweep[i - 1].component_count);
    }
    // retained edge sets are nested
    Stream t(5, 5);
    auto marks = harris_marks(g, t);
    std::vector<std::pair<int, int>> lo, hi;
    percolate_with_marks(g, marks, 0.3, &lo);
    percolate_with_marks(g, marks, 0.6, &hi);
    std::multiset<std::pair<int, int>> big(hi.begin(), hi.end());
    for (auto e : lo) {
        auto it = big.find(e);
        ASSERT_NE(it, big.end());
        big.erase(it);
    }
}

TEST(Sweep, KeptEdgesBinomial) {
    auto g = pa_graph(3, 0.0, 20000, 6);
    Stream s(6, 6);
    auto o = percolation_sweep(g, {0.5}, s)[0];
    const double e = static_cast<double>(g.edge_count());
    EXPECT_NEAR(o.kept_edges, e / 2, 3 * std::sqrt(e / 4));
}

TEST(Sweep, NearOneStaysGiant) {
    auto g = pa_graph(2, 0.0, 5000, 7);
    Stream s(7, 7);
    auto sweep = percolation_sweep(g, {0.99, 1.0}, s);
    EXPECT_EQ(sweep[1].c1, 5000);
    EXPECT_GT(sweep[0].c1, 4500);
}

TEST(Percolate, RetainedSubgraph) {
    auto g = pa_graph(2, 0.0, 500, 8);
    Stream s(8, 8);
    MultiGraph kept;
    auto o = percolate(g, 0.4, s, &kept);
    EXPECT_EQ(kept.n, g.n);
    EXPECT_EQ(static_cast<long>(kept.edge_count()), o.kept_edges);
    std::vector<double> ones(kept.edge_count(), 0.0);
    auto again = percolate_with_marks(kept, ones, 1.0);
    EXPECT_EQ(again.c1, o.c1);
    EXPECT_EQ(again.component_count, o.component_count);
}

TEST(Percolate, SubcriticalClusterOutgrowsMaxDegree) {
    // m = 1, delta = 1.5: pi_c = 0.3; log(c1 / dmax) grows like chi pi log n
    const double pi = 0.25;
    const int reps = 100;
    std::vector<double> gap;
    for (int n : {1000, 10000}) {
        double acc = 0.0;
        for (int r = 0; r < reps; ++r) {
            auto g = pa_graph(1, 1.5, n, 100 + r);
            Stream s(9, static_cast<std::uint64_t>(r));
            acc += std::log(static_cast<double>(percolate(g, pi, s).c1)) -
                   std::log(static_cast<double>(max_degree(g)));
        }
        gap.push_back(acc / reps);
    }
    EXPECT_GT(gap[1], gap[0]);
}

TEST(Survival, ZeroPiNeverSurvives) {
    PptParams p;
    p.law = OutDegreeLaw::fixed(2);
    p.delta = 9.0;
    auto e = ppt_survival(p, 0.0, 30, 200, 1);
    EXPECT_EQ(e.estimate, 0.0);
    EXPECT_EQ(e.survivors, 0);
    EXPECT_EQ(e.ci_low, 0.0);
    EXPECT_GT(e.ci_high, 0.0);
}

TEST(Survival, FullTreeAlwaysSurvives) {
    PptParams p;
    p.law = OutDegreeLaw::fixed(2);
    p.delta = 0.0;
    auto e = ppt_survival(p, 1.0, 8, 50, 2, 1, 100000);
    EXPECT_EQ(e.survivors, 50);
    EXPECT_THROW(ppt_survival(p, 0.5, 0, 10, 2), ParameterError);
}

TEST(Survival, BudgetCountsAsSurvivor) {
    PptParams p;
    p.law = OutDegreeLaw::fixed(3);
    p.delta = 0.0;
    auto e = ppt_survival(p, 1.0, 200, 20, 3, 1, 500);
    EXPECT_EQ(e.survivors, 20);
    EXPECT_EQ(e.budget_hits, 20);
}

TEST(Survival, WorkerCountDoesNotMatter) {
    PptParams p;
    p.law = OutDegreeLaw::fixed(2);
    p.delta = 9.0;
    const double pi = 2 * pi_critical(2, 9.0);
    auto a = ppt_survival(p, pi, 12, 300, 4, 1, 20000);
    auto b = ppt_survival(p, pi, 12, 300, 4, 3, 20000);
    EXPECT_EQ(a.survivors, b.survivors);
    EXPECT_EQ(a.budget_hits, b.budget_hits);
}

TEST(Survival, WilsonInterval) {
    double lo, hi;
    wilson(50, 100, 1.96, lo, hi);
    EXPECT_NEAR(lo, 0.4038, 1e-3);
    EXPECT_NEAR(hi, 0.5962, 1e-3);
    wilson(0, 100, 1.96, lo, hi);
    EXPECT_EQ(lo, 0.0);
    EXPECT_NEAR(hi, 0.037, 1e-3);
}

TEST(GiantExperiment, RowLayoutAndDeterminism) {
    PaConfig c;
    c.law = OutDegreeLaw::fixed(2);
    c.delta = 9.0;
    const std::vector<double> pis{0.1, 0.2, 0.5};
    const std::vector<long> sizes{300, 600};
    auto rows = giant_experiment(c, pis, sizes, 4, 17, 1);
    ASSERT_EQ(rows.size(), 2u * 4u * 3u);
    std::size_t i = 0;
    for (long n : sizes)
        for (long r = 0; r < 4; ++r)
            for (double p : pis) {
                EXPECT_EQ(rows[i].n, n);
                EXPECT_EQ(rows[i].replicate, r);
                EXPECT_EQ(rows[i].pi, p);
                EXPECT_GE(rows[i].c1, rows[i].c2);
                EXPECT_LE(rows[i].c1, n);
                EXPECT_EQ(rows[i].seed, 17u);
                ++i;
            }
    auto again = giant_experiment(c, pis, sizes, 4, 17, 3);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_EQ(rows[k].c1, again[k].c1);
        EXPECT_EQ(rows[k].c2, again[k].c2);
        EXPECT_EQ(rows[k].dmax, again[k].dmax);
        EXPECT_EQ(rows[k].kept_edges, again[k].kept_edges);
    }
}
