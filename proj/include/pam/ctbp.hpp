#ifndef PAM_CTBP_HPP
#define PAM_CTBP_HPP

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "generate.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "percolation.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace pam {

struct CtbpParams {
    double delta = 0.0;
    double pi = 1.0;

    void validate() const {
        if (!(delta > -1.0)) throw ParameterError("ctbp: delta must exceed -1");
        if (!(pi > 0.0 && pi <= 1.0)) throw ParameterError("ctbp: pi must lie in (0,1]");
    }
    // birth rate of an individual with l children; the root uses rate(l) - 1
    double rate(long l) const { return static_cast<double>(l) + 1.0 + delta; }
};

inline double malthusian(double delta, double pi) {
    CtbpParams{delta, pi}.validate();
    return 1.0 + pi * (1.0 + delta);
}

// Laplace-type functional phi(lambda, pi) = pi (1 + delta) / (lambda - 1)
inline double malthusian_phi(double lambda, double delta, double pi) {
    if (!(lambda > 1.0)) throw ParameterError("phi needs lambda > 1");
    return pi * (1.0 + delta) / (lambda - 1.0);
}

// sum_{k>=1} Gamma(k+a) / Gamma(k+b)
inline double gamma_ratio_sum(double a, double b) {
    if (!(a + 1.0 > 0.0) || !(b > a + 1.0)) throw ParameterError("gamma_ratio_sum needs b > a + 1 > 0");
    return std::exp(std::lgamma(a + 1.0) - std::lgamma(b)) / (b - a - 1.0);
}

inline double gamma_ratio_partial_sum(double a, double b, long terms) {
    double s = 0.0;
    for (long k = 1; k <= terms; ++k) s += std::exp(std::lgamma(k + a) - std::lgamma(k + b));
    return s;
}

struct MartingalePoint {
    long size;
    double time;
    double value; // Z(t) exp(-lambda_1 t)
};

struct CtbpRun {
    MultiGraph tree;
    double stop_time = 0.0;
    std::vector<MartingalePoint> trace;
};

// Individuals 1 and 2 start as the edge 2 -> 1; individual k is the k-th vertex
// of the tree. Stops at the first time the population reaches n.
inline CtbpRun simulate_ctbp(double delta, long n, Stream& s, int checkpoints = 10) {
    CtbpParams p{delta, 1.0};
    p.validate();
    if (n < 2) throw ParameterError("ctbp: target size must be >= 2");
    const double lambda1 = malthusian(delta, 1.0);
    CtbpRun run;
    run.tree = MultiGraph(2);
    run.tree.add_edge(2, 1);
    std::vector<long> kids{0, 1, 0};
    using Event = std::pair<double, int>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
    auto rate_of = [&](int v) { return p.rate(kids[v]) - (v == 1 ? 1.0 : 0.0); };
    queue.push({sample_exponential(s, rate_of(1)), 1});
    queue.push({sample_exponential(s, rate_of(2)), 2});
    long next_mark = 1;
    auto record = [&](double t) {
        while (checkpoints > 0 && next_mark <= checkpoints && run.tree.n >= n * next_mark / checkpoints) {
            run.trace.push_back({run.tree.n, t, run.tree.n * std::exp(-lambda1 * t)});
            ++next_mark;
        }
    };
    double t = 0.0;
    record(t);
    while (run.tree.n < n) {
        auto [when, parent] = queue.top();
        queue.pop();
        t = when;
        int child = run.tree.add_vertex();
        run.tree.add_edge(child, parent);
        kids.push_back(0);
        ++kids[parent];
        queue.push({t + sample_exponential(s, rate_of(parent)), parent});
        queue.push({t + sample_exponential(s, rate_of(child)), child});
        record(t);
    }
    run.stop_time = t;
    return run;
}

// size of the cluster of vertex 1 after keeping each edge with probability pi
inline long root_cluster_size(const MultiGraph& g, double pi, Stream& s) {
    auto marks = harris_marks(g, s);
    UnionFind uf(g.n);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (marks[e] <= pi) uf.unite(g.edges[e].first, g.edges[e].second);
    return uf.size_of(1);
}

struct SubcriticalSummary {
    double pi = 0.0;
    double chi_pi_target = 0.0;
    stats::LineFit fit_c1;
    stats::LineFit fit_dmax;
    std::vector<double> log_n, log_mean_c1, log_mean_dmax;
    double slope_difference() const { return fit_c1.slope - fit_dmax.slope; }
};

struct SubcriticalResult {
    std::vector<ExperimentRecord> rows; // ordered by n, replicate, pi
    std::vector<SubcriticalSummary> summary;
};

// Variant D graphs with fixed out-degree m, one per (n, replicate), percolated
// at every pi with shared marks.
inline SubcriticalResult subcritical_experiment(int m, double delta, const std::vector<double>& pis,
                                                const std::vector<long>& sizes, long reps, std::uint64_t seed,
                                                int workers = 1) {
    if (sizes.size() < 2) throw ParameterError("subcritical: need at least two sizes");
    if (reps < 1) throw ParameterError("subcritical: reps must be >= 1");
    PaConfig base;
    base.model = Model::D;
    base.law = OutDegreeLaw::fixed(m);
    base.delta = delta;
    base.a1 = base.a2 = 1;
    SubcriticalResult out;
    out.rows = giant_experiment(base, pis, sizes, reps, seed, workers);
    const double chi = (m + delta) / (2.0 * m + delta);
    for (std::size_t k = 0; k < pis.size(); ++k) {
        SubcriticalSummary sm;
        sm.pi = pis[k];
        sm.chi_pi_target = chi * pis[k];
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            double c1 = 0.0, dm = 0.0;
            for (long r = 0; r < reps; ++r) {
                const auto& row = out.rows[(i * reps + r) * pis.size() + k];
                c1 += static_cast<double>(row.c1);
                dm += static_cast<double>(row.dmax);
            }
            sm.log_n.push_back(std::log(static_cast<double>(sizes[i])));
            sm.log_mean_c1.push_back(std::log(c1 / reps));
            sm.log_mean_dmax.push_back(std::log(dm / reps));
        }
        sm.fit_c1 = stats::ols(sm.log_n, sm.log_mean_c1);
        sm.fit_dmax = stats::ols(sm.log_n, sm.log_mean_dmax);
        out.summary.push_back(sm);
    }
    return out;
}

// {x * 10^y : x = 1..9, y in ys} plus extras, sorted
inline std::vector<long> paper_sizes(const std::vector<int>& ys, const std::vector<long>& extra = {}) {
    std::vector<long> v;
    for (int y : ys) {
        long p = 1;
        for (int i = 0; i < y; ++i) p *= 10;
        for (long x = 1; x <= 9; ++x) v.push_back(x * p);
    }
    v.insert(v.end(), extra.begin(), extra.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace pam

#endif
