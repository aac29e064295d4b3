#ifndef PAM_ISING_HPP
#define PAM_ISING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "parallel.hpp"
#include "ppt.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace pam {

struct IsingParams {
    double beta = 0.0;
    double B = 0.0;

    void validate() const {
        if (!(beta >= 0.0)) throw ParameterError("ising: beta must be >= 0");
        if (!std::isfinite(B)) throw ParameterError("ising: B must be finite");
    }
};

struct SizeError : std::length_error {
    using std::length_error::length_error;
};

inline double clamped_atanh(double x) {
    constexpr double eps = 1e-16;
    return std::atanh(std::clamp(x, -1.0 + eps, 1.0 - eps));
}

// message from a neighbour with cavity field h
inline double bp_message(double tanh_beta, double h) { return clamped_atanh(tanh_beta * std::tanh(h)); }

inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

struct ExactIsing {
    double log_Z = 0.0;
    double pressure = 0.0;        // log_Z / n
    double magnetization = 0.0;   // (1/n) sum <sigma_v>
    double internal_energy = 0.0; // -(1/n) sum over non-loop edges <sigma_u sigma_v>
    std::vector<double> marginals;         // <sigma_v>, index 1..n
    std::vector<double> edge_correlations; // <sigma_u sigma_v> per edge, in edge order (1 for loops)
    std::vector<std::vector<double>> pair; // <sigma_i sigma_j>, filled on request
};

// Full enumeration over 2^n spin configurations.
inline ExactIsing exact_ising(const MultiGraph& g, const IsingParams& p, bool all_pairs = false) {
    p.validate();
    if (g.n > 24) throw SizeError("exact_ising: at most 24 vertices");
    if (g.n < 1) throw ParameterError("exact_ising: empty graph");
    const int n = g.n;
    long loops = 0;
    std::vector<std::pair<int, int>> links;
    for (auto [u, v] : g.edges) {
        if (u == v) ++loops;
        else links.emplace_back(u - 1, v - 1);
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    // weights exp(H - Hmax); H <= beta*|links| + |B| n
    const double shift = p.beta * static_cast<double>(links.size()) + std::abs(p.B) * n;
    double z = 0.0;
    std::vector<double> mag(n, 0.0), edge(links.size(), 0.0);
    std::vector<std::vector<double>> pair;
    if (all_pairs) pair.assign(n, std::vector<double>(n, 0.0));
    for (std::uint64_t c = 0; c < total; ++c) {
        double h = 0.0;
        for (auto [u, v] : links) h += (((c >> u) ^ (c >> v)) & 1U) ? -p.beta : p.beta;
        const int up = std::popcount(c);
        h += p.B * (2 * up - n);
        const double w = std::exp(h - shift);
        z += w;
        for (int v = 0; v < n; ++v) mag[v] += ((c >> v) & 1U) ? w : -w;
        for (std::size_t e = 0; e < links.size(); ++e)
            edge[e] += (((c >> links[e].first) ^ (c >> links[e].second)) & 1U) ? -w : w;
        if (all_pairs)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) pair[i][j] += (((c >> i) ^ (c >> j)) & 1U) ? -w : w;
    }
    ExactIsing r;
    r.log_Z = std::log(z) + shift + p.beta * static_cast<double>(loops);
    r.pressure = r.log_Z / n;
    r.marginals.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int v = 0; v < n; ++v) {
        r.marginals[v + 1] = mag[v] / z;
        r.magnetization += r.marginals[v + 1];
    }
    r.magnetization /= n;
    std::size_t k = 0;
    for (auto [u, v] : g.edges) {
        if (u == v) {
            r.edge_correlations.push_back(1.0);
            continue;
        }
        const double c = edge[k++] / z;
        r.edge_correlations.push_back(c);
        r.internal_energy -= c;
    }
    r.internal_energy /= n;
    if (all_pairs) {
        r.pair.assign(static_cast<std::size_t>(n) + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 1.0));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) r.pair[i + 1][j + 1] = r.pair[j + 1][i + 1] = pair[i][j] / z;
    }
    return r;
}

struct TreeBp {
    int root = 1;
    std::vector<int> parent;        // parent[v] in the rooted tree, 0 for the root
    std::vector<double> cavity;     // h(v): field of v's subtree, v's parent removed
    std::vector<double> full_field; // field at v with every neighbour included
    std::vector<double> marginals;  // tanh(full_field)
    double root_field = 0.0;
    double root_marginal = 0.0;
    std::vector<double> edge_correlations; // per edge in edge order (1 for loops)
};

// Rooted adjacency of a tree (self-loops ignored). Throws if g is not a tree.
inline std::vector<std::vector<int>> tree_children(const MultiGraph& g, int root, std::vector<int>& parent,
                                                   std::vector<int>& order) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n) + 1);
    long links = 0;
    for (auto [u, v] : g.edges) {
        if (u == v) continue;
        adj[u].push_back(v);
        adj[v].push_back(u);
        ++links;
    }
    if (links != g.n - 1) throw ParameterError("tree_bp: graph is not a tree");
    parent.assign(static_cast<std::size_t>(g.n) + 1, -1);
    std::vector<std::vector<int>> kids(static_cast<std::size_t>(g.n) + 1);
    order.clear();
    order.push_back(root);
    parent[root] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        int u = order[i];
        for (int w : adj[u]) {
            if (w == parent[u]) continue;
            if (parent[w] != -1) throw ParameterError("tree_bp: graph is not a tree");
            parent[w] = u;
            kids[u].push_back(w);
            order.push_back(w);
        }
    }
    if (static_cast<int>(order.size()) != g.n) throw ParameterError("tree_bp: graph is not connected");
    return kids;
}

// Exact marginals on a tree: leaves-to-root pass for the cavity fields, then a
// root-to-leaves pass for the fields including the parent side.
inline TreeBp tree_bp(const MultiGraph& g, const IsingParams& p, int root = 1) {
    p.validate();
    if (root < 1 || root > g.n) throw ParameterError("tree_bp: root out of range");
    TreeBp r;
    r.root = root;
    std::vector<int> order;
    auto kids = tree_children(g, root, r.parent, order);
    const double tb = std::tanh(p.beta);
    const std::size_t sz = static_cast<std::size_t>(g.n) + 1;
    r.cavity.assign(sz, p.B);
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        for (int c : kids[*it]) r.cavity[*it] += bp_message(tb, r.cavity[c]);
    // down[v]: field of the parent side as seen from v
    std::vector<double> down(sz, 0.0);
    r.full_field.assign(sz, 0.0);
    for (int u : order) {
        r.full_field[u] = r.cavity[u] + (u == root ? 0.0 : bp_message(tb, down[u]));
        for (int c : kids[u]) down[c] = r.full_field[u] - bp_message(tb, r.cavity[c]);
    }
    r.marginals.assign(sz, 0.0);
    for (int v = 1; v <= g.n; ++v) r.marginals[v] = std::tanh(r.full_field[v]);
    r.root_field = r.full_field[root];
    r.root_marginal = r.marginals[root];
    for (auto [u, v] : g.edges) {
        if (u == v) {
            r.edge_correlations.push_back(1.0);
            continue;
        }
        const int child = r.parent[v] == u ? v : u;
        const double a = std::tanh(r.cavity[child]), b = std::tanh(down[child]);
        r.edge_correlations.push_back((tb + a * b) / (1.0 + tb * a * b));
    }
    return r;
}

// Parallel iteration h <- B + sum over children of the message, from a
// constant start. Returns the root field after every sweep (index 0 = start).
inline std::vector<double> bp_iterate(const MultiGraph& g, const IsingParams& p, double start, int sweeps,
                                      int root = 1) {
    p.validate();
    std::vector<int> parent, order;
    auto kids = tree_children(g, root, parent, order);
    const double tb = std::tanh(p.beta);
    std::vector<double> h(static_cast<std::size_t>(g.n) + 1, start), next(h.size());
    std::vector<double> trace{h[root]};
    for (int t = 0; t < sweeps; ++t) {
        for (int v = 1; v <= g.n; ++v) {
            next[v] = p.B;
            for (int c : kids[v]) next[v] += bp_message(tb, h[c]);
        }
        h.swap(next);
        trace.push_back(h[root]);
    }
    return trace;
}

inline constexpr double plus_boundary = 50.0;

// ---- cavity fields on the Polya point tree ---------------------------------

// Leaves cut off by the depth limit need a field. Free: h = B. Plus: h = cap.
// Pool: a draw from fields computed in earlier rounds at nodes of the same
// label and nearby age, so the boundary approximates the fixed point.
enum class Boundary { Free, Plus, Pool };

inline Boundary parse_boundary(const std::string& s) {
    if (s == "free") return Boundary::Free;
    if (s == "plus") return Boundary::Plus;
    if (s == "pool") return Boundary::Pool;
    throw ParameterError("unknown boundary '" + s + "' (expected free, plus or pool)");
}

// Fields for every (beta, B) point, keyed by label and sorted by age.
class FieldPool {
public:
    FieldPool() = default;
    explicit FieldPool(std::size_t points, int window = 8) : np_(points), window_(window) {}

    struct Entry {
        double age;
        std::vector<double> fields;
    };

    void build(std::vector<Entry>& old_entries, std::vector<Entry>& young_entries) {
        auto fill = [&](std::vector<Entry>& es, int k) {
            std::stable_sort(es.begin(), es.end(), [](const Entry& a, const Entry& b) { return a.age < b.age; });
            ages_[k].clear();
            fields_[k].clear();
            for (auto& e : es) {
                ages_[k].push_back(e.age);
                fields_[k].insert(fields_[k].end(), e.fields.begin(), e.fields.end());
            }
        };
        fill(old_entries, 0);
        fill(young_entries, 1);
    }

    bool empty() const { return ages_[0].empty() || ages_[1].empty(); }
    std::size_t size() const { return ages_[0].size() + ages_[1].size(); }

    // fields of a random entry among the `window` nearest in age; u in (0,1)
    const double* lookup(NodeKind kind, double age, double u) const {
        const int k = kind == NodeKind::Young ? 1 : 0;
        const auto& a = ages_[k];
        const long n = static_cast<long>(a.size());
        long i = static_cast<long>(std::lower_bound(a.begin(), a.end(), age) - a.begin());
        const long w = std::min<long>(window_, n);
        long lo = std::clamp(i - w / 2, 0L, n - w);
        long j = lo + std::min(w - 1, static_cast<long>(u * w));
        return &fields_[k][static_cast<std::size_t>(j) * np_];
    }

private:
    std::size_t np_ = 1;
    int window_ = 8;
    std::array<std::vector<double>, 2> ages_;
    std::array<std::vector<double>, 2> fields_;
};

struct BoundarySpec {
    Boundary kind = Boundary::Free;
    const FieldPool* pool = nullptr;
};

// Cavity fields h[i * np + k] of every node i at every point k. Nodes at depth
// `cut` or never expanded are boundary nodes; picks[i] drives the pool draw.
inline void tree_fields(const PptTree& t, const std::vector<IsingParams>& pts, int cut, const BoundarySpec& bd,
                        const std::vector<double>& picks, std::vector<double>& h) {
    const std::size_t np = pts.size();
    std::vector<double> tb(np);
    for (std::size_t k = 0; k < np; ++k) tb[k] = std::tanh(pts[k].beta);
    h.assign(t.nodes.size() * np, 0.0);
    for (std::size_t i = t.nodes.size(); i-- > 0;) {
        const auto& nd = t.nodes[i];
        double* hi = &h[i * np];
        if ((cut >= 0 && nd.depth >= cut) || nd.first_child < 0) {
            if (bd.kind == Boundary::Pool && bd.pool && !bd.pool->empty() && nd.kind != NodeKind::Root) {
                const double* f = bd.pool->lookup(nd.kind, nd.age, picks[i]);
                std::copy(f, f + np, hi);
            } else {
                for (std::size_t k = 0; k < np; ++k) hi[k] = bd.kind == Boundary::Plus ? plus_boundary : pts[k].B;
            }
            continue;
        }
        for (std::size_t k = 0; k < np; ++k) hi[k] = pts[k].B;
        for (int c = 0; c < nd.child_count; ++c) {
            const double* hc = &h[static_cast<std::size_t>(nd.first_child + c) * np];
            for (std::size_t k = 0; k < np; ++k) hi[k] += bp_message(tb[k], hc[k]);
        }
    }
}

// single point, free or plus boundary
inline void tree_fields(const PptTree& t, const IsingParams& p, int cut, Boundary kind, std::vector<double>& h) {
    if (kind == Boundary::Pool) throw ParameterError("tree_fields: pool boundary needs a pool");
    tree_fields(t, std::vector<IsingParams>{p}, cut, BoundarySpec{kind, nullptr}, {}, h);
}

struct CavityTerms {
    double magnetization = 0.0; // tanh h(root)
    double vertex = 0.0;        // log(e^B prod(1 + tb x_i) + e^-B prod(1 - tb x_i))
    double edge = 0.0;          // log(1 + tb tanh h(hat) tanh h(hat 1))
    double energy = 0.0;        // (tb + th th) / (1 + tb th th)
    double pressure = 0.0;      // m log cosh beta - m edge + vertex
};

struct SampledTree {
    PptTree tree;
    std::vector<double> picks;
};

struct CavitySample {
    SampledTree root_tree; // depth t
    SampledTree hat;       // Young node of uniform age, depth t
    SampledTree hat_one;   // its Old child, depth t - 1
    bool truncated() const {
        return root_tree.tree.truncated_by_budget || hat.tree.truncated_by_budget || hat_one.tree.truncated_by_budget;
    }
    std::size_t nodes() const { return root_tree.tree.nodes.size() + hat.tree.nodes.size() + hat_one.tree.nodes.size(); }
};

inline SampledTree grow_with_picks(const PptSampler& sampler, const PptNode& start, int depth, Stream& s,
                                   std::size_t budget) {
    SampledTree st{grow_ppt(sampler, start, depth, s, budget), {}};
    st.picks.resize(st.tree.nodes.size());
    for (auto& u : st.picks) u = s.uniform();
    return st;
}

inline CavitySample sample_cavity_trees(const PptSampler& sampler, int depth, Stream& s, std::size_t budget) {
    CavitySample c;
    c.root_tree = grow_with_picks(sampler, sampler.root(s), depth, s, budget);
    const double u = s.uniform();
    c.hat = grow_with_picks(sampler, sampler.young_node(u, s), depth, s, budget);
    c.hat_one = grow_with_picks(sampler, sampler.old_node(sampler.old_child_age(u, s), s), depth - 1, s, budget);
    return c;
}

// Terms at every point. cut_shift = 1 evaluates the same trees one level
// shallower.
inline std::vector<CavityTerms> cavity_terms(const CavitySample& c, int m, const std::vector<IsingParams>& pts,
                                             int depth, const BoundarySpec& bd, int cut_shift = 0) {
    const std::size_t np = pts.size();
    std::vector<CavityTerms> out(np);
    std::vector<double> h;
    tree_fields(c.root_tree.tree, pts, depth - cut_shift, bd, c.root_tree.picks, h);
    const auto& root = c.root_tree.tree.nodes[0];
    for (std::size_t k = 0; k < np; ++k) {
        const double tb = std::tanh(pts[k].beta);
        double log_plus = 0.0;
        for (int j = 0; j < root.child_count; ++j)
            log_plus += std::log1p(tb * std::tanh(h[static_cast<std::size_t>(root.first_child + j) * np + k]));
        const double h0 = h[k];
        out[k].magnetization = std::tanh(h0);
        // log(e^B P+ + e^-B P-) = B + log P+ + log(1 + e^{-2 h0})
        out[k].vertex = pts[k].B + log_plus +
                        (h0 > 0 ? std::log1p(std::exp(-2.0 * h0)) : -2.0 * h0 + std::log1p(std::exp(2.0 * h0)));
    }
    std::vector<double> ha;
    tree_fields(c.hat.tree, pts, depth - cut_shift, bd, c.hat.picks, ha);
    tree_fields(c.hat_one.tree, pts, depth - 1 - cut_shift, bd, c.hat_one.picks, h);
    for (std::size_t k = 0; k < np; ++k) {
        const double tb = std::tanh(pts[k].beta);
        const double a = std::tanh(ha[k]), b = std::tanh(h[k]);
        out[k].edge = std::log1p(tb * a * b);
        out[k].energy = (tb + a * b) / (1.0 + tb * a * b);
        out[k].pressure = m * std::log(std::cosh(pts[k].beta)) - m * out[k].edge + out[k].vertex;
    }
    return out;
}

struct PoolSettings {
    int rounds = 12;
    long trees_per_round = 1000;
    int window = 8;
};

inline constexpr std::uint64_t pool_stream_tag = 0x9e3779b97f4a7c15ULL;

// Fixed-point iteration on the boundary: each round grows fresh trees, fills
// their cut-off leaves from the previous pool (free boundary in round one) and
// keeps the fields of every expanded non-root node.
inline FieldPool build_field_pool(const PptSampler& sampler, const std::vector<IsingParams>& pts, int depth,
                                  const PoolSettings& ps, std::uint64_t seed, int workers, std::size_t budget) {
    const std::size_t np = pts.size();
    FieldPool pool(np, ps.window);
    for (int round = 0; round < ps.rounds; ++round) {
        std::vector<std::vector<FieldPool::Entry>> olds(static_cast<std::size_t>(ps.trees_per_round)),
            youngs(olds.size());
        const BoundarySpec bd{round == 0 ? Boundary::Free : Boundary::Pool, &pool};
        parallel_for(olds.size(), workers, [&](std::size_t j) {
            Stream s = Stream(seed ^ pool_stream_tag, static_cast<std::uint64_t>(round)).split(j);
            auto st = grow_with_picks(sampler, sampler.root(s), depth, s, budget);
            std::vector<double> h;
            tree_fields(st.tree, pts, depth, bd, st.picks, h);
            for (std::size_t i = 1; i < st.tree.nodes.size(); ++i) {
                const auto& nd = st.tree.nodes[i];
                if (nd.first_child < 0 || nd.depth >= depth) continue;
                FieldPool::Entry e{nd.age, std::vector<double>(h.begin() + i * np, h.begin() + (i + 1) * np)};
                (nd.kind == NodeKind::Young ? youngs[j] : olds[j]).push_back(std::move(e));
            }
        });
        std::vector<FieldPool::Entry> all_old, all_young;
        for (std::size_t j = 0; j < olds.size(); ++j) {
            for (auto& e : olds[j]) all_old.push_back(std::move(e));
            for (auto& e : youngs[j]) all_young.push_back(std::move(e));
        }
        if (all_old.empty() || all_young.empty()) break;
        pool.build(all_old, all_young);
    }
    return pool;
}

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

inline Estimate estimate_of(const std::vector<double>& xs) {
    auto s = stats::summarize(xs);
    return {s.mean, s.stderr_};
}

struct CavityPoint {
    IsingParams params;
    Estimate magnetization;
    Estimate internal_energy; // -m E[(tb + th th) / (1 + tb th th)]
    Estimate pressure;
    Estimate pressure_shallow;  // same trees, depth t - 1
    Estimate depth_discrepancy; // pressure - pressure_shallow, paired
    std::vector<double> samples_pressure, samples_magnetization, samples_energy; // per replicate, if kept
};

struct CavityOptions {
    int depth = 4;
    long reps = 1000;
    Boundary boundary = Boundary::Pool;
    PoolSettings pool;
    int workers = 1;
    bool keep_samples = false;
    std::size_t node_budget = 2'000'000;
};

struct CavityRun {
    int m = 1;
    double delta = 0.0;
    CavityOptions options;
    long budget_hits = 0;
    double mean_nodes = 0.0;
    std::size_t pool_size = 0;
    std::vector<CavityPoint> points;
};

// Monte Carlo of magnetization, internal energy and pressure on sampled
// trees. All (beta, B) points share the same trees replicate by replicate.
inline CavityRun rppt_cavity_mc(int m, double delta, const std::vector<IsingParams>& points, const CavityOptions& opt,
                                std::uint64_t seed) {
    if (m < 1) throw ParameterError("cavity: m must be >= 1");
    if (opt.depth < 1) throw ParameterError("cavity: depth must be >= 1");
    if (opt.reps < 2) throw ParameterError("cavity: need at least two replicates");
    if (points.empty()) throw ParameterError("cavity: no (beta, B) points");
    for (const auto& p : points) {
        p.validate();
        if (!(p.B > 0.0)) throw ParameterError("cavity: B must be positive");
    }
    PptParams pp{OutDegreeLaw::fixed(m), delta};
    PptSampler sampler(pp);
    CavityRun run;
    run.m = m;
    run.delta = delta;
    run.options = opt;
    FieldPool pool;
    if (opt.boundary == Boundary::Pool) {
        pool = build_field_pool(sampler, points, opt.depth, opt.pool, seed, opt.workers, opt.node_budget);
        run.pool_size = pool.size();
    }
    const BoundarySpec bd{opt.boundary, &pool};
    const std::size_t np = points.size(), nr = static_cast<std::size_t>(opt.reps);
    std::vector<CavityTerms> deep(np * nr), shallow(np * nr);
    std::vector<char> hit(nr);
    std::vector<double> nodes(nr);
    parallel_for(nr, opt.workers, [&](std::size_t r) {
        Stream s(seed, r);
        auto c = sample_cavity_trees(sampler, opt.depth, s, opt.node_budget);
        hit[r] = c.truncated();
        nodes[r] = static_cast<double>(c.nodes());
        auto d = cavity_terms(c, m, points, opt.depth, bd, 0);
        auto sh = cavity_terms(c, m, points, opt.depth, bd, opt.depth >= 2 ? 1 : 0);
        for (std::size_t k = 0; k < np; ++k) {
            deep[k * nr + r] = d[k];
            shallow[k * nr + r] = sh[k];
        }
    });
    for (std::size_t r = 0; r < nr; ++r) {
        run.budget_hits += hit[r];
        run.mean_nodes += nodes[r] / static_cast<double>(nr);
    }
    for (std::size_t k = 0; k < np; ++k) {
        CavityPoint pt;
        pt.params = points[k];
        std::vector<double> mag(nr), en(nr), ph(nr), phs(nr), dd(nr);
        for (std::size_t r = 0; r < nr; ++r) {
            const auto& d = deep[k * nr + r];
            mag[r] = d.magnetization;
            en[r] = -m * d.energy;
            ph[r] = d.pressure;
            phs[r] = shallow[k * nr + r].pressure;
            dd[r] = ph[r] - phs[r];
        }
        pt.magnetization = estimate_of(mag);
        pt.internal_energy = estimate_of(en);
        pt.pressure = estimate_of(ph);
        pt.pressure_shallow = estimate_of(phs);
        pt.depth_discrepancy = estimate_of(dd);
        if (opt.keep_samples) {
            pt.samples_pressure = std::move(ph);
            pt.samples_magnetization = std::move(mag);
            pt.samples_energy = std::move(en);
        }
        run.points.push_back(std::move(pt));
    }
    return run;
}

// ---- equivalence densities -------------------------------------------------

inline double chi_of(int m, double delta) { return (m + delta) / (2.0 * m + delta); }

// gamma(a) = ((m + delta)/m)(a^(chi-1) - 1) on (0, 1)
inline double gamma_density(double a, int m, double delta) {
    if (a <= 0.0 || a > 1.0) return 0.0;
    return (m + delta) / m * (std::pow(a, chi_of(m, delta) - 1.0) - 1.0);
}

inline double gamma_cdf(double a, int m, double delta) {
    if (a <= 0.0) return 0.0;
    if (a >= 1.0) return 1.0;
    const double chi = chi_of(m, delta);
    return (m + delta) / m * (std::pow(a, chi) / chi - a);
}

// inversion by bisection on the monotone cdf
inline double sample_gamma_age(Stream& s, int m, double delta) {
    const double u = s.uniform();
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gamma_cdf(mid, m, delta) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// f_a(x) = (1-chi) x^-chi / (1 - a^(1-chi)) on [a, 1]
inline double f_density(double x, double a, double chi) {
    if (x < a || x > 1.0) return 0.0;
    return (1.0 - chi) * std::pow(x, -chi) / (1.0 - std::pow(a, 1.0 - chi));
}

inline double sample_f_age(Stream& s, double a, double chi) {
    const double e = 1.0 - chi, lo = std::pow(a, e);
    return std::clamp(std::pow(lo + s.uniform() * (1.0 - lo), 1.0 / e), a, 1.0);
}

// P(A_hat <= x, A_hat1 <= y)
inline double hat_pair_joint_cdf(double x, double y, double chi) {
    x = std::clamp(x, 0.0, 1.0);
    y = std::clamp(y, 0.0, 1.0);
    if (x < y) return x;
    return (std::pow(y, chi) * std::pow(x, 1.0 - chi) - chi * y) / (1.0 - chi);
}

struct AgePair {
    double first;  // A_hat, resp. A_tilde-tilde1 (Young side)
    double second; // A_hat1, resp. A_tilde (Old side)
};

inline AgePair sample_hat_pair(Stream& s, double chi) {
    const double u = s.uniform();
    return {u, u * std::pow(s.uniform(), 1.0 / chi)};
}

inline AgePair sample_tilde_pair(Stream& s, int m, double delta) {
    const double a = sample_gamma_age(s, m, delta);
    return {sample_f_age(s, a, chi_of(m, delta)), a};
}

// P(d_in = l | A = a) for the root: NB with shape m+delta, success a^(1-chi)
inline double root_in_degree_pmf(long l, double a, int m, double delta) {
    return std::exp(log_mixed_poisson_kernel(m + delta, l, std::pow(a, 1.0 - chi_of(m, delta))));
}

// P(d_in = l | tilde root = (a, Old)): shape m+delta+1
inline double old_in_degree_pmf(long l, double a, int m, double delta) {
    return std::exp(log_mixed_poisson_kernel(m + 1.0 + delta, l, std::pow(a, 1.0 - chi_of(m, delta))));
}

} // namespace pam

#endif
