#ifndef PAM_GRAPH_HPP
#define PAM_GRAPH_HPP

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace pam {

// Undirected multigraph on vertices 1..n. Self-loops count twice towards the
// degree. Edges are kept in insertion order; generators insert them in the
// order (v, j), so the list doubles as the construction history.
struct MultiGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<long> degree{0}; // degree[0] unused

    MultiGraph() = default;
    explicit MultiGraph(int vertices) : n(vertices), degree(static_cast<std::size_t>(vertices) + 1, 0) {}

    int add_vertex() {
        ++n;
        degree.push_back(0);
        return n;
    }

    void add_edge(int u, int v) {
        if (u < 1 || v < 1 || u > n || v > n) throw std::out_of_range("edge endpoint out of range");
        edges.emplace_back(u, v);
        ++degree[u];
        ++degree[v];
    }

    std::size_t edge_count() const { return edges.size(); }

    long total_degree() const {
        long t = 0;
        for (int v = 1; v <= n; ++v) t += degree[v];
        return t;
    }

    std::vector<long> recount_degrees() const {
        std::vector<long> d(static_cast<std::size_t>(n) + 1, 0);
        for (auto [u, v] : edges) {
            ++d[u];
            ++d[v];
        }
        return d;
    }

    bool operator==(const MultiGraph& o) const { return n == o.n && edges == o.edges; }
};

// Merge consecutive groups of sizes r_1, r_2, ... into single vertices.
inline MultiGraph collapse(const MultiGraph& g, const std::vector<int>& r) {
    if (r.empty()) throw ParameterError("collapse: empty group specification");
    std::vector<int> group(static_cast<std::size_t>(g.n) + 1, 0);
    int v = 1, k = 0;
    long covered = 0;
    while (v <= g.n) {
        if (k >= static_cast<int>(r.size()))
            throw ParameterError("collapse: group sizes do not cover all vertices");
        if (r[k] < 1) throw ParameterError("collapse: group sizes must be positive");
        covered += r[k];
        ++k;
        for (; v <= g.n && v <= covered; ++v) group[v] = k;
    }
    MultiGraph out(k);
    for (auto [a, b] : g.edges) out.add_edge(group[a], group[b]);
    return out;
}

struct DegreeStats {
    long max_degree = 0;
    long total_degree = 0;
    std::map<long, long> histogram; // degree -> vertex count
};

inline DegreeStats degree_stats(const MultiGraph& g) {
    DegreeStats s;
    for (int v = 1; v <= g.n; ++v) {
        s.max_degree = std::max(s.max_degree, g.degree[v]);
        s.total_degree += g.degree[v];
        ++s.histogram[g.degree[v]];
    }
    return s;
}

inline long max_degree(const MultiGraph& g) {
    long m = 0;
    for (int v = 1; v <= g.n; ++v) m = std::max(m, g.degree[v]);
    return m;
}

// "n e" header, then one "u v" line per edge
inline void write_edge_list(std::ostream& os, const MultiGraph& g) {
    os << g.n << ' ' << g.edges.size() << '\n';
    for (auto [u, v] : g.edges) os << u << ' ' << v << '\n';
}

// leading "#" comment lines are skipped
inline MultiGraph read_edge_list(std::istream& is) {
    while (is >> std::ws && is.peek() == '#') is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    long n = 0, e = 0;
    if (!(is >> n >> e) || n < 0 || e < 0) throw std::runtime_error("edge list: bad header");
    MultiGraph g(static_cast<int>(n));
    for (long i = 0; i < e; ++i) {
        int u = 0, v = 0;
        if (!(is >> u >> v)) throw std::runtime_error("edge list: truncated at edge " + std::to_string(i + 1));
        g.add_edge(u, v);
    }
    return g;
}

} // namespace pam

#endif
