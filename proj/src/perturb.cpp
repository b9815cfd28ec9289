#include "normlap/perturb.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace normlap {

namespace {

void check_vertex(const Graph& g, Vertex x, const char* name) {
    if (x < 0 || x >= g.order()) {
        throw GraphError(std::string("vertex ") + name + "=" + std::to_string(x) + " outside 0.." +
                         std::to_string(g.order() - 1));
    }
}

std::vector<Vertex> identity_map(int n) {
    std::vector<Vertex> map(static_cast<std::size_t>(n));
    std::iota(map.begin(), map.end(), 0);
    return map;
}

}  // namespace

PerturbResult subdivide_edge(const Graph& g, Vertex u, Vertex v) {
    const Edge e{u, v};
    return subdivision_graph(g, std::span<const Edge>(&e, 1));
}

PerturbResult subdivision_graph(const Graph& g, std::span<const Edge> edges) {
    const int n = g.order();
    for (const Edge& e : edges) {
        if (!g.has_edge(e.u, e.v)) {
            throw GraphError("(" + std::to_string(e.u) + "," + std::to_string(e.v) + ") is not an edge");
        }
    }
    std::vector<Edge> listed;
    for (const Edge& e : edges) listed.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
    std::vector<Edge> sorted_listed = listed;
    std::sort(sorted_listed.begin(), sorted_listed.end());
    if (std::adjacent_find(sorted_listed.begin(), sorted_listed.end()) != sorted_listed.end()) {
        throw GraphError("an edge is listed twice; subdivide it again in a separate call");
    }
    if (n + static_cast<int>(listed.size()) > kMaxOrder) throw GraphError("subdivision would exceed 62 vertices");

    std::vector<Edge> out;
    for (const Edge& e : g.edges()) {
        if (!std::binary_search(sorted_listed.begin(), sorted_listed.end(), e)) out.push_back(e);
    }
    PerturbResult r;
    Vertex w = n;
    for (const Edge& e : listed) {
        out.push_back({e.u, w});
        out.push_back({w, e.v});
        r.new_vertices.push_back(w);
        ++w;
    }
    r.result = Graph::from_edges(w, out);
    r.old_to_new = identity_map(n);
    r.disconnected = !is_connected(r.result);
    return r;
}

PerturbResult identify(const Graph& g1, Vertex u, const Graph& g2, Vertex v) {
    check_vertex(g1, u, "u");
    check_vertex(g2, v, "v");
    if (!is_connected(g1) || !is_connected(g2)) throw PreconditionError("identify requires connected graphs");
    const int m = g1.order();
    const int n = g2.order();
    if (m + n - 1 > kMaxOrder) throw GraphError("identification would exceed 62 vertices");

    PerturbResult r;
    r.old_to_new = identity_map(m);
    r.second_to_new.resize(static_cast<std::size_t>(n));
    Vertex next = m;
    for (Vertex y = 0; y < n; ++y) r.second_to_new[static_cast<std::size_t>(y)] = (y == v) ? u : next++;

    std::vector<Edge> edges = g1.edges();
    for (const Edge& e : g2.edges()) {
        edges.push_back({r.second_to_new[static_cast<std::size_t>(e.u)], r.second_to_new[static_cast<std::size_t>(e.v)]});
    }
    r.result = Graph::from_edges(m + n - 1, edges);
    r.merged_vertex = u;
    return r;
}

std::uint64_t transferable_targets(const Graph& g, Vertex u, Vertex v) {
    return g.neighbor_mask(v) & ~g.neighbor_mask(u) & ~(std::uint64_t{1} << u);
}

PerturbResult transfer_edges(const Graph& g, Vertex u, Vertex v, std::span<const Vertex> targets) {
    check_vertex(g, u, "u");
    check_vertex(g, v, "v");
    if (u == v) throw GraphError("edge transfer needs u != v");
    if (targets.empty()) throw GraphError("edge transfer needs at least one target");
    std::uint64_t seen = 0;
    for (Vertex t : targets) {
        check_vertex(g, t, "target");
        if (t == u) throw GraphError("target " + std::to_string(t) + " equals u");
        if (!g.has_edge(v, t)) throw GraphError("target " + std::to_string(t) + " is not a neighbour of v");
        if (g.has_edge(u, t)) throw GraphError("target " + std::to_string(t) + " is already a neighbour of u");
        if ((seen >> t) & 1U) throw GraphError("target " + std::to_string(t) + " listed twice");
        seen |= std::uint64_t{1} << t;
    }

    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
        const bool moved = (e.u == v && ((seen >> e.v) & 1U)) || (e.v == v && ((seen >> e.u) & 1U));
        if (!moved) edges.push_back(e);
    }
    for (Vertex t : targets) edges.push_back({u, t});

    PerturbResult r;
    r.result = Graph::from_edges(g.order(), edges);
    r.old_to_new = identity_map(g.order());
    r.disconnected = !is_connected(r.result);
    return r;
}

}  // namespace normlap
