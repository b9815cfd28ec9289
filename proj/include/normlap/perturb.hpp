#pragma once

#include "normlap/graph.hpp"

#include <optional>
#include <span>
#include <vector>

namespace normlap {

/// A perturbed graph together with the vertex bookkeeping between input and result.
struct PerturbResult {
    Graph result;
    /// Index in `result` of each vertex of the (first) input graph.
    std::vector<Vertex> old_to_new;
    /// Index in `result` of each vertex of the second input graph (identify only).
    std::vector<Vertex> second_to_new;
    /// Vertices created by the operation (subdivision vertices), in creation order.
    std::vector<Vertex> new_vertices;
    /// The glued vertex of an identification.
    std::optional<Vertex> merged_vertex;
    /// Set when the result is disconnected (edge transfer can isolate v).
    bool disconnected = false;
};

/// Replaces edge uv by the path u-w-v, with w = n. Throws GraphError if uv is not an edge.
PerturbResult subdivide_edge(const Graph& g, Vertex u, Vertex v);

/// Inserts one new vertex into each listed edge, in list order (new indices n, n+1, ...).
PerturbResult subdivision_graph(const Graph& g, std::span<const Edge> edges);

/// Glues u in g1 to v in g2. g1 keeps labels 0..m-1; the remaining g2 vertices take
/// m.. in increasing g2 order. Throws PreconditionError for disconnected inputs.
PerturbResult identify(const Graph& g1, Vertex u, const Graph& g2, Vertex v);

/// Deletes v-t and adds u-t for every t in `targets`. Each target must be a neighbour
/// of v, not a neighbour of u, and differ from u. The result may be disconnected.
PerturbResult transfer_edges(const Graph& g, Vertex u, Vertex v, std::span<const Vertex> targets);

/// Targets legal for an edge transfer from v to u: N(v) \ N(u) \ {u}, as a bitset.
std::uint64_t transferable_targets(const Graph& g, Vertex u, Vertex v);

}  // namespace normlap
