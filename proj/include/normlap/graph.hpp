#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace normlap {

using Vertex = int;

/// Largest order representable by the single-byte graph6 header.
inline constexpr int kMaxOrder = 62;

/// Unordered vertex pair, stored with u < v once it belongs to a Graph.
struct Edge {
    Vertex u = 0;
    Vertex v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation's structural precondition does not hold
/// (disconnected input, complete graph where a non-complete one is needed, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Simple undirected graph on vertices 0..n-1. Immutable after construction.
class Graph {
public:
    /// The single-vertex graph.
    Graph() = default;

    /// Builds a graph, collapsing duplicate pairs and normalizing each to u < v.
    /// Throws GraphError for endpoints outside 0..n-1, self-loops, or n outside 1..62.
    static Graph from_edges(int n, std::span<const Edge> edges);
    static Graph from_edges(int n, std::initializer_list<Edge> edges) {
        return from_edges(n, std::span<const Edge>(edges.begin(), edges.size()));
    }

    /// Graph whose edge (i,j), i<j, is present iff bit j(j-1)/2+i of mask is set.
    /// This is the graph6 bit order, so masks enumerate graphs in graph6 order.
    static Graph from_mask(int n, std::uint64_t mask);

    int order() const noexcept { return n_; }
    std::size_t size() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<int>& degrees() const noexcept { return degrees_; }
    int degree(Vertex v) const { return degrees_.at(static_cast<std::size_t>(v)); }

    bool has_edge(Vertex u, Vertex v) const;
    /// Neighbour set of v as a bitset (bit w set iff vw is an edge).
    std::uint64_t neighbor_mask(Vertex v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
    std::vector<Vertex> neighbors(Vertex v) const;

    /// Edge mask in graph6 bit order; requires n <= 11 so that all pairs fit in 64 bits.
    std::uint64_t edge_mask() const;

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    int n_ = 1;
    std::vector<Edge> edges_;
    std::vector<int> degrees_ = std::vector<int>(1, 0);
    std::vector<std::uint64_t> adjacency_ = std::vector<std::uint64_t>(1, 0);
};

/// Bit index of pair (i, j) in graph6 column-major order.
constexpr int pair_bit(Vertex i, Vertex j) noexcept {
    if (i > j) {
        const Vertex t = i;
        i = j;
        j = t;
    }
    return j * (j - 1) / 2 + i;
}

enum class Family { Path, Cycle, Star, Complete };

struct NamedFamily {
    Family kind = Family::Path;
    int n = 1;
};

/// Canonical labelled representative: path 0-1-..-(n-1), cycle closes (n-1,0),
/// star centred at 0, complete on all pairs.
Graph make_named(NamedFamily family);

/// Parses "kind:n" with kind one of path, cycle, star, complete.
NamedFamily parse_family(std::string_view text);
std::string to_string(NamedFamily family);

bool is_connected(const Graph& g);
/// Sum of degrees, i.e. 2|E|.
long volume(const Graph& g);
bool is_complete(const Graph& g);
bool is_tree(const Graph& g);
bool is_bipartite(const Graph& g);

/// Subgraph induced by `vertices`, relabelled to 0..k-1 in ascending vertex order.
Graph induced_subgraph(const Graph& g, std::span<const Vertex> vertices);

// ---------------------------------------------------------------------------
// graph6 (single-byte size header only, n <= 62)

enum class Graph6ErrorKind {
    BadCharacter,     ///< byte outside 63..126
    Truncated,        ///< fewer payload bytes than n(n-1)/2 bits require
    TrailingData,     ///< more payload bytes than required, or non-zero padding bits
    UnsupportedSize,  ///< multi-byte size header (n >= 63) or n = 0
};

class Graph6Error : public std::invalid_argument {
public:
    Graph6Error(Graph6ErrorKind kind, const std::string& what)
        : std::invalid_argument(what), kind_(kind) {}
    Graph6ErrorKind kind() const noexcept { return kind_; }

private:
    Graph6ErrorKind kind_;
};

/// Decodes one graph6 line. Surrounding whitespace (e.g. a trailing newline) is ignored.
Graph parse_graph6(std::string_view text);
std::string to_graph6(const Graph& g);

/// Reads graph6 lines from a stream, skipping blank lines and ">>graph6<<" headers.
std::vector<Graph> read_graph6_stream(std::istream& in);

// ---------------------------------------------------------------------------
// Edge-list text: first line "n m", then m lines "u v"; '#' starts a comment.

Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace normlap
