#include "normlap/graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace normlap {

namespace {

std::string pair_text(Vertex u, Vertex v) {
    std::ostringstream os;
    os << "(" << u << "," << v << ")";
    return os.str();
}

void check_order(int n) {
    if (n < 1 || n > kMaxOrder) {
        throw GraphError("graph order " + std::to_string(n) + " outside 1.." + std::to_string(kMaxOrder));
    }
}

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

Graph Graph::from_edges(int n, std::span<const Edge> edges) {
    check_order(n);
    Graph g;
    g.n_ = n;
    g.degrees_.assign(static_cast<std::size_t>(n), 0);
    g.adjacency_.assign(static_cast<std::size_t>(n), 0);
    g.edges_.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
            throw GraphError("edge " + pair_text(e.u, e.v) + " has an endpoint outside 0.." + std::to_string(n - 1));
        }
        if (e.u == e.v) {
            throw GraphError("self-loop " + pair_text(e.u, e.v));
        }
        g.edges_.push_back(Edge{std::min(e.u, e.v), std::max(e.u, e.v)});
    }
    std::sort(g.edges_.begin(), g.edges_.end());
    g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
    for (const Edge& e : g.edges_) {
        ++g.degrees_[static_cast<std::size_t>(e.u)];
        ++g.degrees_[static_cast<std::size_t>(e.v)];
        g.adjacency_[static_cast<std::size_t>(e.u)] |= std::uint64_t{1} << e.v;
        g.adjacency_[static_cast<std::size_t>(e.v)] |= std::uint64_t{1} << e.u;
    }
    return g;
}

Graph Graph::from_mask(int n, std::uint64_t mask) {
    check_order(n);
    if (n > 11) throw GraphError("edge masks are limited to n <= 11");
    std::vector<Edge> edges;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            if ((mask >> pair_bit(i, j)) & 1U) edges.push_back(Edge{i, j});
        }
    }
    return from_edges(n, edges);
}

bool Graph::has_edge(Vertex u, Vertex v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) return false;
    return (adjacency_[static_cast<std::size_t>(u)] >> v) & 1U;
}

std::vector<Vertex> Graph::neighbors(Vertex v) const {
    std::vector<Vertex> out;
    std::uint64_t bits = neighbor_mask(v);
    while (bits != 0) {
        out.push_back(std::countr_zero(bits));
        bits &= bits - 1;
    }
    return out;
}

std::uint64_t Graph::edge_mask() const {
    if (n_ > 11) throw GraphError("edge masks are limited to n <= 11");
    std::uint64_t mask = 0;
    for (const Edge& e : edges_) mask |= std::uint64_t{1} << pair_bit(e.u, e.v);
    return mask;
}

Graph make_named(NamedFamily family) {
    const int n = family.n;
    if (n < 1) throw GraphError("family order must be at least 1");
    std::vector<Edge> edges;
    switch (family.kind) {
    case Family::Path:
        for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
        break;
    case Family::Cycle:
        if (n < 3) throw GraphError("cycle requires n >= 3");
        for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
        edges.push_back({n - 1, 0});
        break;
    case Family::Star:
        for (int i = 1; i < n; ++i) edges.push_back({0, i});
        break;
    case Family::Complete:
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < j; ++i) edges.push_back({i, j});
        break;
    }
    return Graph::from_edges(n, edges);
}

NamedFamily parse_family(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw GraphError("family must look like kind:n, got '" + std::string(text) + "'");
    }
    const std::string_view kind = text.substr(0, colon);
    const std::string number(text.substr(colon + 1));
    NamedFamily family;
    if (kind == "path") {
        family.kind = Family::Path;
    } else if (kind == "cycle") {
        family.kind = Family::Cycle;
    } else if (kind == "star") {
        family.kind = Family::Star;
    } else if (kind == "complete") {
        family.kind = Family::Complete;
    } else {
        throw GraphError("unknown family '" + std::string(kind) + "'");
    }
    std::size_t used = 0;
    try {
        family.n = std::stoi(number, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != number.size()) throw GraphError("bad family order '" + number + "'");
    return family;
}

std::string to_string(NamedFamily family) {
    const char* kind = "path";
    switch (family.kind) {
    case Family::Path: kind = "path"; break;
    case Family::Cycle: kind = "cycle"; break;
    case Family::Star: kind = "star"; break;
    case Family::Complete: kind = "complete"; break;
    }
    return std::string(kind) + ":" + std::to_string(family.n);
}

bool is_connected(const Graph& g) {
    const int n = g.order();
    const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    std::uint64_t seen = 1;
    std::uint64_t frontier = 1;
    while (frontier != 0) {
        std::uint64_t next = 0;
        std::uint64_t bits = frontier;
        while (bits != 0) {
            next |= g.neighbor_mask(std::countr_zero(bits));
            bits &= bits - 1;
        }
        frontier = next & ~seen;
        seen |= next;
    }
    return seen == all;
}

long volume(const Graph& g) {
    long total = 0;
    for (int d : g.degrees()) total += d;
    return total;
}

bool is_complete(const Graph& g) {
    const std::size_t n = static_cast<std::size_t>(g.order());
    return g.size() == n * (n - 1) / 2;
}

bool is_tree(const Graph& g) {
    return is_connected(g) && g.size() + 1 == static_cast<std::size_t>(g.order());
}

bool is_bipartite(const Graph& g) {
    const int n = g.order();
    std::vector<int> side(static_cast<std::size_t>(n), -1);
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < n; ++s) {
        if (side[static_cast<std::size_t>(s)] != -1) continue;
        side[static_cast<std::size_t>(s)] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            const Vertex x = stack.back();
            stack.pop_back();
            for (Vertex y : g.neighbors(x)) {
                auto& sy = side[static_cast<std::size_t>(y)];
                if (sy == -1) {
                    sy = 1 - side[static_cast<std::size_t>(x)];
                    stack.push_back(y);
                } else if (sy == side[static_cast<std::size_t>(x)]) {
                    return false;
                }
            }
        }
    }
    return true;
}

Graph induced_subgraph(const Graph& g, std::span<const Vertex> vertices) {
    std::vector<Vertex> sorted(vertices.begin(), vertices.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty()) throw GraphError("induced subgraph needs at least one vertex");
    std::vector<int> index(static_cast<std::size_t>(g.order()), -1);
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const Vertex v = sorted[k];
        if (v < 0 || v >= g.order()) throw GraphError("vertex " + std::to_string(v) + " out of range");
        index[static_cast<std::size_t>(v)] = static_cast<int>(k);
    }
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
        const int a = index[static_cast<std::size_t>(e.u)];
        const int b = index[static_cast<std::size_t>(e.v)];
        if (a >= 0 && b >= 0) edges.push_back({a, b});
    }
    return Graph::from_edges(static_cast<int>(sorted.size()), edges);
}

// ---------------------------------------------------------------------------
// graph6

Graph parse_graph6(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw Graph6Error(Graph6ErrorKind::Truncated, "empty graph6 string");
    for (char c : text) {
        const int b = static_cast<unsigned char>(c);
        if (b < 63 || b > 126) {
            throw Graph6Error(Graph6ErrorKind::BadCharacter,
                              "graph6 byte " + std::to_string(b) + " outside 63..126");
        }
    }
    const int n = static_cast<unsigned char>(text[0]) - 63;
    if (n >= 63) throw Graph6Error(Graph6ErrorKind::UnsupportedSize, "multi-byte graph6 size headers are not supported");
    if (n == 0) throw Graph6Error(Graph6ErrorKind::UnsupportedSize, "graph6 order 0 is not supported");

    const std::size_t bits = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
    const std::size_t bytes = (bits + 5) / 6;
    const std::string_view payload = text.substr(1);
    if (payload.size() < bytes) {
        throw Graph6Error(Graph6ErrorKind::Truncated, "graph6 payload has " + std::to_string(payload.size()) +
                                                          " bytes, expected " + std::to_string(bytes));
    }
    if (payload.size() > bytes) {
        throw Graph6Error(Graph6ErrorKind::TrailingData, "graph6 payload has " + std::to_string(payload.size()) +
                                                             " bytes, expected " + std::to_string(bytes));
    }

    std::vector<Edge> edges;
    std::size_t k = 0;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i, ++k) {
            const int group = static_cast<unsigned char>(payload[k / 6]) - 63;
            if ((group >> (5 - k % 6)) & 1) edges.push_back({i, j});
        }
    }
    for (; k < bytes * 6; ++k) {
        const int group = static_cast<unsigned char>(payload[k / 6]) - 63;
        if ((group >> (5 - k % 6)) & 1) throw Graph6Error(Graph6ErrorKind::TrailingData, "non-zero graph6 padding bits");
    }
    return Graph::from_edges(n, edges);
}

std::string to_graph6(const Graph& g) {
    const int n = g.order();
    if (n < 1 || n > kMaxOrder) throw GraphError("graph6 output requires 1 <= n <= 62");
    const std::size_t bits = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
    std::string payload((bits + 5) / 6, '\0');
    std::size_t k = 0;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i, ++k) {
            if (g.has_edge(i, j)) payload[k / 6] = static_cast<char>(payload[k / 6] | (1 << (5 - k % 6)));
        }
    }
    std::string out(1, static_cast<char>(63 + n));
    for (char c : payload) out.push_back(static_cast<char>(c + 63));
    return out;
}

std::vector<Graph> read_graph6_stream(std::istream& in) {
    std::vector<Graph> graphs;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.starts_with(">>graph6<<")) view.remove_prefix(10);
        if (view.empty()) continue;
        graphs.push_back(parse_graph6(view));
    }
    return graphs;
}

// ---------------------------------------------------------------------------
// edge list

Graph read_edge_list(std::istream& in) {
    std::vector<long> numbers;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string token;
        while (fields >> token) {
            std::size_t used = 0;
            long value = 0;
            try {
                value = std::stol(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != token.size()) throw GraphError("edge list: bad integer '" + token + "'");
            numbers.push_back(value);
        }
    }
    if (numbers.size() < 2) throw GraphError("edge list: missing 'n m' header");
    const long n = numbers[0];
    const long m = numbers[1];
    if (m < 0 || numbers.size() != static_cast<std::size_t>(2 + 2 * m)) {
        throw GraphError("edge list: header declares " + std::to_string(m) + " edges, found " +
                         std::to_string((numbers.size() - 2) / 2) + " pairs");
    }
    if (n < 1 || n > kMaxOrder) check_order(static_cast<int>(std::clamp<long>(n, -1, kMaxOrder + 1)));
    std::vector<Edge> edges;
    for (long k = 0; k < m; ++k) {
        const long u = numbers[static_cast<std::size_t>(2 + 2 * k)];
        const long v = numbers[static_cast<std::size_t>(3 + 2 * k)];
        if (u < 0 || u >= n || v < 0 || v >= n) {
            throw GraphError("edge list: edge " + pair_text(static_cast<Vertex>(u), static_cast<Vertex>(v)) +
                             " out of range");
        }
        edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    }
    return Graph::from_edges(static_cast<int>(n), edges);
}

Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot open edge list '" + path + "'");
    return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.order() << " " << g.size() << "\n";
    for (const Edge& e : g.edges()) out << e.u << " " << e.v << "\n";
}

}  // namespace normlap
