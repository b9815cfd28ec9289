#include "normlap/search.hpp"

#include "normlap/perturb.hpp"
#include "normlap/spectrum_table.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

namespace normlap {

std::string_view to_string(Operation op) {
    switch (op) {
    case Operation::None: return "none";
    case Operation::Subdivision: return "I";
    case Operation::Identification: return "II";
    case Operation::Transfer: return "III";
    }
    return "?";
}

Operation theorem_operation(TheoremId id) {
    switch (id) {
    case TheoremId::T3_1:
    case TheoremId::C3_2:
    case TheoremId::T4_1:
        return Operation::Subdivision;
    case TheoremId::T3_3:
    case TheoremId::C3_4:
    case TheoremId::C3_5:
    case TheoremId::T4_2:
        return Operation::Identification;
    case TheoremId::T3_6:
    case TheoremId::T4_3:
        return Operation::Transfer;
    default:
        return Operation::None;
    }
}

std::string_view to_string(Direction d) {
    switch (d) {
    case Direction::Less: return "less";
    case Direction::Equal: return "equal";
    case Direction::Greater: return "greater";
    }
    return "?";
}

std::optional<Direction> parse_direction(std::string_view text) {
    if (text == "less") return Direction::Less;
    if (text == "equal") return Direction::Equal;
    if (text == "greater") return Direction::Greater;
    return std::nullopt;
}

Direction classify_direction(double lhs, double rhs, double gap) {
    if (lhs < rhs - gap) return Direction::Less;
    if (lhs > rhs + gap) return Direction::Greater;
    return Direction::Equal;
}

void for_each_connected(int n, const std::function<void(std::uint64_t, const Graph&)>& fn) {
    if (n < 1 || n > kMaxScanOrder) throw std::invalid_argument("enumeration order must be in 1..8");
    const std::uint64_t count = std::uint64_t{1} << (n * (n - 1) / 2);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const Graph g = Graph::from_mask(n, mask);
        if (is_connected(g)) fn(mask, g);
    }
}

std::vector<Graph> enumerate_connected(int n) {
    std::vector<Graph> out;
    for_each_connected(n, [&](std::uint64_t, const Graph& g) { out.push_back(g); });
    return out;
}

std::uint64_t labelled_tree_count(int n) {
    if (n < 1) throw std::invalid_argument("tree order must be positive");
    std::uint64_t c = 1;
    for (int i = 0; i < n - 2; ++i) c *= static_cast<std::uint64_t>(n);
    return c;
}

Graph tree_from_pruefer(int n, std::uint64_t index) {
    if (index >= labelled_tree_count(n)) throw std::out_of_range("Pruefer index out of range");
    if (n == 1) return Graph::from_edges(1, {});
    std::vector<int> code(static_cast<std::size_t>(n - 2));
    for (int i = n - 3; i >= 0; --i) {
        code[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::uint64_t>(n));
        index /= static_cast<std::uint64_t>(n);
    }
    std::vector<int> degree(static_cast<std::size_t>(n), 1);
    for (int c : code) ++degree[static_cast<std::size_t>(c)];
    std::vector<Edge> edges;
    for (int c : code) {
        int leaf = 0;
        while (degree[static_cast<std::size_t>(leaf)] != 1) ++leaf;
        edges.push_back({leaf, c});
        --degree[static_cast<std::size_t>(leaf)];
        --degree[static_cast<std::size_t>(c)];
    }
    int a = -1;
    for (int v = 0; v < n; ++v) {
        if (degree[static_cast<std::size_t>(v)] != 1) continue;
        if (a < 0) {
            a = v;
        } else {
            edges.push_back({a, v});
            break;
        }
    }
    return Graph::from_edges(n, edges);
}

std::vector<NamedFamily> family_catalog() {
    return {{Family::Path, 1},    {Family::Path, 2},     {Family::Path, 3},     {Family::Cycle, 3},
            {Family::Path, 4},    {Family::Cycle, 4},    {Family::Complete, 4}, {Family::Star, 4},
            {Family::Path, 5},    {Family::Cycle, 5},    {Family::Complete, 5}, {Family::Star, 5}};
}

void ScanConfig::validate() const {
    if (n_max < 2 || n_max > kMaxScanOrder) throw std::invalid_argument("n_max must be in 2..8");
    if (max_transfer < 1) throw std::invalid_argument("max_transfer must be at least 1");
    if (witness_cap < 0) throw std::invalid_argument("witness_cap must be non-negative");
    if (pair_order_max < 2 || pair_order_max > kTableMaxOrder) throw std::invalid_argument("pair_order_max must be in 2..7");
    if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

// ---------------------------------------------------------------------------
// Rechecking a serialized instance through the public checkers.

namespace {

std::vector<Vertex> vertices_from(const nlohmann::json& j) {
    std::vector<Vertex> out;
    for (const auto& x : j) out.push_back(x.get<Vertex>());
    return out;
}

}  // namespace

Verdict recheck(const Verdict& v, const CheckOptions& opts) {
    const nlohmann::json& p = v.params;
    if (v.theorem == TheoremId::C2_3) return check_cor_2_3(p.at("n").get<int>(), opts);
    const Graph g = parse_graph6(v.graph6);
    switch (v.theorem) {
    case TheoremId::L2_4: return check_lemma_2_4(g, opts);
    case TheoremId::C2_2: return check_cor_2_2(g, opts);
    case TheoremId::T3_1: return check_thm_3_1(g, p.at("u").get<Vertex>(), p.at("v").get<Vertex>(), opts);
    case TheoremId::T4_1: return check_thm_4_1(g, p.at("u").get<Vertex>(), p.at("v").get<Vertex>(), opts);
    case TheoremId::C3_2: {
        std::vector<Edge> edges;
        for (const auto& e : p.at("edges")) edges.push_back({e.at(0).get<Vertex>(), e.at(1).get<Vertex>()});
        return check_cor_3_2(g, edges, opts);
    }
    case TheoremId::T3_3:
    case TheoremId::C3_4:
    case TheoremId::T4_2: {
        const Graph g2 = parse_graph6(p.at("g2").get<std::string>());
        const Vertex u = p.at("u").get<Vertex>();
        const Vertex w = p.at("v").get<Vertex>();
        if (v.theorem == TheoremId::T3_3) return check_thm_3_3(g, u, g2, w, opts);
        if (v.theorem == TheoremId::C3_4) return check_cor_3_4(g, u, g2, w, opts);
        return check_thm_4_2(g, u, g2, w, opts);
    }
    case TheoremId::C3_5: {
        const auto sub = vertices_from(p.at("subtree"));
        return check_cor_3_5(g, sub, opts);
    }
    case TheoremId::T3_6:
    case TheoremId::T4_3: {
        const auto targets = vertices_from(p.at("targets"));
        const Vertex u = p.at("u").get<Vertex>();
        const Vertex w = p.at("v").get<Vertex>();
        return v.theorem == TheoremId::T3_6 ? check_thm_3_6(g, u, w, targets, opts) : check_thm_4_3(g, u, w, targets, opts);
    }
    default:
        break;
    }
    throw std::invalid_argument("cannot recheck theorem " + std::string(theorem_name(v.theorem)));
}

bool reverifies(const Witness& w, const CheckOptions& opts) {
    const Verdict fresh = recheck(w.verdict, opts);
    return fresh.precondition == w.verdict.precondition && fresh.pass == w.verdict.pass &&
           classify_direction(fresh.lhs, fresh.rhs, opts.strict_gap) == w.direction;
}

// ---------------------------------------------------------------------------
// Scan engine.

namespace {

/// Instance description, turned into a Verdict only when it is stored.
struct Skeleton {
    std::string graph6;
    nlohmann::json params;
};

/// Slice of the scan domain handed to one worker at a time.
struct Unit {
    int phase = 0;
    int order = 0;
    int aux = 0;
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
};

constexpr std::uint64_t kChunk = 2048;

void add_chunks(std::vector<Unit>& units, int phase, int order, int aux, std::uint64_t count) {
    for (std::uint64_t b = 0; b < count; b += kChunk) units.push_back({phase, order, aux, b, std::min(count, b + kChunk)});
}

std::uint64_t mask_count(int n) { return std::uint64_t{1} << (n * (n - 1) / 2); }

/// Phases: 0 enumerated graphs, 1 stream graphs, 2 catalog pairs, 3 enumerated pairs,
/// 4 trees, 5 stars.
std::vector<Unit> plan(TheoremId id, const ScanConfig& c) {
    std::vector<Unit> units;
    const Operation op = theorem_operation(id);
    const bool stream = c.graphs.has_value();
    if (id == TheoremId::C2_3) {
        for (int n = 3; n <= c.n_max; ++n) units.push_back({5, n, 0, 0, 1});
        return units;
    }
    if (id == TheoremId::C3_5) {
        if (stream) {
            add_chunks(units, 1, 0, 0, c.graphs->size());
        } else {
            for (int n = 3; n <= c.n_max; ++n) add_chunks(units, 4, n, 0, labelled_tree_count(n));
        }
        return units;
    }
    if (op == Operation::Identification) {
        if (stream) {
            add_chunks(units, 1, 0, 0, c.graphs->size());
            return units;
        }
        const auto catalog = family_catalog();
        units.push_back({2, 0, 0, 0, catalog.size()});
        const int top = std::min(c.n_max, c.pair_order_max);
        const int min_second = id == TheoremId::C3_4 ? 2 : 1;
        for (int total = 2; total <= top; ++total) {
            for (int n1 = 2; n1 <= total; ++n1) {
                const int n2 = total + 1 - n1;
                if (n2 < min_second) continue;
                add_chunks(units, 3, total, n1, mask_count(n1));
            }
        }
        return units;
    }
    if (stream) {
        add_chunks(units, 1, 0, 0, c.graphs->size());
    } else {
        for (int n = 2; n <= c.n_max; ++n) add_chunks(units, 0, n, 0, mask_count(n));
    }
    return units;
}

double value_of(const Spectrum& s, Target which) { return which == Target::SecondSmallest ? s.lambda2() : s.rho(); }

nlohmann::json vertex_json(std::span<const Vertex> xs) {
    nlohmann::json a = nlohmann::json::array();
    for (Vertex x : xs) a.push_back(x);
    return a;
}

Outcome outcome_of(const Verdict& v) {
    Outcome o;
    o.precondition = v.precondition;
    o.strict_condition = v.strict_condition;
    o.strict_expected = v.strict_expected;
    o.lhs = v.lhs;
    o.rhs = v.rhs;
    o.relation = v.relation;
    o.pass = v.pass;
    return o;
}

/// Visits every instance of one unit. sink(key, outcome, make_skeleton) returns false to stop.
/// Stream instances use key order 0 so that keys grow with the stream index.
template <typename Sink>
class Runner {
public:
    Runner(TheoremId id, const ScanConfig& config, Sink& sink) : id_(id), c_(config), opts_(config.options), sink_(sink) {}

    bool run(const Unit& unit) {
        switch (unit.phase) {
        case 0:
            for (std::uint64_t mask = unit.begin; mask < unit.end; ++mask) {
                const Graph g = Graph::from_mask(unit.order, mask);
                if (!is_connected(g)) continue;
                if (!graph_instances(g, unit.order, mask)) return false;
            }
            return true;
        case 1:
            for (std::uint64_t i = unit.begin; i < unit.end; ++i) {
                const Graph& g = (*c_.graphs)[i];
                const int key_order = 0;
                bool go = true;
                if (id_ == TheoremId::C3_5) {
                    go = tree_instances(g, key_order, i);
                } else if (theorem_operation(id_) == Operation::Identification) {
                    go = stream_pair_instances(g, i);
                } else {
                    go = graph_instances(g, key_order, i);
                }
                if (!go) return false;
            }
            return true;
        case 2:
            return catalog_pairs(unit);
        case 3:
            return enumerated_pairs(unit);
        case 4:
            for (std::uint64_t i = unit.begin; i < unit.end; ++i) {
                if (!tree_instances(tree_from_pruefer(unit.order, i), unit.order, i)) return false;
            }
            return true;
        case 5: {
            const Verdict v = check_cor_2_3(unit.order, opts_);
            return emit({unit.order, 0, 0}, outcome_of(v), [&] { return Skeleton{v.graph6, v.params}; });
        }
        default:
            throw std::logic_error("unknown scan phase");
        }
    }

private:
    template <typename Make>
    bool emit(const ScanKey& key, const Outcome& o, Make&& make) {
        return sink_(key, o, make);
    }

    bool graph_instances(const Graph& g, int key_order, std::uint64_t index) {
        if (g.order() < 2 || !is_connected(g)) return true;
        switch (id_) {
        case TheoremId::L2_4: {
            if (is_complete(g)) return true;
            const Outcome o = evaluate_unconditional(target_value(g, Target::SecondSmallest), 1.0, Relation::LessEq, opts_);
            return emit({key_order, index, 0}, o, [&] { return Skeleton{to_graph6(g), nlohmann::json::object()}; });
        }
        case TheoremId::C2_2: {
            const Verdict v = check_cor_2_2(g, opts_);
            return emit({key_order, index, 0}, outcome_of(v), [&] { return Skeleton{v.graph6, nlohmann::json::object()}; });
        }
        case TheoremId::T3_1:
        case TheoremId::T4_1:
            return subdivision_instances(g, key_order, index);
        case TheoremId::C3_2:
            return subdivision_set_instances(g, key_order, index);
        case TheoremId::T3_6:
        case TheoremId::T4_3:
            return transfer_instances(g, key_order, index);
        default:
            throw std::logic_error("theorem has no graph-level scan");
        }
    }

    bool subdivision_instances(const Graph& g, int key_order, std::uint64_t index) {
        const Target which = theorem_target(id_);
        const Spectrum s = spectrum(g);
        const auto basis = harmonic_eigenfunctions(s, which);
        const double before = value_of(s, which);
        const int n = g.order();
        const bool lookup = n + 1 <= kTableMaxOrder;
        const std::uint64_t mask = lookup ? g.edge_mask() : 0;
        const auto& edges = g.edges();
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const Vertex u = edges[k].u;
            const Vertex v = edges[k].v;
            double after = 0.0;
            if (lookup) {
                std::uint64_t m = mask & ~(std::uint64_t{1} << pair_bit(u, v));
                m |= std::uint64_t{1} << pair_bit(u, n);
                m |= std::uint64_t{1} << pair_bit(v, n);
                after = target_value(n + 1, m, which);
            } else {
                after = target_value(subdivide_edge(g, u, v).result, which);
            }
            const Outcome o = evaluate_subdivision(id_, basis, u, v, before, after, opts_);
            if (!emit({key_order, index, k}, o, [&] { return Skeleton{to_graph6(g), {{"u", u}, {"v", v}}}; })) return false;
        }
        return true;
    }

    bool subdivision_set_instances(const Graph& g, int key_order, std::uint64_t index) {
        const double before = target_value(g, Target::SecondSmallest);
        const auto& edges = g.edges();
        const std::size_t m = edges.size();
        std::uint64_t ordinal = 0;
        auto one = [&](std::vector<Edge> list) {
            const double after = target_value(subdivision_graph(g, list).result, Target::SecondSmallest);
            const Outcome o = evaluate_unconditional(before, after, Relation::GreaterEq, opts_);
            return emit({key_order, index, ordinal++}, o, [&] {
                nlohmann::json a = nlohmann::json::array();
                for (const Edge& e : list) a.push_back({e.u, e.v});
                return Skeleton{to_graph6(g), {{"edges", a}}};
            });
        };
        for (std::size_t i = 0; i < m; ++i) {
            if (!one({edges[i]})) return false;
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                if (!one({edges[i], edges[j]})) return false;
            }
        }
        if (m > 2 && !one(edges)) return false;
        return true;
    }

    bool transfer_instances(const Graph& g, int key_order, std::uint64_t index) {
        const Target which = theorem_target(id_);
        const Spectrum s = spectrum(g);
        const auto basis = harmonic_eigenfunctions(s, which);
        const double before = value_of(s, which);
        const int n = g.order();
        const bool lookup = n <= kTableMaxOrder;
        const std::uint64_t mask = lookup ? g.edge_mask() : 0;
        std::uint64_t ordinal = 0;
        std::vector<Vertex> pool;
        std::vector<Vertex> targets;
        for (Vertex u = 0; u < n; ++u) {
            for (Vertex v = 0; v < n; ++v) {
                if (u == v) continue;
                const std::uint64_t legal = transferable_targets(g, u, v);
                pool.clear();
                for (Vertex t = 0; t < n; ++t)
                    if ((legal >> t) & 1U) pool.push_back(t);
                const int k_max = std::min<int>(c_.max_transfer, static_cast<int>(pool.size()));
                for (int k = 1; k <= k_max; ++k) {
                    // Combinations of size k in lexicographic order.
                    std::vector<int> pick(static_cast<std::size_t>(k));
                    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
                    while (true) {
                        targets.clear();
                        for (int i : pick) targets.push_back(pool[static_cast<std::size_t>(i)]);
                        double after = 0.0;
                        if (lookup) {
                            std::uint64_t m = mask;
                            for (Vertex t : targets) {
                                m &= ~(std::uint64_t{1} << pair_bit(v, t));
                                m |= std::uint64_t{1} << pair_bit(u, t);
                            }
                            after = target_value(n, m, which);
                        } else {
                            after = target_value(transfer_edges(g, u, v, targets).result, which);
                        }
                        const Outcome o = evaluate_transfer(id_, basis, u, v, before, after, opts_);
                        const bool go = emit({key_order, index, ordinal++}, o, [&] {
                            return Skeleton{to_graph6(g), {{"u", u}, {"v", v}, {"targets", vertex_json(targets)}}};
                        });
                        if (!go) return false;
                        int i = k - 1;
                        const int size = static_cast<int>(pool.size());
                        while (i >= 0 && pick[static_cast<std::size_t>(i)] == size - k + i) --i;
                        if (i < 0) break;
                        ++pick[static_cast<std::size_t>(i)];
                        for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
                    }
                }
            }
        }
        return true;
    }

    /// All gluings of g1 (basis computed once) with g2.
    bool pair_instances(const Graph& g1, const std::vector<HarmonicEigenfunction>& basis, double before,
                        const Graph& g2, int key_order, std::uint64_t index, std::uint64_t ordinal_base) {
        const Target which = theorem_target(id_);
        const int n1 = g1.order();
        const int n2 = g2.order();
        const double bound = id_ == TheoremId::C3_4 ? std::min(before, target_value(g2, which)) : 0.0;
        for (Vertex u = 0; u < n1; ++u) {
            for (Vertex v = 0; v < n2; ++v) {
                const double after = target_value(identify(g1, u, g2, v).result, which);
                const Outcome o = id_ == TheoremId::C3_4
                                      ? evaluate_unconditional(after, bound, Relation::LessEq, opts_)
                                      : evaluate_identification(id_, basis, u, before, after, volume(g2), opts_);
                const std::uint64_t ordinal = ordinal_base + static_cast<std::uint64_t>(u * n2 + v);
                const bool go = emit({key_order, index, ordinal}, o, [&] {
                    return Skeleton{to_graph6(g1), {{"u", u}, {"g2", to_graph6(g2)}, {"v", v}}};
                });
                if (!go) return false;
            }
        }
        return true;
    }

    struct First {
        std::vector<HarmonicEigenfunction> basis;
        double value = 0.0;
    };

    First first_graph(const Graph& g1) {
        const Target which = theorem_target(id_);
        if (id_ == TheoremId::C3_4) return {{}, target_value(g1, which)};
        const Spectrum s = spectrum(g1);
        return {harmonic_eigenfunctions(s, which), value_of(s, which)};
    }

    bool usable_second(const Graph& g2) const { return id_ != TheoremId::C3_4 || g2.order() >= 2; }

    bool catalog_pairs(const Unit& unit) {
        const auto catalog = family_catalog();
        const std::uint64_t size = catalog.size();
        for (std::uint64_t i = unit.begin; i < unit.end; ++i) {
            const Graph g1 = make_named(catalog[i]);
            if (g1.order() < 2) continue;
            const First f = first_graph(g1);
            for (std::uint64_t j = 0; j < size; ++j) {
                const Graph g2 = make_named(catalog[j]);
                if (!usable_second(g2)) continue;
                if (!pair_instances(g1, f.basis, f.value, g2, 0, i * size + j, 0)) return false;
            }
        }
        return true;
    }

    bool enumerated_pairs(const Unit& unit) {
        const int n1 = unit.aux;
        const int n2 = unit.order + 1 - n1;
        const auto seconds = enumerate_connected(n2);
        std::vector<std::uint64_t> second_masks;
        for_each_connected(n2, [&](std::uint64_t m, const Graph&) { second_masks.push_back(m); });
        for (std::uint64_t mask1 = unit.begin; mask1 < unit.end; ++mask1) {
            const Graph g1 = Graph::from_mask(n1, mask1);
            if (!is_connected(g1)) continue;
            const First f = first_graph(g1);
            for (std::size_t j = 0; j < seconds.size(); ++j) {
                const std::uint64_t index = (static_cast<std::uint64_t>(n1) << 44) | (mask1 << 22) | second_masks[j];
                if (!pair_instances(g1, f.basis, f.value, seconds[j], unit.order, index, 0)) return false;
            }
        }
        return true;
    }

    bool stream_pair_instances(const Graph& g1, std::uint64_t index) {
        if (g1.order() < 2 || !is_connected(g1)) return true;
        const First f = first_graph(g1);
        const auto catalog = family_catalog();
        for (std::size_t j = 0; j < catalog.size(); ++j) {
            const Graph g2 = make_named(catalog[j]);
            if (!usable_second(g2)) continue;
            if (!pair_instances(g1, f.basis, f.value, g2, 0, index, static_cast<std::uint64_t>(j) << 16)) return false;
        }
        return true;
    }

    bool tree_instances(const Graph& tree, int key_order, std::uint64_t index) {
        if (tree.order() < 3 || !is_tree(tree)) return true;
        const int n = tree.order();
        if (n > 16) throw std::invalid_argument("subtree scan supports trees with at most 16 vertices");
        const double before = target_value(tree, Target::SecondSmallest);
        const std::uint64_t full = (std::uint64_t{1} << n) - 1;
        std::vector<Vertex> verts;
        for (std::uint64_t set = 1; set < full; ++set) {
            const int k = std::popcount(set);
            if (k < 2) continue;
            // Connected in the tree: flood fill from the lowest vertex inside the set.
            std::uint64_t seen = set & (~set + 1);
            std::uint64_t frontier = seen;
            while (frontier) {
                std::uint64_t next = 0;
                for (std::uint64_t f = frontier; f; f &= f - 1) next |= tree.neighbor_mask(std::countr_zero(f));
                next &= set & ~seen;
                seen |= next;
                frontier = next;
            }
            if (seen != set) continue;
            verts.clear();
            for (std::uint64_t s = set; s; s &= s - 1) verts.push_back(std::countr_zero(s));
            double after = 0.0;
            if (k <= kTableMaxOrder) {
                std::uint64_t m = 0;
                for (int a = 0; a < k; ++a)
                    for (int b = a + 1; b < k; ++b)
                        if (tree.has_edge(verts[static_cast<std::size_t>(a)], verts[static_cast<std::size_t>(b)]))
                            m |= std::uint64_t{1} << pair_bit(a, b);
                after = target_value(k, m, Target::SecondSmallest);
            } else {
                after = target_value(induced_subgraph(tree, verts), Target::SecondSmallest);
            }
            const Outcome o = evaluate_unconditional(before, after, Relation::LessEq, opts_);
            if (!emit({key_order, index, set}, o, [&] { return Skeleton{to_graph6(tree), {{"subtree", vertex_json(verts)}}}; })) {
                return false;
            }
        }
        return true;
    }

    TheoremId id_;
    const ScanConfig& c_;
    const CheckOptions& opts_;
    Sink& sink_;
};

Witness materialize(TheoremId id, const ScanKey& key, const Outcome& o, const Skeleton& sk, const CheckOptions& opts,
                    bool& agrees) {
    Verdict probe;
    probe.theorem = id;
    probe.graph6 = sk.graph6;
    probe.params = sk.params;
    Witness w;
    w.key = key;
    w.direction = classify_direction(o.lhs, o.rhs, opts.strict_gap);
    w.verdict = recheck(probe, opts);
    agrees = w.verdict.precondition == o.precondition && w.verdict.pass == o.pass &&
             classify_direction(w.verdict.lhs, w.verdict.rhs, opts.strict_gap) == w.direction;
    return w;
}

/// Collects tallies for one worker. Units arrive in increasing key order, so a bucket
/// that is full already holds this worker's smallest keys.
struct Collector {
    TheoremId id;
    const ScanConfig& config;
    ScanResult& out;

    template <typename Make>
    bool operator()(const ScanKey& key, const Outcome& o, Make& make) {
        const Direction d = classify_direction(o.lhs, o.rhs, config.options.strict_gap);
        CaseTally& t = out.stratum(o.precondition);
        const auto slot = static_cast<std::size_t>(d);
        ++t.counts[slot];
        ++out.instances;
        const std::size_t cap = static_cast<std::size_t>(config.witness_cap);
        const bool keep_witness = t.witnesses[slot].size() < cap;
        const bool keep_violator = !o.pass && out.violators.size() < cap;
        if (!o.pass) {
            ++out.violations;
            ++t.violations;
        }
        if (keep_witness || keep_violator) {
            bool agrees = true;
            Witness w = materialize(id, key, o, make(), config.options, agrees);
            if (!agrees) ++out.reverify_failures;
            if (keep_violator) out.violators.push_back(w);
            if (keep_witness) t.witnesses[slot].push_back(std::move(w));
        }
        return true;
    }
};

void truncate_sorted(std::vector<Witness>& ws, std::size_t cap) {
    std::sort(ws.begin(), ws.end(), [](const Witness& a, const Witness& b) { return a.key < b.key; });
    if (ws.size() > cap) ws.resize(cap);
}

void merge_into(ScanResult& into, ScanResult&& part, std::size_t cap) {
    for (std::size_t s = 0; s < into.strata.size(); ++s) {
        for (std::size_t d = 0; d < 3; ++d) {
            into.strata[s].counts[d] += part.strata[s].counts[d];
            if (d == 0) into.strata[s].violations += part.strata[s].violations;
            auto& ws = into.strata[s].witnesses[d];
            for (auto& w : part.strata[s].witnesses[d]) ws.push_back(std::move(w));
            truncate_sorted(ws, cap);
        }
    }
    into.instances += part.instances;
    into.violations += part.violations;
    into.reverify_failures += part.reverify_failures;
    for (auto& w : part.violators) into.violators.push_back(std::move(w));
    truncate_sorted(into.violators, cap);
}

ScanResult empty_result(TheoremId id) {
    ScanResult r;
    r.theorem = id;
    for (std::size_t s = 0; s < r.strata.size(); ++s) {
        r.strata[s].operation = theorem_operation(id);
        r.strata[s].target = theorem_target(id);
        r.strata[s].state = static_cast<Precondition>(s);
    }
    return r;
}

}  // namespace

ScanResult scan_theorem(TheoremId id, const ScanConfig& config) {
    config.validate();
    const std::vector<Unit> units = plan(id, config);
    const std::size_t cap = static_cast<std::size_t>(config.witness_cap);
    const int workers = std::min<int>(config.jobs, static_cast<int>(std::max<std::size_t>(units.size(), 1)));

    std::vector<ScanResult> parts(static_cast<std::size_t>(workers), empty_result(id));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](int w) {
        try {
            Collector sink{id, config, parts[static_cast<std::size_t>(w)]};
            Runner<Collector> runner(id, config, sink);
            for (std::size_t i = next++; i < units.size(); i = next++) runner.run(units[i]);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = units.size();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ScanResult result = empty_result(id);
    for (auto& p : parts) merge_into(result, std::move(p), cap);
    return result;
}

std::optional<Witness> find_witness(TheoremId id, Precondition state, Direction direction, const ScanConfig& config) {
    config.validate();
    std::optional<Witness> found;
    auto sink = [&](const ScanKey& key, const Outcome& o, auto& make) {
        if (o.precondition != state || classify_direction(o.lhs, o.rhs, config.options.strict_gap) != direction) return true;
        bool agrees = true;
        Witness w = materialize(id, key, o, make(), config.options, agrees);
        if (!agrees) return true;
        found = std::move(w);
        return false;
    };
    Runner<decltype(sink)> runner(id, config, sink);
    for (const Unit& u : plan(id, config)) {
        if (!runner.run(u)) break;
    }
    return found;
}

// ---------------------------------------------------------------------------
// Output.

nlohmann::json to_json(const Witness& w) {
    return {{"key", {w.key.order, w.key.index, w.key.ordinal}},
            {"direction", std::string(to_string(w.direction))},
            {"verdict", to_json(w.verdict)}};
}

namespace {

std::string target_name(Target t) { return t == Target::SecondSmallest ? "lambda2" : "rho"; }

bool used(const CaseTally& t) { return t.total() > 0; }

}  // namespace

void write_scan_jsonl(std::ostream& out, const ScanResult& r) {
    const std::string theorem(theorem_name(r.theorem));
    for (const CaseTally& t : r.strata) {
        if (!used(t)) continue;
        nlohmann::json line = {{"type", "tally"},
                               {"theorem", theorem},
                               {"operation", std::string(to_string(t.operation))},
                               {"target", target_name(t.target)},
                               {"precondition", std::string(to_string(t.state))},
                               {"counts", {{"less", t.counts[0]}, {"equal", t.counts[1]}, {"greater", t.counts[2]}}},
                               {"total", t.total()},
                               {"violations", t.violations}};
        out << line.dump() << '\n';
    }
    for (const CaseTally& t : r.strata) {
        for (std::size_t d = 0; d < 3; ++d) {
            for (const Witness& w : t.witnesses[d]) {
                nlohmann::json line = to_json(w);
                line["type"] = "witness";
                line["precondition"] = std::string(to_string(t.state));
                out << line.dump() << '\n';
            }
        }
    }
    for (const Witness& w : r.violators) {
        nlohmann::json line = to_json(w);
        line["type"] = "violation";
        out << line.dump() << '\n';
    }
    nlohmann::json summary = {{"type", "summary"},
                              {"theorem", theorem},
                              {"instances", r.instances},
                              {"violations", r.violations},
                              {"reverify_failures", r.reverify_failures}};
    out << summary.dump() << '\n';
}

void write_scan_table(std::ostream& out, const ScanResult& r) {
    out << theorem_name(r.theorem) << "  operation " << to_string(theorem_operation(r.theorem)) << "  target "
        << target_name(theorem_target(r.theorem)) << '\n';
    out << std::left << std::setw(14) << "stratum" << std::right << std::setw(12) << "less" << std::setw(12) << "equal"
        << std::setw(12) << "greater" << std::setw(12) << "total" << '\n';
    for (const CaseTally& t : r.strata) {
        if (!used(t)) continue;
        out << std::left << std::setw(14) << to_string(t.state) << std::right << std::setw(12) << t.counts[0]
            << std::setw(12) << t.counts[1] << std::setw(12) << t.counts[2] << std::setw(12) << t.total() << '\n';
    }
    out << "instances " << r.instances << "  violations " << r.violations << "  reverify failures "
        << r.reverify_failures << '\n';
    for (const CaseTally& t : r.strata) {
        for (std::size_t d = 0; d < 3; ++d) {
            for (const Witness& w : t.witnesses[d]) {
                out << "  " << to_string(t.state) << '/' << to_string(w.direction) << "  " << w.verdict.graph6 << "  "
                    << w.verdict.params.dump() << "  " << std::setprecision(6) << w.verdict.lhs << ' '
                    << to_string(w.verdict.relation) << ' ' << w.verdict.rhs << '\n';
            }
        }
    }
    for (const Witness& w : r.violators) {
        out << "  VIOLATION  " << w.verdict.graph6 << "  " << w.verdict.params.dump() << "  " << std::setprecision(6)
            << w.verdict.lhs << ' ' << to_string(w.verdict.relation) << ' ' << w.verdict.rhs << '\n';
    }
}

void write_scan_csv(std::ostream& out, const ScanResult& r) {
    out << "theorem,operation,target,precondition,less,equal,greater,total\n";
    for (const CaseTally& t : r.strata) {
        if (!used(t)) continue;
        out << theorem_name(r.theorem) << ',' << to_string(t.operation) << ',' << target_name(t.target) << ','
            << to_string(t.state) << ',' << t.counts[0] << ',' << t.counts[1] << ',' << t.counts[2] << ',' << t.total()
            << '\n';
    }
}

}  // namespace normlap
