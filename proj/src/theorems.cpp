#include "normlap/theorems.hpp"

#include "normlap/perturb.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <limits>
#include <utility>

namespace normlap {

namespace {

constexpr std::array<std::pair<TheoremId, std::string_view>, 12> kNames{{
    {TheoremId::L2_4, "L2.4"},
    {TheoremId::C2_2, "C2.2"},
    {TheoremId::C2_3, "C2.3"},
    {TheoremId::T3_1, "T3.1"},
    {TheoremId::C3_2, "C3.2"},
    {TheoremId::T3_3, "T3.3"},
    {TheoremId::C3_4, "C3.4"},
    {TheoremId::C3_5, "C3.5"},
    {TheoremId::T3_6, "T3.6"},
    {TheoremId::T4_1, "T4.1"},
    {TheoremId::T4_2, "T4.2"},
    {TheoremId::T4_3, "T4.3"},
}};

bool relation_ok(double lhs, double rhs, Relation relation, double tol) {
    return relation == Relation::GreaterEq ? lhs >= rhs - tol : lhs <= rhs + tol;
}

bool strictly(double lhs, double rhs, Relation relation, double gap) {
    return relation == Relation::GreaterEq ? lhs - rhs > gap : rhs - lhs > gap;
}

double sup_norm(std::span<const double> f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

double at(const HarmonicEigenfunction& h, Vertex x) { return h.f[static_cast<std::size_t>(x)]; }

Outcome finish(Outcome o, const CheckOptions& opts) {
    if (o.precondition == Precondition::Fails) {
        o.pass = true;
        return o;
    }
    o.pass = relation_ok(o.lhs, o.rhs, o.relation, opts.tol);
    if (o.strict_expected) o.pass = o.pass && strictly(o.lhs, o.rhs, o.relation, opts.strict_gap);
    return o;
}

Verdict to_verdict(TheoremId id, const Outcome& o, const CheckOptions& opts) {
    Verdict v;
    v.theorem = id;
    v.precondition = o.precondition;
    v.strict_condition = o.strict_condition;
    v.lhs = o.lhs;
    v.rhs = o.rhs;
    v.relation = o.relation;
    v.strict_expected = o.strict_expected;
    v.pass = o.pass;
    v.tolerance = opts.tol;
    return v;
}

void require_connected(const Graph& g, const char* what) {
    if (!is_connected(g)) throw PreconditionError(std::string(what) + " must be connected");
}

void require_order2(const Graph& g, const char* what) {
    if (g.order() < 2) throw PreconditionError(std::string(what) + " needs at least 2 vertices");
}

void require_vertex(const Graph& g, Vertex x, const char* what) {
    if (x < 0 || x >= g.order()) throw GraphError(std::string(what) + " vertex " + std::to_string(x) + " out of range");
}

nlohmann::json vertex_list(std::span<const Vertex> xs) {
    nlohmann::json a = nlohmann::json::array();
    for (Vertex x : xs) a.push_back(x);
    return a;
}

std::vector<BasisReport> reports(std::span<const HarmonicEigenfunction> basis, Vertex u, Vertex v,
                                 const std::function<bool(const HarmonicEigenfunction&)>& pred) {
    std::vector<BasisReport> out;
    for (const auto& h : basis) out.push_back({at(h, u), at(h, v), pred(h)});
    return out;
}

// Predicates shared by kernels and verdict reports.
struct Predicates {
    const CheckOptions& opts;

    bool zero(double x) const { return std::abs(x) <= opts.zero_tol; }
    bool both_nonzero(const HarmonicEigenfunction& h, Vertex u, Vertex v) const {
        return !zero(at(h, u)) && !zero(at(h, v));
    }
    bool product_nonnegative(const HarmonicEigenfunction& h, Vertex u, Vertex v) const {
        const double a = at(h, u);
        const double b = at(h, v);
        return zero(a) || zero(b) || ((a > 0) == (b > 0));
    }
    bool product_positive(const HarmonicEigenfunction& h, Vertex u, Vertex v) const {
        return at(h, u) * at(h, v) > opts.strict_product;
    }
    bool equal_values(const HarmonicEigenfunction& h, Vertex u, Vertex v) const {
        return std::abs(at(h, u) - at(h, v)) <= opts.zero_tol * sup_norm(h.f);
    }
};

struct Original {
    Spectrum spectrum;
    std::vector<HarmonicEigenfunction> basis;
};

Original analyse(const Graph& g, Target which) {
    Spectrum s = spectrum(g);
    auto basis = harmonic_eigenfunctions(s, which);
    return {std::move(s), std::move(basis)};
}

double target_value(const Spectrum& s, Target which) { return which == Target::SecondSmallest ? s.lambda2() : s.rho(); }

}  // namespace

std::string_view theorem_name(TheoremId id) {
    for (const auto& [k, name] : kNames)
        if (k == id) return name;
    return "?";
}

std::optional<TheoremId> parse_theorem(std::string_view text) {
    for (const auto& [k, name] : kNames)
        if (name == text) return k;
    return std::nullopt;
}

Target theorem_target(TheoremId id) {
    switch (id) {
    case TheoremId::T4_1:
    case TheoremId::T4_2:
    case TheoremId::T4_3:
        return Target::Largest;
    default:
        return Target::SecondSmallest;
    }
}

std::string_view to_string(Precondition p) {
    switch (p) {
    case Precondition::Holds: return "Holds";
    case Precondition::Fails: return "Fails";
    case Precondition::Ambiguous: return "Ambiguous";
    case Precondition::Unconditional: return "Unconditional";
    }
    return "?";
}

std::optional<Precondition> parse_precondition(std::string_view text) {
    for (Precondition p : {Precondition::Holds, Precondition::Fails, Precondition::Ambiguous, Precondition::Unconditional})
        if (to_string(p) == text) return p;
    return std::nullopt;
}

std::string_view to_string(Relation r) { return r == Relation::LessEq ? "<=" : ">="; }

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& b : v.basis) basis.push_back({{"u", b.at_u}, {"v", b.at_v}, {"satisfies", b.satisfies}});
    return {
        {"theorem", theorem_name(v.theorem)},
        {"precondition", to_string(v.precondition)},
        {"strict_condition", to_string(v.strict_condition)},
        {"lhs", v.lhs},
        {"rhs", v.rhs},
        {"relation", to_string(v.relation)},
        {"strict_expected", v.strict_expected},
        {"pass", v.pass},
        {"tolerance", v.tolerance},
        {"graph6", v.graph6},
        {"params", v.params},
        {"basis", basis},
    };
}

Verdict verdict_from_json(const nlohmann::json& j) {
    Verdict v;
    const auto id = parse_theorem(j.at("theorem").get<std::string>());
    const auto pre = parse_precondition(j.at("precondition").get<std::string>());
    const auto strict = parse_precondition(j.value("strict_condition", std::string("Unconditional")));
    if (!id || !pre || !strict) throw std::invalid_argument("unknown theorem or precondition in verdict JSON");
    const std::string relation = j.at("relation").get<std::string>();
    if (relation != "<=" && relation != ">=") throw std::invalid_argument("bad relation '" + relation + "'");
    v.theorem = *id;
    v.precondition = *pre;
    v.strict_condition = *strict;
    v.lhs = j.at("lhs").get<double>();
    v.rhs = j.at("rhs").get<double>();
    v.relation = relation == "<=" ? Relation::LessEq : Relation::GreaterEq;
    v.strict_expected = j.at("strict_expected").get<bool>();
    v.pass = j.at("pass").get<bool>();
    v.tolerance = j.value("tolerance", 1e-8);
    v.graph6 = j.at("graph6").get<std::string>();
    v.params = j.value("params", nlohmann::json::object());
    for (const auto& b : j.value("basis", nlohmann::json::array())) {
        v.basis.push_back({b.at("u").get<double>(), b.at("v").get<double>(), b.at("satisfies").get<bool>()});
    }
    return v;
}

// ---------------------------------------------------------------------------
// kernels

Outcome evaluate_subdivision(TheoremId id, std::span<const HarmonicEigenfunction> basis, Vertex u, Vertex v,
                             double before, double after, const CheckOptions& opts) {
    const Predicates p{opts};
    Outcome o;
    o.lhs = before;
    o.rhs = after;
    if (id == TheoremId::T3_1) {
        o.precondition = Precondition::Unconditional;
        o.relation = Relation::GreaterEq;
        o.strict_condition = classify_basis(basis, [&](const auto& h) { return p.both_nonzero(h, u, v); });
        o.strict_expected = o.strict_condition == Precondition::Holds;
    } else if (id == TheoremId::T4_1) {
        o.relation = Relation::LessEq;
        o.precondition = classify_basis(basis, [&](const auto& h) { return p.product_nonnegative(h, u, v); });
        o.strict_condition = classify_basis(basis, [&](const auto& h) { return p.product_positive(h, u, v); });
        o.strict_expected = o.precondition == Precondition::Holds && o.strict_condition == Precondition::Holds;
    } else {
        throw std::invalid_argument("evaluate_subdivision handles T3.1 and T4.1 only");
    }
    return finish(o, opts);
}

Outcome evaluate_identification(TheoremId id, std::span<const HarmonicEigenfunction> basis, Vertex u, double before,
                                double after, long second_volume, const CheckOptions& opts) {
    const Predicates p{opts};
    Outcome o;
    o.lhs = before;
    o.rhs = after;
    if (id == TheoremId::T3_3) {
        o.precondition = Precondition::Unconditional;
        o.relation = Relation::GreaterEq;
        o.strict_condition = classify_basis(basis, [&](const auto& h) { return !p.zero(at(h, u)); });
        o.strict_expected = o.strict_condition == Precondition::Holds && second_volume > 0;
    } else if (id == TheoremId::T4_2) {
        o.relation = Relation::LessEq;
        o.precondition = classify_basis(basis, [&](const auto& h) { return p.zero(at(h, u)); });
    } else {
        throw std::invalid_argument("evaluate_identification handles T3.3 and T4.2 only");
    }
    return finish(o, opts);
}

Outcome evaluate_transfer(TheoremId id, std::span<const HarmonicEigenfunction> basis, Vertex u, Vertex v, double before,
                          double after, const CheckOptions& opts) {
    if (id != TheoremId::T3_6 && id != TheoremId::T4_3) {
        throw std::invalid_argument("evaluate_transfer handles T3.6 and T4.3 only");
    }
    const Predicates p{opts};
    Outcome o;
    o.lhs = before;
    o.rhs = after;
    o.relation = id == TheoremId::T3_6 ? Relation::GreaterEq : Relation::LessEq;
    o.precondition = classify_basis(basis, [&](const auto& h) { return p.equal_values(h, u, v); });
    return finish(o, opts);
}

Outcome evaluate_unconditional(double lhs, double rhs, Relation relation, const CheckOptions& opts) {
    Outcome o;
    o.lhs = lhs;
    o.rhs = rhs;
    o.relation = relation;
    return finish(o, opts);
}

// ---------------------------------------------------------------------------
// checkers

Verdict check_lemma_2_4(const Graph& g, const CheckOptions& opts) {
    require_order2(g, "graph");
    require_connected(g, "graph");
    if (is_complete(g)) throw PreconditionError("the lambda_2 <= 1 bound applies to non-complete graphs only");
    Verdict v = to_verdict(TheoremId::L2_4, evaluate_unconditional(lambda2(g), 1.0, Relation::LessEq, opts), opts);
    v.graph6 = to_graph6(g);
    return v;
}

Verdict check_cor_2_2(const Graph& g, const CheckOptions& opts) {
    require_order2(g, "graph");
    require_connected(g, "graph");
    const Original o = analyse(g, Target::SecondSmallest);
    const double l2 = o.spectrum.lambda2();
    double worst = 0.0;
    for (const auto& h : o.basis) worst = std::max(worst, check_neighbor_sum_zero(g, h.f));

    Outcome out;
    out.precondition = std::abs(l2 - 1.0) <= opts.tol ? Precondition::Holds : Precondition::Fails;
    out.lhs = worst;
    out.rhs = opts.zero_tol;
    out.relation = Relation::LessEq;
    out = finish(out, opts);
    // The residual bound is itself the threshold, so no extra slack.
    if (out.precondition != Precondition::Fails) out.pass = worst <= opts.zero_tol;

    Verdict v = to_verdict(TheoremId::C2_2, out, opts);
    v.graph6 = to_graph6(g);
    v.params = {{"lambda2", l2}};
    for (const auto& h : o.basis) {
        const double r = check_neighbor_sum_zero(g, h.f);
        v.basis.push_back({r, 0.0, r <= opts.zero_tol});
    }
    return v;
}

Verdict check_cor_2_3(int n, const CheckOptions& opts) {
    if (n < 3) throw PreconditionError("the star S_n needs n >= 3");
    const Graph star = make_named({Family::Star, n});
    const Original o = analyse(star, Target::SecondSmallest);
    const double l2 = o.spectrum.lambda2();
    double worst = 0.0;
    for (const auto& h : o.basis) worst = std::max(worst, std::abs(at(h, 0)));

    Outcome out;
    out.lhs = worst;
    out.rhs = opts.zero_tol;
    out.relation = Relation::LessEq;
    out.pass = worst <= opts.zero_tol && std::abs(l2 - 1.0) <= opts.tol;

    Verdict v = to_verdict(TheoremId::C2_3, out, opts);
    v.graph6 = to_graph6(star);
    v.params = {{"n", n}, {"lambda2", l2}, {"center", 0}};
    for (const auto& h : o.basis) v.basis.push_back({at(h, 0), 0.0, std::abs(at(h, 0)) <= opts.zero_tol});
    return v;
}

Verdict check_thm_3_1(const Graph& g, Vertex u, Vertex v, const CheckOptions& opts) {
    require_connected(g, "graph");
    if (!g.has_edge(u, v)) throw GraphError("(" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
    const Original o = analyse(g, Target::SecondSmallest);
    const double after = lambda2(subdivide_edge(g, u, v).result);
    const Outcome out = evaluate_subdivision(TheoremId::T3_1, o.basis, u, v, o.spectrum.lambda2(), after, opts);
    Verdict verdict = to_verdict(TheoremId::T3_1, out, opts);
    verdict.graph6 = to_graph6(g);
    verdict.params = {{"u", u}, {"v", v}};
    const Predicates p{opts};
    verdict.basis = reports(o.basis, u, v, [&](const auto& h) { return p.both_nonzero(h, u, v); });
    return verdict;
}

Verdict check_cor_3_2(const Graph& g, std::span<const Edge> edges, const CheckOptions& opts) {
    require_order2(g, "graph");
    require_connected(g, "graph");
    const PerturbResult s = subdivision_graph(g, edges);
    Verdict v = to_verdict(TheoremId::C3_2, evaluate_unconditional(lambda2(g), lambda2(s.result), Relation::GreaterEq, opts),
                           opts);
    v.graph6 = to_graph6(g);
    nlohmann::json list = nlohmann::json::array();
    for (const Edge& e : edges) list.push_back({e.u, e.v});
    v.params = {{"edges", list}};
    return v;
}

Verdict check_thm_3_3(const Graph& g1, Vertex u, const Graph& g2, Vertex v, const CheckOptions& opts) {
    require_order2(g1, "G1");
    require_vertex(g1, u, "u");
    require_vertex(g2, v, "v");
    require_connected(g1, "G1");
    require_connected(g2, "G2");
    const Original o = analyse(g1, Target::SecondSmallest);
    const double after = lambda2(identify(g1, u, g2, v).result);
    const Outcome out = evaluate_identification(TheoremId::T3_3, o.basis, u, o.spectrum.lambda2(), after, volume(g2), opts);
    Verdict verdict = to_verdict(TheoremId::T3_3, out, opts);
    verdict.graph6 = to_graph6(g1);
    verdict.params = {{"u", u}, {"g2", to_graph6(g2)}, {"v", v}};
    const Predicates p{opts};
    verdict.basis = reports(o.basis, u, u, [&](const auto& h) { return !p.zero(at(h, u)); });
    return verdict;
}

Verdict check_cor_3_4(const Graph& g1, Vertex u, const Graph& g2, Vertex v, const CheckOptions& opts) {
    require_order2(g1, "G1");
    require_order2(g2, "G2");
    require_vertex(g1, u, "u");
    require_vertex(g2, v, "v");
    require_connected(g1, "G1");
    require_connected(g2, "G2");
    const double glued = lambda2(identify(g1, u, g2, v).result);
    const double bound = std::min(lambda2(g1), lambda2(g2));
    Verdict verdict = to_verdict(TheoremId::C3_4, evaluate_unconditional(glued, bound, Relation::LessEq, opts), opts);
    verdict.graph6 = to_graph6(g1);
    verdict.params = {{"u", u}, {"g2", to_graph6(g2)}, {"v", v}};
    return verdict;
}

Verdict check_cor_3_5(const Graph& tree, std::span<const Vertex> subtree, const CheckOptions& opts) {
    if (!is_tree(tree)) throw PreconditionError("input is not a tree");
    const Graph sub = induced_subgraph(tree, subtree);
    if (sub.order() < 2) throw PreconditionError("subtree needs at least 2 vertices");
    if (!is_connected(sub)) throw PreconditionError("vertex subset does not induce a subtree");
    Verdict v = to_verdict(TheoremId::C3_5, evaluate_unconditional(lambda2(tree), lambda2(sub), Relation::LessEq, opts), opts);
    v.graph6 = to_graph6(tree);
    std::vector<Vertex> sorted(subtree.begin(), subtree.end());
    std::sort(sorted.begin(), sorted.end());
    v.params = {{"subtree", vertex_list(sorted)}};
    return v;
}

namespace {

Verdict check_transfer(TheoremId id, const Graph& g, Vertex u, Vertex v, std::span<const Vertex> targets,
                       const CheckOptions& opts) {
    require_order2(g, "graph");
    require_connected(g, "graph");
    const PerturbResult moved = transfer_edges(g, u, v, targets);
    const Target which = theorem_target(id);
    const Original o = analyse(g, which);
    const double after = target_value(spectrum(moved.result), which);
    const Outcome out = evaluate_transfer(id, o.basis, u, v, target_value(o.spectrum, which), after, opts);
    Verdict verdict = to_verdict(id, out, opts);
    verdict.graph6 = to_graph6(g);
    verdict.params = {{"u", u}, {"v", v}, {"targets", vertex_list(targets)}};
    const Predicates p{opts};
    verdict.basis = reports(o.basis, u, v, [&](const auto& h) { return p.equal_values(h, u, v); });
    return verdict;
}

}  // namespace

Verdict check_thm_3_6(const Graph& g, Vertex u, Vertex v, std::span<const Vertex> targets, const CheckOptions& opts) {
    return check_transfer(TheoremId::T3_6, g, u, v, targets, opts);
}

Verdict check_thm_4_3(const Graph& g, Vertex u, Vertex v, std::span<const Vertex> targets, const CheckOptions& opts) {
    return check_transfer(TheoremId::T4_3, g, u, v, targets, opts);
}

Verdict check_thm_4_1(const Graph& g, Vertex u, Vertex v, const CheckOptions& opts) {
    require_connected(g, "graph");
    if (!g.has_edge(u, v)) throw GraphError("(" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
    const Original o = analyse(g, Target::Largest);
    const double after = rho(subdivide_edge(g, u, v).result);
    const Outcome out = evaluate_subdivision(TheoremId::T4_1, o.basis, u, v, o.spectrum.rho(), after, opts);
    Verdict verdict = to_verdict(TheoremId::T4_1, out, opts);
    verdict.graph6 = to_graph6(g);
    verdict.params = {{"u", u}, {"v", v}};
    const Predicates p{opts};
    verdict.basis = reports(o.basis, u, v, [&](const auto& h) { return p.product_nonnegative(h, u, v); });
    return verdict;
}

Verdict check_thm_4_2(const Graph& g1, Vertex u, const Graph& g2, Vertex v, const CheckOptions& opts) {
    require_order2(g1, "G1");
    require_vertex(g1, u, "u");
    require_vertex(g2, v, "v");
    require_connected(g1, "G1");
    require_connected(g2, "G2");
    const Original o = analyse(g1, Target::Largest);
    const double after = rho(identify(g1, u, g2, v).result);
    const Outcome out = evaluate_identification(TheoremId::T4_2, o.basis, u, o.spectrum.rho(), after, volume(g2), opts);
    Verdict verdict = to_verdict(TheoremId::T4_2, out, opts);
    verdict.graph6 = to_graph6(g1);
    verdict.params = {{"u", u}, {"g2", to_graph6(g2)}, {"v", v}};
    const Predicates p{opts};
    verdict.basis = reports(o.basis, u, u, [&](const auto& h) { return p.zero(at(h, u)); });
    return verdict;
}

}  // namespace normlap
