#include "normlap/search.hpp"
#include "normlap/theorems.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace normlap;

namespace {

Graph named(Family f, int n) { return make_named({f, n}); }

const double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("theorem names round trip") {
    for (TheoremId id : {TheoremId::L2_4, TheoremId::C2_2, TheoremId::C2_3, TheoremId::T3_1, TheoremId::C3_2,
                         TheoremId::T3_3, TheoremId::C3_4, TheoremId::C3_5, TheoremId::T3_6, TheoremId::T4_1,
                         TheoremId::T4_2, TheoremId::T4_3}) {
        CHECK(parse_theorem(theorem_name(id)) == id);
    }
    CHECK_FALSE(parse_theorem("T9.9").has_value());
    CHECK(theorem_target(TheoremId::T3_6) == Target::SecondSmallest);
    CHECK(theorem_target(TheoremId::T4_3) == Target::Largest);
    for (Precondition p : {Precondition::Holds, Precondition::Fails, Precondition::Ambiguous, Precondition::Unconditional})
        CHECK(parse_precondition(to_string(p)) == p);
}

TEST_CASE("lambda_2 <= 1 for non-complete graphs") {
    const Verdict p3 = check_lemma_2_4(named(Family::Path, 3));
    CHECK(p3.pass);
    CHECK(std::abs(p3.lhs - 1.0) <= 1e-9);
    const Verdict c5 = check_lemma_2_4(named(Family::Cycle, 5));
    CHECK(c5.pass);
    CHECK(std::abs(c5.lhs - (1 - std::cos(2 * kPi / 5))) <= 1e-9);
    CHECK_THROWS_AS(check_lemma_2_4(named(Family::Complete, 4)), PreconditionError);
    CHECK_THROWS_AS(check_lemma_2_4(Graph::from_edges(4, {{0, 1}, {2, 3}})), PreconditionError);
}

TEST_CASE("neighbour sums vanish when lambda_2 = 1") {
    const Verdict s4 = check_cor_2_2(named(Family::Star, 4));
    CHECK(s4.precondition == Precondition::Holds);
    CHECK(s4.pass);
    const Verdict c5 = check_cor_2_2(named(Family::Cycle, 5));
    CHECK(c5.precondition == Precondition::Fails);
    CHECK(c5.pass);
}

TEST_CASE("star centre value vanishes") {
    for (int n : {3, 4, 10}) {
        const Verdict v = check_cor_2_3(n);
        CHECK(v.pass);
        CHECK(v.lhs <= 1e-9);
        CHECK(std::abs(v.params.at("lambda2").get<double>() - 1.0) <= 1e-9);
    }
    CHECK_THROWS_AS(check_cor_2_3(2), PreconditionError);
}

TEST_CASE("subdivision lowers lambda_2") {
    const Verdict c4 = check_thm_3_1(named(Family::Cycle, 4), 0, 1);
    CHECK(c4.pass);
    CHECK(std::abs(c4.lhs - 1.0) <= 1e-9);
    CHECK(std::abs(c4.rhs - (1 - std::cos(2 * kPi / 5))) <= 1e-9);
    CHECK(c4.relation == Relation::GreaterEq);

    const Verdict k2 = check_thm_3_1(named(Family::Complete, 2), 0, 1);
    CHECK(k2.pass);
    CHECK(std::abs(k2.lhs - 2.0) <= 1e-9);
    CHECK(std::abs(k2.rhs - 1.0) <= 1e-9);
    CHECK(k2.strict_expected);

    CHECK_THROWS_AS(check_thm_3_1(named(Family::Path, 3), 0, 2), GraphError);
}

TEST_CASE("subdividing several edges") {
    const Graph c4 = named(Family::Cycle, 4);
    const Verdict all = check_cor_3_2(c4, c4.edges());
    CHECK(all.pass);
    CHECK(std::abs(all.rhs - (1 - std::cos(kPi / 4))) <= 1e-9);

    const Verdict none = check_cor_3_2(c4, std::vector<Edge>{});
    CHECK(none.pass);
    CHECK(none.lhs == none.rhs);

    const Verdict k3 = check_cor_3_2(named(Family::Complete, 3), std::vector<Edge>{{0, 1}});
    CHECK(k3.pass);
    CHECK(std::abs(k3.lhs - 1.5) <= 1e-9);
    CHECK(std::abs(k3.rhs - 1.0) <= 1e-9);
}

TEST_CASE("identification lowers lambda_2") {
    const Graph k2 = named(Family::Complete, 2);
    const Verdict v = check_thm_3_3(k2, 0, k2, 0);
    CHECK(v.pass);
    CHECK(v.strict_expected);
    CHECK(std::abs(v.lhs - 2.0) <= 1e-9);
    CHECK(std::abs(v.rhs - 1.0) <= 1e-9);

    const Graph s4 = named(Family::Star, 4);
    const Verdict stars = check_thm_3_3(s4, 0, s4, 0);
    CHECK(stars.pass);
    CHECK_FALSE(stars.strict_expected);
    CHECK(stars.strict_condition == Precondition::Fails);
    CHECK(std::abs(stars.lhs - stars.rhs) <= 1e-9);

    // Gluing a single vertex changes nothing, so no strictness is claimed.
    const Verdict k1 = check_thm_3_3(k2, 0, Graph(), 0);
    CHECK(k1.pass);
    CHECK_FALSE(k1.strict_expected);
}

TEST_CASE("glued lambda_2 is at most the smaller one") {
    const Verdict a = check_cor_3_4(named(Family::Complete, 2), 0, named(Family::Complete, 3), 0);
    CHECK(a.pass);
    CHECK(std::abs(a.rhs - 1.5) <= 1e-9);
    const Verdict b = check_cor_3_4(named(Family::Complete, 2), 0, named(Family::Complete, 2), 0);
    CHECK(b.pass);
    CHECK(std::abs(b.lhs - 1.0) <= 1e-9);
    CHECK(std::abs(b.rhs - 2.0) <= 1e-9);
    const Verdict c = check_cor_3_4(named(Family::Star, 4), 0, named(Family::Star, 4), 0);
    CHECK(c.pass);
    CHECK(std::abs(c.lhs - 1.0) <= 1e-9);
    CHECK(std::abs(c.rhs - 1.0) <= 1e-9);
    CHECK_THROWS_AS(check_cor_3_4(named(Family::Complete, 2), 0, Graph(), 0), PreconditionError);
}

TEST_CASE("subtrees have larger lambda_2") {
    const Graph p4 = named(Family::Path, 4);
    const Verdict v = check_cor_3_5(p4, std::vector<Vertex>{0, 1, 2});
    CHECK(v.pass);
    CHECK(std::abs(v.lhs - oracle::path_spectrum(4)[1]) <= 1e-9);
    CHECK(std::abs(v.rhs - 1.0) <= 1e-9);
    const Verdict same = check_cor_3_5(p4, std::vector<Vertex>{0, 1, 2, 3});
    CHECK(same.pass);
    CHECK(same.lhs == same.rhs);
    CHECK_THROWS_AS(check_cor_3_5(p4, std::vector<Vertex>{0, 2}), PreconditionError);
    CHECK_THROWS_AS(check_cor_3_5(named(Family::Cycle, 4), std::vector<Vertex>{0, 1}), PreconditionError);
}

TEST_CASE("subdivision and rho") {
    const Verdict c4 = check_thm_4_1(named(Family::Cycle, 4), 0, 1);
    CHECK(c4.precondition == Precondition::Fails);
    CHECK(c4.vacuous());
    CHECK(c4.pass);
    CHECK(std::abs(c4.lhs - 2.0) <= 1e-9);
    CHECK(std::abs(c4.rhs - (1 - std::cos(4 * kPi / 5))) <= 1e-9);

    // The rho eigenfunction of P3 alternates in sign, so both edges fail the hypothesis.
    const Verdict p3 = check_thm_4_1(named(Family::Path, 3), 0, 1);
    CHECK(p3.precondition == Precondition::Fails);
    CHECK(p3.pass);
    CHECK(std::abs(p3.lhs - 2.0) <= 1e-9);
    CHECK(std::abs(p3.rhs - 2.0) <= 1e-9);
}

TEST_CASE("identification and rho") {
    const Verdict k3 = check_thm_4_2(named(Family::Complete, 3), 0, named(Family::Complete, 2), 0);
    CHECK(k3.pass);
    CHECK(k3.rhs >= 1.5 - 1e-9);

    const Verdict c4 = check_thm_4_2(named(Family::Cycle, 4), 3, named(Family::Cycle, 3), 0);
    CHECK(c4.precondition == Precondition::Fails);
    CHECK(c4.pass);
    CHECK(std::abs(c4.lhs - 2.0) <= 1e-9);
    CHECK(std::abs(c4.rhs - 1.9010) <= 5e-4);

    const Verdict k1 = check_thm_4_2(named(Family::Cycle, 5), 2, Graph(), 0);
    CHECK(k1.pass);
    CHECK(std::abs(k1.lhs - k1.rhs) <= 1e-12);
}

TEST_CASE("edge transfers from found witnesses") {
    ScanConfig cfg;
    cfg.n_max = 5;
    for (TheoremId id : {TheoremId::T3_6, TheoremId::T4_3}) {
        for (Direction d : {Direction::Less, Direction::Equal, Direction::Greater}) {
            const auto w = find_witness(id, Precondition::Holds, d, cfg);
            if (!w) continue;
            const Verdict& v = w->verdict;
            CHECK(v.pass);
            const Graph g = parse_graph6(v.graph6);
            const std::vector<Vertex> targets = v.params.at("targets").get<std::vector<Vertex>>();
            const Verdict again = id == TheoremId::T3_6
                                      ? check_thm_3_6(g, v.params.at("u"), v.params.at("v"), targets)
                                      : check_thm_4_3(g, v.params.at("u"), v.params.at("v"), targets);
            CHECK(again.lhs == v.lhs);
            CHECK(again.rhs == v.rhs);
            CHECK(again.precondition == Precondition::Holds);
        }
    }
    CHECK_THROWS_AS(check_thm_3_6(named(Family::Cycle, 4), 0, 2, std::vector<Vertex>{1}), GraphError);
}

TEST_CASE("verdict JSON round trip") {
    const Verdict v = check_thm_4_2(named(Family::Cycle, 4), 3, named(Family::Cycle, 3), 0);
    const Verdict back = verdict_from_json(to_json(v));
    CHECK(back.theorem == v.theorem);
    CHECK(back.precondition == v.precondition);
    CHECK(back.strict_condition == v.strict_condition);
    CHECK(back.lhs == v.lhs);
    CHECK(back.rhs == v.rhs);
    CHECK(back.relation == v.relation);
    CHECK(back.pass == v.pass);
    CHECK(back.graph6 == v.graph6);
    CHECK(back.params == v.params);
    CHECK(back.basis.size() == v.basis.size());
    CHECK(to_json(back) == to_json(v));

    nlohmann::json broken = to_json(v);
    broken["theorem"] = "T7.7";
    CHECK_THROWS(verdict_from_json(broken));
    broken = to_json(v);
    broken.erase("lhs");
    CHECK_THROWS(verdict_from_json(broken));
}

TEST_CASE("kernels do not depend on the sign of the eigenfunction") {
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
        const Graph g = Graph::from_mask(4, mask);
        if (!is_connected(g)) continue;
        for (Target t : {Target::SecondSmallest, Target::Largest}) {
            auto basis = harmonic_eigenfunctions(g, t);
            auto flipped = basis;
            for (auto& h : flipped)
                for (double& x : h.f) x = -x;
            for (const Edge& e : g.edges()) {
                const TheoremId sub = t == Target::SecondSmallest ? TheoremId::T3_1 : TheoremId::T4_1;
                const Outcome a = evaluate_subdivision(sub, basis, e.u, e.v, 1.0, 0.9);
                const Outcome b = evaluate_subdivision(sub, flipped, e.u, e.v, 1.0, 0.9);
                CHECK(a.precondition == b.precondition);
                CHECK(a.strict_condition == b.strict_condition);
                CHECK(a.pass == b.pass);
            }
            for (Vertex u = 0; u < 4; ++u) {
                const TheoremId id = t == Target::SecondSmallest ? TheoremId::T3_3 : TheoremId::T4_2;
                const Outcome a = evaluate_identification(id, basis, u, 1.0, 1.0, 2);
                const Outcome b = evaluate_identification(id, flipped, u, 1.0, 1.0, 2);
                CHECK(a.precondition == b.precondition);
                CHECK(a.strict_condition == b.strict_condition);
            }
        }
    }
}

TEST_CASE("basis classification") {
    const std::vector<int> xs{1, 2, 3};
    CHECK(classify_basis(xs, [](int x) { return x > 0; }) == Precondition::Holds);
    CHECK(classify_basis(xs, [](int x) { return x > 5; }) == Precondition::Fails);
    CHECK(classify_basis(xs, [](int x) { return x > 2; }) == Precondition::Ambiguous);
}

TEST_CASE("strictness needs a gap") {
    CheckOptions opts;
    std::vector<HarmonicEigenfunction> basis{{{0.5, -0.5}, 2.0}};
    CHECK(evaluate_subdivision(TheoremId::T3_1, basis, 0, 1, 2.0, 1.0, opts).pass);
    CHECK_FALSE(evaluate_subdivision(TheoremId::T3_1, basis, 0, 1, 2.0, 2.0, opts).pass);
    CHECK_FALSE(evaluate_subdivision(TheoremId::T3_1, basis, 0, 1, 2.0, 2.5, opts).pass);
    CHECK(evaluate_unconditional(1.0, 1.0 + 5e-9, Relation::GreaterEq, opts).pass);
    CHECK_FALSE(evaluate_unconditional(1.0, 1.0 + 5e-8, Relation::GreaterEq, opts).pass);
}

TEST_CASE("proof replay") {
    SUBCASE("subdividing K2") {
        ProofInstance in;
        in.theorem = TheoremId::T3_1;
        in.g = named(Family::Complete, 2);
        in.u = 0;
        in.v = 1;
        const ProofTrace t = replay_proof(in);
        CHECK(t.all_hold);
        CHECK(t.proof_case == 1);
        for (const auto& s : t.steps) CHECK(s.holds);
    }
    SUBCASE("gluing K2 to K2") {
        ProofInstance in;
        in.theorem = TheoremId::T3_3;
        in.g = named(Family::Complete, 2);
        in.g2 = named(Family::Complete, 2);
        const ProofTrace t = replay_proof(in);
        CHECK(t.all_hold);
        const auto step = std::find_if(t.steps.begin(), t.steps.end(), [](const ProofStep& s) { return s.label == "degree sum"; });
        REQUIRE(step != t.steps.end());
        // f1(0) = 1/sqrt(2) on K2 and Vol(K2) = 2.
        CHECK(std::abs(step->lhs - 2.0 / std::sqrt(2.0)) <= 1e-12);
        CHECK(step->residual <= 1e-12);
    }
    SUBCASE("edge transfer witness") {
        ScanConfig cfg;
        cfg.n_max = 6;
        const auto w = find_witness(TheoremId::T3_6, Precondition::Holds, Direction::Greater, cfg);
        REQUIRE(w.has_value());
        ProofInstance in;
        in.theorem = TheoremId::T3_6;
        in.g = parse_graph6(w->verdict.graph6);
        in.u = w->verdict.params.at("u");
        in.v = w->verdict.params.at("v");
        in.targets = w->verdict.params.at("targets").get<std::vector<Vertex>>();
        const auto basis = harmonic_eigenfunctions(in.g, Target::SecondSmallest);
        if (basis.size() > 1) in.basis_index = 0;
        const ProofTrace t = replay_proof(in);
        CHECK(t.all_hold);
        for (const auto& s : t.steps)
            if (s.label == "L-form" || s.label == "D-norm") CHECK(s.residual <= 1e-9);
    }
    SUBCASE("hypothesis violations are rejected") {
        ProofInstance in;
        in.theorem = TheoremId::T4_1;
        in.g = named(Family::Cycle, 4);
        in.u = 0;
        in.v = 1;
        CHECK_THROWS_AS(replay_proof(in), PreconditionError);

        in.theorem = TheoremId::T3_1;
        CHECK_THROWS_AS(replay_proof(in), PreconditionError);  // lambda_2(C4) is double
        in.basis_index = 1;
        CHECK(replay_proof(in).all_hold);
        in.basis_index = 7;
        CHECK_THROWS_AS(replay_proof(in), std::out_of_range);
    }
}

TEST_CASE("subdivision replays hold on every edge of every graph up to 5 vertices") {
    for (int n = 2; n <= 5; ++n) {
        for (const Graph& g : enumerate_connected(n)) {
            const Spectrum s = spectrum(g);
            for (const auto& h : harmonic_eigenfunctions(s, Target::SecondSmallest)) {
                for (const Edge& e : g.edges()) {
                    ProofInstance in;
                    in.theorem = TheoremId::T3_1;
                    in.g = g;
                    in.u = e.u;
                    in.v = e.v;
                    const ProofTrace t = replay_proof_with(in, h.f, h.lambda);
                    REQUIRE(t.all_hold);
                }
            }
        }
    }
}
