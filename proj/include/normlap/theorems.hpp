#pragma once

#include "normlap/graph.hpp"
#include "normlap/spectral.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace normlap {

enum class TheoremId { L2_4, C2_2, C2_3, T3_1, C3_2, T3_3, C3_4, C3_5, T3_6, T4_1, T4_2, T4_3 };

/// "T3.1", "C2.3", "L2.4", ...
std::string_view theorem_name(TheoremId id);
std::optional<TheoremId> parse_theorem(std::string_view text);
/// Eigenvalue a theorem is about: lambda_2 for L2.4..T3.6, rho for T4.x.
Target theorem_target(TheoremId id);

enum class Precondition { Holds, Fails, Ambiguous, Unconditional };
std::string_view to_string(Precondition p);
std::optional<Precondition> parse_precondition(std::string_view text);

/// Required relation between Verdict::lhs and Verdict::rhs.
enum class Relation { LessEq, GreaterEq };
std::string_view to_string(Relation r);

struct CheckOptions {
    /// Absolute slack on eigenvalue inequalities.
    double tol = 1e-8;
    /// Gap a strict inequality must exceed.
    double strict_gap = 1e-6;
    /// |f(x)| at or below this counts as zero (f normalized with ||D^{1/2}f|| = 1);
    /// f(u) = f(v) is tested as |f(u)-f(v)| <= zero_tol * ||f||_inf.
    double zero_tol = 1e-7;
    /// f(u)f(v) above this makes the rho subdivision inequality strict.
    double strict_product = 1e-7;
};

/// Per-basis-function evaluation of a harmonic-eigenfunction predicate.
struct BasisReport {
    double at_u = 0.0;
    double at_v = 0.0;
    bool satisfies = false;
};

/// Compact result of one theorem evaluation; the scan works with these directly.
struct Outcome {
    Precondition precondition = Precondition::Unconditional;
    /// Tri-state of the strictness predicate over the basis (Unconditional when the
    /// theorem makes no strictness claim).
    Precondition strict_condition = Precondition::Unconditional;
    bool strict_expected = false;
    double lhs = 0.0;
    double rhs = 0.0;
    Relation relation = Relation::GreaterEq;
    bool pass = true;
};

struct Verdict {
    TheoremId theorem = TheoremId::T3_1;
    Precondition precondition = Precondition::Unconditional;
    Precondition strict_condition = Precondition::Unconditional;
    double lhs = 0.0;
    double rhs = 0.0;
    Relation relation = Relation::GreaterEq;
    bool strict_expected = false;
    bool pass = true;
    double tolerance = 1e-8;
    std::string graph6;
    nlohmann::json params = nlohmann::json::object();
    std::vector<BasisReport> basis;

    /// Conditional theorems assert nothing when their hypothesis fails on every basis function.
    bool vacuous() const noexcept { return precondition == Precondition::Fails; }
};

nlohmann::json to_json(const Verdict& v);
/// Inverse of to_json; throws nlohmann::json exceptions or std::invalid_argument on bad input.
Verdict verdict_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Evaluation kernels. `basis` holds the harmonic eigenfunctions of the original graph
// (G, or G1 for identification); `before` and `after` are the eigenvalue of the original
// and of the perturbed graph.

/// Holds if every basis function satisfies `pred`, Fails if none does, Ambiguous otherwise.
template <typename Range, typename Pred>
Precondition classify_basis(const Range& basis, Pred&& pred) {
    std::size_t yes = 0;
    std::size_t total = 0;
    for (const auto& h : basis) {
        ++total;
        if (pred(h)) ++yes;
    }
    if (yes == total) return Precondition::Holds;
    if (yes == 0) return Precondition::Fails;
    return Precondition::Ambiguous;
}

/// T3.1 (lambda_2) or T4.1 (rho) for subdividing edge uv.
Outcome evaluate_subdivision(TheoremId id, std::span<const HarmonicEigenfunction> basis, Vertex u, Vertex v,
                             double before, double after, const CheckOptions& opts = {});
/// T3.3 (lambda_2) or T4.2 (rho) for gluing G2 onto u of G1. Strictness of T3.3 needs
/// Vol(G2) > 0: gluing a single vertex changes nothing.
Outcome evaluate_identification(TheoremId id, std::span<const HarmonicEigenfunction> basis, Vertex u, double before,
                                double after, long second_volume, const CheckOptions& opts = {});
/// T3.6 (lambda_2) or T4.3 (rho) for moving edges from v to u.
Outcome evaluate_transfer(TheoremId id, std::span<const HarmonicEigenfunction> basis, Vertex u, Vertex v, double before,
                          double after, const CheckOptions& opts = {});
/// A plain inequality lhs (relation) rhs with no hypothesis.
Outcome evaluate_unconditional(double lhs, double rhs, Relation relation, const CheckOptions& opts = {});

// ---------------------------------------------------------------------------
// Checkers. Each validates structural preconditions (throwing PreconditionError or
// GraphError), computes fresh spectra and returns a populated Verdict.

Verdict check_lemma_2_4(const Graph& g, const CheckOptions& opts = {});
/// lambda_2 = 1 forces zero neighbour sums of every harmonic eigenfunction.
Verdict check_cor_2_2(const Graph& g, const CheckOptions& opts = {});
Verdict check_cor_2_3(int n, const CheckOptions& opts = {});
Verdict check_thm_3_1(const Graph& g, Vertex u, Vertex v, const CheckOptions& opts = {});
Verdict check_cor_3_2(const Graph& g, std::span<const Edge> edges, const CheckOptions& opts = {});
Verdict check_thm_3_3(const Graph& g1, Vertex u, const Graph& g2, Vertex v, const CheckOptions& opts = {});
Verdict check_cor_3_4(const Graph& g1, Vertex u, const Graph& g2, Vertex v, const CheckOptions& opts = {});
Verdict check_cor_3_5(const Graph& tree, std::span<const Vertex> subtree, const CheckOptions& opts = {});
Verdict check_thm_3_6(const Graph& g, Vertex u, Vertex v, std::span<const Vertex> targets, const CheckOptions& opts = {});
Verdict check_thm_4_1(const Graph& g, Vertex u, Vertex v, const CheckOptions& opts = {});
Verdict check_thm_4_2(const Graph& g1, Vertex u, const Graph& g2, Vertex v, const CheckOptions& opts = {});
Verdict check_thm_4_3(const Graph& g, Vertex u, Vertex v, std::span<const Vertex> targets, const CheckOptions& opts = {});

// ---------------------------------------------------------------------------
// Proof replay: rebuild the test vectors used in the variational arguments and check
// every identity and inequality in the chain numerically.

/// Greater is an exact strict comparison; the others allow kProofTol * scale.
enum class StepKind { Identity, LessEq, GreaterEq, Greater };

struct ProofStep {
    std::string label;
    std::string assertion;
    StepKind kind = StepKind::Identity;
    double lhs = 0.0;
    double rhs = 0.0;
    /// |lhs - rhs| for identities, the violation amount (>= 0) for inequalities.
    double residual = 0.0;
    bool holds = false;
};

struct ProofTrace {
    TheoremId theorem = TheoremId::T3_1;
    /// Which branch of a case split was taken (T3.1 only: 1 or 2).
    int proof_case = 0;
    std::vector<ProofStep> steps;
    bool all_hold = false;
};

inline constexpr double kProofTol = 1e-9;

struct ProofInstance {
    TheoremId theorem = TheoremId::T3_1;
    Graph g;
    Vertex u = 0;
    Vertex v = 0;
    std::vector<Vertex> targets;
    /// Second graph for T3.3 / T4.2 (u in g is glued to v in g2).
    std::optional<Graph> g2;
    /// Basis function of the eigenspace to use; required when the eigenspace is not simple.
    std::optional<int> basis_index;
};

/// Replays the proof for T3.1, T3.3, T3.6, T4.1, T4.2 or T4.3. Throws PreconditionError
/// if the instance violates the theorem's hypothesis or a basis choice is needed.
ProofTrace replay_proof(const ProofInstance& instance, const CheckOptions& opts = {});

/// Replay with an explicitly supplied harmonic eigenfunction f of the original graph
/// (G, or G1 for T3.3 / T4.2).
ProofTrace replay_proof_with(const ProofInstance& instance, std::span<const double> f, double lambda,
                             const CheckOptions& opts = {});

}  // namespace normlap
