#include "normlap/perturb.hpp"
#include "normlap/theorems.hpp"

#include <algorithm>
#include <cmath>

namespace normlap {

namespace {

class TraceBuilder {
public:
    explicit TraceBuilder(TheoremId id) { trace_.theorem = id; }

    void identity(std::string label, std::string assertion, double lhs, double rhs) {
        add(std::move(label), std::move(assertion), StepKind::Identity, lhs, rhs, std::abs(lhs - rhs));
    }
    void at_most(std::string label, std::string assertion, double lhs, double rhs) {
        add(std::move(label), std::move(assertion), StepKind::LessEq, lhs, rhs, std::max(0.0, lhs - rhs));
    }
    void at_least(std::string label, std::string assertion, double lhs, double rhs) {
        add(std::move(label), std::move(assertion), StepKind::GreaterEq, lhs, rhs, std::max(0.0, rhs - lhs));
    }
    void greater(std::string label, std::string assertion, double lhs, double rhs) {
        ProofStep s{std::move(label), std::move(assertion), StepKind::Greater, lhs, rhs, std::max(0.0, rhs - lhs), lhs > rhs};
        trace_.steps.push_back(std::move(s));
    }
    void set_case(int c) { trace_.proof_case = c; }

    ProofTrace done() {
        trace_.all_hold = std::all_of(trace_.steps.begin(), trace_.steps.end(), [](const ProofStep& s) { return s.holds; });
        return std::move(trace_);
    }

private:
    void add(std::string label, std::string assertion, StepKind kind, double lhs, double rhs, double residual) {
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        trace_.steps.push_back({std::move(label), std::move(assertion), kind, lhs, rhs, residual, residual <= kProofTol * scale});
    }

    ProofTrace trace_;
};

double value_of(const Graph& g, Target which) {
    const Spectrum s = spectrum(g);
    return which == Target::SecondSmallest ? s.lambda2() : s.rho();
}

std::vector<double> ones(int n) { return std::vector<double>(static_cast<std::size_t>(n), 1.0); }

double sup_norm(std::span<const double> f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return m;
}

void check_length(const Graph& g, std::span<const double> f) {
    if (f.size() != static_cast<std::size_t>(g.order())) throw std::invalid_argument("eigenfunction length does not match graph");
}

// The original-graph facts every proof starts from.
void common_prefix(TraceBuilder& t, const Graph& g, std::span<const double> f, double lambda, const char* symbol) {
    t.identity("orthogonality", "f^T D e = 0", degree_sum(g, f), 0.0);
    t.identity("eigenvalue", std::string(symbol) + " = f^T L f / f^T D f", lambda, rayleigh_quotient(g, f));
}

ProofTrace replay_subdivision(const ProofInstance& in, std::span<const double> f, double lambda, const CheckOptions& opts) {
    const Graph& g = in.g;
    const Vertex u = in.u;
    const Vertex v = in.v;
    if (!g.has_edge(u, v)) throw GraphError("(" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
    const PerturbResult sub = subdivide_edge(g, u, v);
    const Graph& gp = sub.result;
    const Vertex w = sub.new_vertices.front();
    const bool rho_version = in.theorem == TheoremId::T4_1;
    const double after = value_of(gp, rho_version ? Target::Largest : Target::SecondSmallest);

    const double fu = f[static_cast<std::size_t>(u)];
    const double fv = f[static_cast<std::size_t>(v)];
    const auto zero = [&](double x) { return std::abs(x) <= opts.zero_tol; };
    const bool same_sign = !zero(fu) && !zero(fv) && ((fu > 0) == (fv > 0));
    if (rho_version && !(zero(fu) || zero(fv) || same_sign)) {
        throw PreconditionError("T4.1 replay needs f(u) f(v) >= 0");
    }

    const double fLf = laplacian_form(g, f);
    const double fDf = degree_form(g, f);
    const double vol = static_cast<double>(volume(g));

    TraceBuilder t(in.theorem);
    common_prefix(t, g, f, lambda, rho_version ? "rho(G)" : "lambda2(G)");

    std::vector<double> h(f.begin(), f.end());
    h.resize(static_cast<std::size_t>(gp.order()), 0.0);

    if (rho_version || !same_sign) {
        // h(w) = 0: the extension keeps orthogonality and D-norm, and adds 2 f(u) f(v) to the L-form.
        t.set_case(1);
        const double hLh = laplacian_form(gp, h);
        t.identity("h orthogonal", "h^T D' e' = 0", degree_sum(gp, h), 0.0);
        t.identity("h D-norm", "h^T D' h = f^T D f", degree_form(gp, h), fDf);
        t.identity("h L-form", "h^T L' h = f^T L f + 2 f(u) f(v)", hLh, fLf + 2.0 * fu * fv);
        const double rq = rayleigh_quotient(gp, h);
        if (rho_version) {
            t.at_least("L-form grows", "h^T L' h >= f^T L f", hLh, fLf);
            t.at_most("variational sup", "h^T L' h / h^T D' h <= rho(G')", rq, after);
            t.at_most("chain", "rho(G) <= h^T L' h / h^T D' h", lambda, rq);
            t.at_most("conclusion", "rho(G) <= rho(G')", lambda, after);
        } else {
            t.at_most("L-form shrinks", "h^T L' h <= f^T L f", hLh, fLf);
            t.at_least("variational inf", "h^T L' h / h^T D' h >= lambda2(G')", rq, after);
            t.at_least("chain", "lambda2(G) >= h^T L' h / h^T D' h", lambda, rq);
            t.at_least("conclusion", "lambda2(G) >= lambda2(G')", lambda, after);
        }
        return t.done();
    }

    // f(u) f(v) > 0: h(w) = f(u), then shift by c e' to restore orthogonality.
    t.set_case(2);
    h[static_cast<std::size_t>(w)] = fu;
    t.identity("h L-form", "h^T L' h = f^T L f", laplacian_form(gp, h), fLf);
    const double hDe = degree_sum(gp, h);
    t.identity("h degree sum", "h^T D' e' = 2 f(u)", hDe, 2.0 * fu);
    const double c = -2.0 * fu / (vol + 2.0);
    const auto e = ones(gp.order());
    const double solved = -hDe / degree_sum(gp, e);
    t.identity("shift constant", "c = -2 f(u) / (Vol(G) + 2)", solved, c);

    std::vector<double> p = h;
    for (double& x : p) x += c;
    const double pDp = degree_form(gp, p);
    t.identity("p orthogonal", "p^T D' e' = 0", degree_sum(gp, p), 0.0);
    t.identity("p L-form", "p^T L' p = f^T L f", laplacian_form(gp, p), fLf);
    const double gain = 2.0 * fu * fu * vol * (2.0 + vol) / ((2.0 + vol) * (2.0 + vol));
    t.identity("p D-norm", "p^T D' p = f^T D f + 2 f(u)^2 Vol(G)(2+Vol(G))/(2+Vol(G))^2", pDp, fDf + gain);
    t.identity("D-norm gain", "p^T D' p - f^T D f = 2 f(u)^2 Vol(G)/(2+Vol(G))", pDp - fDf,
               2.0 * fu * fu * vol / (2.0 + vol));
    t.greater("gain positive", "2 f(u)^2 Vol(G)/(2+Vol(G)) > 0", 2.0 * fu * fu * vol / (2.0 + vol), 0.0);
    const double rq = rayleigh_quotient(gp, p);
    t.at_least("variational inf", "p^T L' p / p^T D' p >= lambda2(G')", rq, after);
    t.at_least("chain", "lambda2(G) > p^T L' p / p^T D' p", lambda, rq);
    t.at_least("conclusion", "lambda2(G) >= lambda2(G')", lambda, after);
    return t.done();
}

ProofTrace replay_identification(const ProofInstance& in, std::span<const double> f1, double lambda,
                                 const CheckOptions& opts) {
    if (!in.g2) throw std::invalid_argument("identification replay needs g2");
    const Graph& g1 = in.g;
    const Graph& g2 = *in.g2;
    const PerturbResult glued = identify(g1, in.u, g2, in.v);
    const Graph& g = glued.result;
    const bool rho_version = in.theorem == TheoremId::T4_2;
    const double after = value_of(g, rho_version ? Target::Largest : Target::SecondSmallest);
    const double f1u = f1[static_cast<std::size_t>(in.u)];
    if (rho_version && std::abs(f1u) > opts.zero_tol) throw PreconditionError("T4.2 replay needs f1(u) = 0");

    const double vol1 = static_cast<double>(volume(g1));
    const double vol2 = static_cast<double>(volume(g2));
    const double f1Lf1 = laplacian_form(g1, f1);
    const double f1Df1 = degree_form(g1, f1);

    // f = f1 on G1; on the rest of G2 it is f1(u) (lambda_2 proof) or 0 (rho proof).
    std::vector<double> f(static_cast<std::size_t>(g.order()), 0.0);
    for (Vertex x = 0; x < g1.order(); ++x) f[static_cast<std::size_t>(glued.old_to_new[static_cast<std::size_t>(x)])] = f1[static_cast<std::size_t>(x)];
    for (Vertex y = 0; y < g2.order(); ++y) {
        if (y == in.v) continue;
        f[static_cast<std::size_t>(glued.second_to_new[static_cast<std::size_t>(y)])] = rho_version ? 0.0 : f1u;
    }

    TraceBuilder t(in.theorem);
    common_prefix(t, g1, f1, lambda, rho_version ? "rho(G1)" : "lambda2(G1)");
    const double fLf = laplacian_form(g, f);
    const double fDf = degree_form(g, f);
    const double fDe = degree_sum(g, f);

    if (rho_version) {
        t.identity("D-norm", "f^T D f = f1^T D1 f1", fDf, f1Df1);
        t.identity("L-form", "f^T L f = f1^T L1 f1", fLf, f1Lf1);
        t.identity("orthogonal", "f^T D e = 0", fDe, 0.0);
        const double rq = rayleigh_quotient(g, f);
        t.at_most("variational sup", "f^T L f / f^T D f <= rho(G)", rq, after);
        t.identity("chain", "rho(G1) = f^T L f / f^T D f", lambda, rq);
        t.at_most("conclusion", "rho(G1) <= rho(G)", lambda, after);
        return t.done();
    }

    t.identity("L-form", "f^T L f = f1^T L1 f1", fLf, f1Lf1);
    t.identity("degree sum", "f^T D e = f1(u) Vol(G2)", fDe, f1u * vol2);
    const double c = -f1u * vol2 / (vol1 + vol2);
    const auto e = ones(g.order());
    t.identity("shift constant", "c = -f1(u) Vol(G2) / (Vol(G1) + Vol(G2))", -fDe / degree_sum(g, e), c);
    std::vector<double> h = f;
    for (double& x : h) x += c;
    const double hDh = degree_form(g, h);
    t.identity("h orthogonal", "h^T D e = 0", degree_sum(g, h), 0.0);
    t.identity("h D-norm", "h^T D h = f^T D f - (f1(u) Vol(G2))^2 / (Vol(G1) + Vol(G2))", hDh,
               fDf - (f1u * vol2) * (f1u * vol2) / (vol1 + vol2));
    t.identity("f D-norm", "f^T D f = f1^T D1 f1 + f1(u)^2 Vol(G2)", fDf, f1Df1 + f1u * f1u * vol2);
    t.identity("h D-norm (G1 form)", "h^T D h = f1^T D1 f1 + f1(u)^2 Vol(G1) Vol(G2) / (Vol(G1) + Vol(G2))", hDh,
               f1Df1 + f1u * f1u * vol1 * vol2 / (vol1 + vol2));
    t.at_least("D-norm grows", "h^T D h >= f1^T D1 f1", hDh, f1Df1);
    t.identity("h L-form", "h^T L h = f1^T L1 f1", laplacian_form(g, h), f1Lf1);
    const double rq = rayleigh_quotient(g, h);
    t.at_least("variational inf", "h^T L h / h^T D h >= lambda2(G)", rq, after);
    t.at_least("chain", "lambda2(G1) = h^T L h / f1^T D1 f1 >= h^T L h / h^T D h", lambda, rq);
    t.at_least("conclusion", "lambda2(G1) >= lambda2(G)", lambda, after);
    return t.done();
}

ProofTrace replay_transfer(const ProofInstance& in, std::span<const double> f, double lambda, const CheckOptions& opts) {
    const Graph& g = in.g;
    const double fu = f[static_cast<std::size_t>(in.u)];
    const double fv = f[static_cast<std::size_t>(in.v)];
    if (std::abs(fu - fv) > opts.zero_tol * sup_norm(f)) throw PreconditionError("transfer replay needs f(u) = f(v)");
    const Graph gp = transfer_edges(g, in.u, in.v, in.targets).result;
    const bool rho_version = in.theorem == TheoremId::T4_3;
    const double after = value_of(gp, rho_version ? Target::Largest : Target::SecondSmallest);

    TraceBuilder t(in.theorem);
    common_prefix(t, g, f, lambda, rho_version ? "rho(G)" : "lambda2(G)");
    // f' = f on the same vertex set.
    t.identity("L-form", "f'^T L' f' = f^T L f", laplacian_form(gp, f), laplacian_form(g, f));
    t.identity("D-norm", "f'^T D' f' = f^T D f", degree_form(gp, f), degree_form(g, f));
    t.identity("orthogonal", "f'^T D' e = 0", degree_sum(gp, f), 0.0);
    const double rq = rayleigh_quotient(gp, f);
    t.identity("chain", rho_version ? "rho(G) = f'^T L' f' / f'^T D' f'" : "lambda2(G) = f'^T L' f' / f'^T D' f'", lambda,
               rq);
    if (rho_version) {
        t.at_most("variational sup", "f'^T L' f' / f'^T D' f' <= rho(G')", rq, after);
        t.at_most("conclusion", "rho(G) <= rho(G')", lambda, after);
    } else {
        t.at_least("variational inf", "f'^T L' f' / f'^T D' f' >= lambda2(G')", rq, after);
        t.at_least("conclusion", "lambda2(G) >= lambda2(G')", lambda, after);
    }
    return t.done();
}

}  // namespace

ProofTrace replay_proof_with(const ProofInstance& instance, std::span<const double> f, double lambda,
                             const CheckOptions& opts) {
    check_length(instance.g, f);
    switch (instance.theorem) {
    case TheoremId::T3_1:
    case TheoremId::T4_1:
        return replay_subdivision(instance, f, lambda, opts);
    case TheoremId::T3_3:
    case TheoremId::T4_2:
        return replay_identification(instance, f, lambda, opts);
    case TheoremId::T3_6:
    case TheoremId::T4_3:
        return replay_transfer(instance, f, lambda, opts);
    default:
        throw std::invalid_argument("no proof replay for " + std::string(theorem_name(instance.theorem)));
    }
}

ProofTrace replay_proof(const ProofInstance& instance, const CheckOptions& opts) {
    const Graph& g = instance.g;
    if (g.order() < 2 || !is_connected(g)) throw PreconditionError("proof replay needs a connected graph with n >= 2");
    const auto basis = harmonic_eigenfunctions(g, theorem_target(instance.theorem));
    std::size_t pick = 0;
    if (instance.basis_index) {
        if (*instance.basis_index < 0 || static_cast<std::size_t>(*instance.basis_index) >= basis.size()) {
            throw std::out_of_range("basis index outside the eigenspace");
        }
        pick = static_cast<std::size_t>(*instance.basis_index);
    } else if (basis.size() > 1) {
        throw PreconditionError("eigenspace has dimension " + std::to_string(basis.size()) + "; choose a basis function");
    }
    return replay_proof_with(instance, basis[pick].f, basis[pick].lambda, opts);
}

}  // namespace normlap
