#include "normlap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

namespace normlap {

void Hygiene::merge(const Hygiene& other) {
    residual = std::max(residual, other.residual);
    orthonormality = std::max(orthonormality, other.orthonormality);
    trace = std::max(trace, other.trace);
    decompositions += other.decompositions;
}

namespace {

std::mutex totals_mutex;
Hygiene totals;

}  // namespace

Hygiene hygiene_totals() {
    std::lock_guard lock(totals_mutex);
    return totals;
}

void record_hygiene(const Hygiene& h) {
    std::lock_guard lock(totals_mutex);
    totals.merge(h);
}

void reset_hygiene_totals() {
    std::lock_guard lock(totals_mutex);
    totals = Hygiene{};
}

SymMatrix normalized_laplacian(const Graph& g) {
    const int n = g.order();
    SymMatrix m(n);
    std::vector<double> inv_sqrt(static_cast<std::size_t>(n), 0.0);
    for (int v = 0; v < n; ++v) {
        const int d = g.degree(v);
        if (d > 0) {
            m.set(v, v, 1.0);
            inv_sqrt[static_cast<std::size_t>(v)] = 1.0 / std::sqrt(static_cast<double>(d));
        }
    }
    for (const Edge& e : g.edges()) {
        m.set(e.u, e.v, -inv_sqrt[static_cast<std::size_t>(e.u)] * inv_sqrt[static_cast<std::size_t>(e.v)]);
    }
    return m;
}

Spectrum spectrum(const Graph& g, double tol) {
    const SymMatrix m = normalized_laplacian(g);
    Spectrum s{g, eigh(m, tol), {}};
    const int n = g.order();

    s.hygiene.decompositions = 1;
    s.hygiene.residual = s.eig.residual;
    s.hygiene.orthonormality = orthonormality_error(s.eig);
    const long non_isolated = std::count_if(g.degrees().begin(), g.degrees().end(), [](int d) { return d > 0; });
    const double total = std::accumulate(s.eig.values.begin(), s.eig.values.end(), 0.0);
    s.hygiene.trace = std::abs(total - static_cast<double>(non_isolated));
    record_hygiene(s.hygiene);

    if (!s.hygiene.within()) {
        throw NumericalError("spectrum certificate failed: residual " + std::to_string(s.hygiene.residual) +
                             ", orthonormality " + std::to_string(s.hygiene.orthonormality) + ", trace " +
                             std::to_string(s.hygiene.trace));
    }
    if (s.eig.values.front() < -kHygieneTol) {
        throw NumericalError("normalized Laplacian has negative eigenvalue " + std::to_string(s.eig.values.front()));
    }
    if (g.size() > 0 && is_connected(g)) {
        // D^{1/2} e / ||D^{1/2} e|| must be annihilated.
        const double norm = std::sqrt(static_cast<double>(volume(g)));
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += m(i, j) * std::sqrt(static_cast<double>(g.degree(j))) / norm;
            worst = std::max(worst, std::abs(acc));
        }
        if (worst > kHygieneTol) throw NumericalError("D^{1/2}e is not in the kernel: " + std::to_string(worst));
    }
    return s;
}

double lambda2(const Graph& g) {
    if (g.order() < 2) throw PreconditionError("lambda2 requires n >= 2");
    return spectrum(g).lambda2();
}

double rho(const Graph& g) { return spectrum(g).rho(); }

std::pair<int, int> target_eigenspace(const Spectrum& s, Target which) {
    const int k = which == Target::SecondSmallest ? 1 : s.graph.order() - 1;
    return eigenspace_of(s.values(), k);
}

std::vector<HarmonicEigenfunction> harmonic_eigenfunctions(const Spectrum& s, Target which) {
    const Graph& g = s.graph;
    if (g.order() < 2) throw PreconditionError("harmonic eigenfunctions require n >= 2");
    if (!is_connected(g)) throw PreconditionError("harmonic eigenfunctions require a connected graph");

    const int n = g.order();
    const auto [first, last] = target_eigenspace(s, which);
    std::vector<HarmonicEigenfunction> out;
    out.reserve(static_cast<std::size_t>(last - first));
    for (int k = first; k < last; ++k) {
        const auto vec = s.eig.vector(k);
        HarmonicEigenfunction h;
        h.lambda = s.eig.values[static_cast<std::size_t>(k)];
        h.f.resize(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) h.f[static_cast<std::size_t>(v)] = vec[v] / std::sqrt(static_cast<double>(g.degree(v)));
        const auto lead = std::find_if(h.f.begin(), h.f.end(), [](double x) { return std::abs(x) > 1e-9; });
        if (lead != h.f.end() && *lead < 0) {
            for (double& x : h.f) x = -x;
        }
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<HarmonicEigenfunction> harmonic_eigenfunctions(const Graph& g, Target which) {
    if (g.order() < 2) throw PreconditionError("harmonic eigenfunctions require n >= 2");
    if (!is_connected(g)) throw PreconditionError("harmonic eigenfunctions require a connected graph");
    return harmonic_eigenfunctions(spectrum(g), which);
}

namespace {

void require_length(const Graph& g, std::span<const double> f) {
    if (f.size() != static_cast<std::size_t>(g.order())) {
        throw std::invalid_argument("vertex function has " + std::to_string(f.size()) + " entries for a graph of order " +
                                    std::to_string(g.order()));
    }
}

}  // namespace

double laplacian_form(const Graph& g, std::span<const double> f) {
    require_length(g, f);
    double total = 0.0;
    for (const Edge& e : g.edges()) {
        const double diff = f[static_cast<std::size_t>(e.u)] - f[static_cast<std::size_t>(e.v)];
        total += diff * diff;
    }
    return total;
}

double degree_form(const Graph& g, std::span<const double> f) {
    require_length(g, f);
    double total = 0.0;
    for (int v = 0; v < g.order(); ++v) total += g.degree(v) * f[static_cast<std::size_t>(v)] * f[static_cast<std::size_t>(v)];
    return total;
}

double degree_sum(const Graph& g, std::span<const double> f) {
    require_length(g, f);
    double total = 0.0;
    for (int v = 0; v < g.order(); ++v) total += g.degree(v) * f[static_cast<std::size_t>(v)];
    return total;
}

double rayleigh_quotient(const Graph& g, std::span<const double> f) {
    const double denominator = degree_form(g, f);
    if (!(denominator > 0.0)) throw std::domain_error("Rayleigh quotient denominator f^T D f is zero");
    return laplacian_form(g, f) / denominator;
}

double check_harmonic_equation(const Graph& g, std::span<const double> f, double lambda) {
    require_length(g, f);
    double worst = 0.0;
    for (int v = 0; v < g.order(); ++v) {
        const int d = g.degree(v);
        if (d == 0) throw PreconditionError("vertex " + std::to_string(v) + " is isolated");
        const double fv = f[static_cast<std::size_t>(v)];
        double acc = 0.0;
        for (Vertex u : g.neighbors(v)) acc += fv - f[static_cast<std::size_t>(u)];
        worst = std::max(worst, std::abs(acc / d - lambda * fv));
    }
    return worst;
}

double check_neighbor_sum_zero(const Graph& g, std::span<const double> f) {
    require_length(g, f);
    double worst = 0.0;
    for (int v = 0; v < g.order(); ++v) {
        double acc = 0.0;
        for (Vertex u : g.neighbors(v)) acc += f[static_cast<std::size_t>(u)];
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

bool is_degree_orthogonal(const Graph& g, std::span<const double> f, double rel_tol) {
    double sup = 0.0;
    for (double x : f) sup = std::max(sup, std::abs(x));
    return std::abs(degree_sum(g, f)) <= rel_tol * static_cast<double>(volume(g)) * sup;
}

}  // namespace normlap
