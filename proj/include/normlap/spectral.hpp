#pragma once

#include "normlap/eigen.hpp"
#include "normlap/graph.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace normlap {

/// Bound used when certifying a spectrum (residual, orthonormality, trace, kernel).
inline constexpr double kHygieneTol = 1e-8;

/// Numerical certificate of one eigendecomposition.
struct Hygiene {
    double residual = 0.0;
    double orthonormality = 0.0;
    /// |sum of eigenvalues - number of non-isolated vertices|
    double trace = 0.0;
    long decompositions = 0;

    void merge(const Hygiene& other);
    bool within(double bound = kHygieneTol) const {
        return residual <= bound && orthonormality <= bound && trace <= bound;
    }
};

/// Process-wide running maximum over every spectrum() call (thread-safe).
Hygiene hygiene_totals();
void record_hygiene(const Hygiene& h);
void reset_hygiene_totals();

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigen-data of the normalized Laplacian of `graph`.
struct Spectrum {
    Graph graph;
    EigenDecomposition eig;
    Hygiene hygiene;

    const std::vector<double>& values() const noexcept { return eig.values; }
    double lambda2() const { return eig.values.at(1); }
    double rho() const { return eig.values.back(); }
};

/// Diagonal 1 at non-isolated vertices (0 at isolated ones), -1/sqrt(d(u)d(v)) on edges.
SymMatrix normalized_laplacian(const Graph& g);

/// Eigendecomposition of the normalized Laplacian with its invariants certified:
/// lambda_1 >= -1e-8, the trace identity, and (for connected graphs) D^{1/2}e in the kernel.
/// Throws NumericalError if a certificate fails, ConvergenceError from the solver.
Spectrum spectrum(const Graph& g, double tol = kDefaultEigenTol);

double lambda2(const Graph& g);
double rho(const Graph& g);

enum class Target { SecondSmallest, Largest };

/// f with D^{1/2} f an eigenvector of the normalized Laplacian.
/// Normalized so that ||D^{1/2} f||_2 = 1 and the first coordinate above 1e-9 is positive.
struct HarmonicEigenfunction {
    std::vector<double> f;
    double lambda = 0.0;
};

/// One harmonic eigenfunction per orthonormal basis vector of the target eigenspace.
/// Throws PreconditionError for disconnected graphs or n < 2.
std::vector<HarmonicEigenfunction> harmonic_eigenfunctions(const Spectrum& s, Target which);
std::vector<HarmonicEigenfunction> harmonic_eigenfunctions(const Graph& g, Target which);

/// Index range of the target eigenspace inside s.values().
std::pair<int, int> target_eigenspace(const Spectrum& s, Target which);

/// f^T L f = sum over edges of (f(u)-f(v))^2.
double laplacian_form(const Graph& g, std::span<const double> f);
/// f^T D f.
double degree_form(const Graph& g, std::span<const double> f);
/// f^T D e.
double degree_sum(const Graph& g, std::span<const double> f);

/// f^T L f / f^T D f. Throws std::domain_error if the denominator vanishes.
double rayleigh_quotient(const Graph& g, std::span<const double> f);

/// max_v |(1/d(v)) sum_{u~v} (f(v)-f(u)) - lambda f(v)|. Throws PreconditionError on isolated vertices.
double check_harmonic_equation(const Graph& g, std::span<const double> f, double lambda);

/// max_v |sum_{u~v} f(u)|.
double check_neighbor_sum_zero(const Graph& g, std::span<const double> f);

/// True iff |f^T D e| <= 1e-8 Vol ||f||_inf.
bool is_degree_orthogonal(const Graph& g, std::span<const double> f, double rel_tol = 1e-8);

}  // namespace normlap
