#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace normlap {

inline constexpr double kDefaultEigenTol = 1e-10;
/// Eigenvalues closer than this are treated as one eigenspace.
inline constexpr double kMultiplicityTol = 1e-7;

/// Dense real symmetric matrix. Only one triangle is writable; `set` mirrors it.
class SymMatrix {
public:
    explicit SymMatrix(int n);
    static SymMatrix identity(int n);

    int dim() const noexcept { return n_; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }
    void set(int i, int j, double value) {
        data_[index(i, j)] = value;
        data_[index(j, i)] = value;
    }
    double trace() const;
    /// Row-major storage, n*n entries.
    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }

    int n_;
    std::vector<double> data_;
};

struct EigenDecomposition {
    int n = 0;
    /// Ascending.
    std::vector<double> values;
    /// Eigenvector k occupies [k*n, (k+1)*n).
    std::vector<double> vectors;
    /// max_k ||M g_k - lambda_k g_k||_inf at construction time.
    double residual = 0.0;

    std::span<const double> vector(int k) const {
        return {vectors.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    }
    std::span<double> vector(int k) {
        return {vectors.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    }
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// Full eigendecomposition by Householder tridiagonalization and implicit-shift QL.
/// Throws ConvergenceError if an eigenvalue needs more than 50 QL sweeps or the
/// final residual exceeds tol * n.
EigenDecomposition eigh(const SymMatrix& m, double tol = kDefaultEigenTol);

/// Recomputes max_k ||M g_k - lambda_k g_k||_inf. Throws std::invalid_argument on size mismatch.
double residual_check(const SymMatrix& m, const EigenDecomposition& d);

/// max |(G^T G - I)_{ij}| over the eigenvector matrix G.
double orthonormality_error(const EigenDecomposition& d);

/// Half-open index ranges [first, last) of ascending values that chain within `tol`.
std::vector<std::pair<int, int>> eigenspace_groups(std::span<const double> values, double tol = kMultiplicityTol);

/// Indices whose value lies within `tol` of values[k] (contiguous in an ascending list).
std::pair<int, int> eigenspace_of(std::span<const double> values, int k, double tol = kMultiplicityTol);

}  // namespace normlap
