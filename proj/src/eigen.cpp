#include "normlap/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace normlap {

SymMatrix::SymMatrix(int n) : n_(n), data_() {
    if (n < 1) throw std::invalid_argument("matrix dimension must be positive");
    data_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

namespace {

constexpr int kMaxSweeps = 50;

// Working storage is a row-major n x n array `v` with v[r*n + c]. After tridiagonalize()
// it holds the accumulated orthogonal transform; its columns become eigenvectors.
struct Work {
    int n;
    std::vector<double> v;
    std::vector<double> d;
    std::vector<double> e;

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)]; }
};

// Householder reduction to tridiagonal form (diagonal d, subdiagonal e[1..n-1]).
void tridiagonalize(Work& w) {
    const int n = w.n;
    auto& d = w.d;
    auto& e = w.e;
    for (int j = 0; j < n; ++j) d[j] = w.at(n - 1, j);

    for (int i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (int j = 0; j < i; ++j) {
                d[j] = w.at(i - 1, j);
                w.at(i, j) = 0.0;
                w.at(j, i) = 0.0;
            }
        } else {
            for (int k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (int j = 0; j < i; ++j) e[j] = 0.0;

            for (int j = 0; j < i; ++j) {
                f = d[j];
                w.at(j, i) = f;
                g = e[j] + w.at(j, j) * f;
                for (int k = j + 1; k <= i - 1; ++k) {
                    g += w.at(k, j) * d[k];
                    e[k] += w.at(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (int j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (int j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (int k = j; k <= i - 1; ++k) w.at(k, j) -= (f * e[k] + g * d[k]);
                d[j] = w.at(i - 1, j);
                w.at(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for (int i = 0; i < n - 1; ++i) {
        w.at(n - 1, i) = w.at(i, i);
        w.at(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (int k = 0; k <= i; ++k) d[k] = w.at(k, i + 1) / h;
            for (int j = 0; j <= i; ++j) {
                double g = 0.0;
                for (int k = 0; k <= i; ++k) g += w.at(k, i + 1) * w.at(k, j);
                for (int k = 0; k <= i; ++k) w.at(k, j) -= g * d[k];
            }
        }
        for (int k = 0; k <= i; ++k) w.at(k, i + 1) = 0.0;
    }
    for (int j = 0; j < n; ++j) {
        d[j] = w.at(n - 1, j);
        w.at(n - 1, j) = 0.0;
    }
    w.at(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal matrix. Returns false if some eigenvalue
// exceeds the sweep cap.
bool ql_implicit(Work& w) {
    const int n = w.n;
    auto& d = w.d;
    auto& e = w.e;
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        int m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int sweeps = 0;
            do {
                if (++sweeps > kMaxSweeps) return false;
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (int i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (int k = 0; k < n; ++k) {
                        h = w.at(k, i + 1);
                        w.at(k, i + 1) = s * w.at(k, i) + c * h;
                        w.at(k, i) = c * w.at(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
    return true;
}

EigenDecomposition collect(Work& w) {
    const int n = w.n;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w.d[a] < w.d[b]; });
    EigenDecomposition out;
    out.n = n;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        out.values[static_cast<std::size_t>(k)] = w.d[src];
        auto col = out.vector(k);
        for (int r = 0; r < n; ++r) col[r] = w.at(r, src);
    }
    return out;
}

}  // namespace

EigenDecomposition eigh(const SymMatrix& m, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("eigh tolerance must be positive");
    const int n = m.dim();
    Work w{n, m.data(), std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};

    if (n == 1) {
        EigenDecomposition out;
        out.n = 1;
        out.values = {m(0, 0)};
        out.vectors = {1.0};
        return out;
    }

    tridiagonalize(w);
    const bool converged = ql_implicit(w);
    EigenDecomposition out = collect(w);
    out.residual = residual_check(m, out);
    if (!converged) {
        throw ConvergenceError("QL iteration exceeded " + std::to_string(kMaxSweeps) + " sweeps", out.residual);
    }
    if (!(out.residual <= tol * n)) {
        throw ConvergenceError("eigen residual " + std::to_string(out.residual) + " above tolerance", out.residual);
    }
    return out;
}

double residual_check(const SymMatrix& m, const EigenDecomposition& d) {
    const int n = m.dim();
    if (d.n != n || d.values.size() != static_cast<std::size_t>(n) ||
        d.vectors.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw std::invalid_argument("decomposition dimension does not match matrix");
    }
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto g = d.vector(k);
        const double lambda = d.values[static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i) {
            double s = -lambda * g[i];
            for (int j = 0; j < n; ++j) s += m(i, j) * g[j];
            worst = std::max(worst, std::abs(s));
        }
    }
    return worst;
}

double orthonormality_error(const EigenDecomposition& d) {
    double worst = 0.0;
    for (int a = 0; a < d.n; ++a) {
        const auto ga = d.vector(a);
        for (int b = a; b < d.n; ++b) {
            const auto gb = d.vector(b);
            double dot = 0.0;
            for (int i = 0; i < d.n; ++i) dot += ga[i] * gb[i];
            worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

std::vector<std::pair<int, int>> eigenspace_groups(std::span<const double> values, double tol) {
    std::vector<std::pair<int, int>> groups;
    const int n = static_cast<int>(values.size());
    int first = 0;
    for (int k = 1; k <= n; ++k) {
        if (k == n || values[k] - values[k - 1] > tol) {
            groups.emplace_back(first, k);
            first = k;
        }
    }
    return groups;
}

std::pair<int, int> eigenspace_of(std::span<const double> values, int k, double tol) {
    const int n = static_cast<int>(values.size());
    if (k < 0 || k >= n) throw std::out_of_range("eigenvalue index out of range");
    int first = k;
    int last = k + 1;
    while (first > 0 && std::abs(values[first - 1] - values[k]) <= tol) --first;
    while (last < n && std::abs(values[last] - values[k]) <= tol) ++last;
    return {first, last};
}

}  // namespace normlap
