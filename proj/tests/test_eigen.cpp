#include "normlap/eigen.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace normlap;

namespace {

SymMatrix from_oracle(const oracle::Matrix& a) {
    const int n = static_cast<int>(a.size());
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return m;
}

oracle::Matrix random_symmetric(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    oracle::Matrix a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double x = dist(rng);
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x;
            a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = x;
        }
    return a;
}

}  // namespace

TEST_CASE("identity") {
    const auto d = eigh(SymMatrix::identity(3));
    for (double x : d.values) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(orthonormality_error(d) <= 1e-12);
}

TEST_CASE("2x2 [[1,-1],[-1,1]]") {
    SymMatrix m(2);
    m.set(0, 0, 1);
    m.set(1, 1, 1);
    m.set(0, 1, -1);
    const auto d = eigh(m);
    CHECK(std::abs(d.values[0]) <= 1e-12);
    CHECK(d.values[1] == doctest::Approx(2.0).epsilon(1e-12));
    const auto g0 = d.vector(0);
    CHECK(std::abs(std::abs(g0[0]) - 1 / std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(g0[0] - g0[1]) <= 1e-12);
}

TEST_CASE("C5 normalized Laplacian matches the circulant formula") {
    const int n = 5;
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m.set(i, i, 1.0);
        m.set(i, (i + 1) % n, -0.5);
    }
    const auto d = eigh(m);
    const auto expect = oracle::cycle_spectrum(n);
    for (int k = 0; k < n; ++k) CHECK(std::abs(d.values[static_cast<std::size_t>(k)] - expect[static_cast<std::size_t>(k)]) <= 1e-10);
    CHECK(residual_check(m, d) <= 1e-10);
}

TEST_CASE("random matrices agree with cyclic Jacobi") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 12;
        const auto a = random_symmetric(n, rng);
        const auto m = from_oracle(a);
        const auto d = eigh(m);
        const auto ref = oracle::jacobi(a);
        for (int k = 0; k < n; ++k)
            REQUIRE(std::abs(d.values[static_cast<std::size_t>(k)] - ref.values[static_cast<std::size_t>(k)]) <= 1e-10);
        CHECK(residual_check(m, d) <= 1e-10 * n);
        CHECK(orthonormality_error(d) <= 1e-10);
        CHECK(std::abs(m.trace() - std::accumulate(d.values.begin(), d.values.end(), 0.0)) <= 1e-10);
        for (std::size_t k = 1; k < d.values.size(); ++k) CHECK(d.values[k - 1] <= d.values[k]);
    }
}

TEST_CASE("repeated eigenvalues keep an orthonormal basis") {
    // J - I on 6 vertices: eigenvalues 5 and -1 (five times).
    SymMatrix m(6);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) m.set(i, j, 1.0);
    const auto d = eigh(m);
    for (int k = 0; k < 5; ++k) CHECK(d.values[static_cast<std::size_t>(k)] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(d.values[5] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(orthonormality_error(d) <= 1e-12);
    CHECK(residual_check(m, d) <= 1e-12);
}

TEST_CASE("residual_check detects a perturbed eigenvalue") {
    SymMatrix m(3);
    m.set(0, 0, 2);
    m.set(1, 1, 3);
    m.set(2, 2, 5);
    m.set(0, 1, 0.5);
    auto d = eigh(m);
    CHECK(residual_check(m, d) <= 1e-12);
    d.values[1] += 0.1;
    CHECK(residual_check(m, d) >= 0.09);

    CHECK_THROWS_AS(residual_check(SymMatrix(4), d), std::invalid_argument);
}

TEST_CASE("1x1 and zero matrices") {
    SymMatrix one(1);
    one.set(0, 0, 4.5);
    const auto d = eigh(one);
    CHECK(d.values == std::vector<double>{4.5});
    CHECK(std::abs(d.vector(0)[0]) == doctest::Approx(1.0));

    const auto z = eigh(SymMatrix(4));
    for (double x : z.values) CHECK(x == 0.0);
    CHECK(orthonormality_error(z) <= 1e-15);
}

TEST_CASE("eigenspace grouping") {
    const std::vector<double> v{0.0, 1.0, 1.0 + 5e-8, 1.5, 2.0};
    const auto groups = eigenspace_groups(v);
    REQUIRE(groups.size() == 4);
    CHECK(groups[1] == std::pair{1, 3});
    CHECK(eigenspace_of(v, 2) == std::pair{1, 3});
    CHECK(eigenspace_of(v, 0) == std::pair{0, 1});
    CHECK(eigenspace_of(v, 4) == std::pair{4, 5});
}
