// Linear algebra core: spectral matrix exponential, eigensolver, combinators.
// The exponential is cross-checked against an independent truncated-Taylor
// oracle that shares nothing with the spectral code path except the raw
// matrix product.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ctqa/linalg.hpp"

using ctqa::Complex;
using ctqa::ComplexMatrix;
using ctqa::StateVector;

namespace {

const double pi = std::acos(-1.0);

// sum_{k<=terms} (-iHt)^k / k!  -- converges fast for ||Ht|| <= 4.
ComplexMatrix mat_exp_taylor(const ComplexMatrix& h, double t, int terms = 40) {
    const std::size_t n = h.rows();
    ComplexMatrix sum = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    const Complex minus_it = Complex(0.0, -t);
    for (int k = 1; k <= terms; ++k) {
        term = (term * h).scaled(minus_it / static_cast<double>(k));
        sum = sum + term;
    }
    return sum;
}

ComplexMatrix random_hermitian(std::mt19937& rng, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        h(i, i) = u(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            h(i, j) = Complex(u(rng), u(rng));
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

ComplexMatrix not_gate() {
    ComplexMatrix m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("rotation generator exponentiates to the closed-form rotation", "[linalg]") {
    const ComplexMatrix h = ctqa::not_pi_2();

    SECTION("t = 1 gives the -i NOT rotation") {
        const ComplexMatrix u = ctqa::mat_exp_hermitian(h, 1.0);
        ComplexMatrix want(2, 2);
        want(0, 1) = Complex(0.0, -1.0);
        want(1, 0) = Complex(0.0, -1.0);
        REQUIRE(ctqa::max_abs_diff(u, want) <= 1e-12);
    }

    SECTION("t = 0 gives the identity") {
        const ComplexMatrix u = ctqa::mat_exp_hermitian(h, 0.0);
        REQUIRE(ctqa::max_abs_diff(u, ComplexMatrix::identity(2)) <= 1e-12);
    }

    SECTION("t = 1/2 matches the frozen half-rotation and the Taylor oracle") {
        const ComplexMatrix u = ctqa::mat_exp_hermitian(h, 0.5);
        const double rt = std::sqrt(2.0) / 2.0;
        ComplexMatrix want(2, 2);
        want(0, 0) = rt;
        want(1, 1) = rt;
        want(0, 1) = Complex(0.0, -rt);
        want(1, 0) = Complex(0.0, -rt);
        REQUIRE(ctqa::max_abs_diff(u, want) <= 1e-12);
        REQUIRE(ctqa::max_abs_diff(u, mat_exp_taylor(h, 0.5)) <= 1e-9);
    }
}

TEST_CASE("mat_exp_hermitian rejects bad input", "[linalg]") {
    ComplexMatrix skew(2, 2);
    skew(0, 1) = Complex(0.0, 0.1);
    skew(1, 0) = Complex(0.0, 0.1);  // conj would be -0.1i: asymmetry 0.2
    REQUIRE_THROWS_WITH(ctqa::mat_exp_hermitian(skew, 1.0),
                        Catch::Matchers::ContainsSubstring("not Hermitian"));
    REQUIRE_THROWS_WITH(ctqa::mat_exp_hermitian(ctqa::not_pi_2(), -1.0),
                        Catch::Matchers::ContainsSubstring("negative duration"));
    REQUIRE_THROWS(ctqa::mat_exp_hermitian(ctqa::not_pi_2(),
                                           std::numeric_limits<double>::quiet_NaN()));
}

TEST_CASE("eigh handles the documented small cases", "[linalg]") {
    SECTION("diagonal matrix") {
        ComplexMatrix h(2, 2);
        h(0, 0) = 3.0;
        h(1, 1) = 1.0;
        const ctqa::EighResult e = ctqa::eigh(h);
        REQUIRE(e.values[0] == Catch::Approx(1.0).margin(1e-14));
        REQUIRE(e.values[1] == Catch::Approx(3.0).margin(1e-14));
        // Eigenvectors must be the canonical basis up to order and phase; the
        // reconstruction check pins that down without fixing the phase.
        ComplexMatrix recon(2, 2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t k = 0; k < 2; ++k)
                    recon(i, j) += e.vectors(i, k) * e.values[k] * std::conj(e.vectors(j, k));
        REQUIRE(ctqa::max_abs_diff(recon, h) <= 1e-10);
        REQUIRE(std::abs(std::abs(e.vectors(1, 0)) - 1.0) <= 1e-12);
        REQUIRE(std::abs(std::abs(e.vectors(0, 1)) - 1.0) <= 1e-12);
    }

    SECTION("rotation generator has eigenvalues -pi/2, pi/2") {
        const ctqa::EighResult e = ctqa::eigh(ctqa::not_pi_2());
        REQUIRE(e.values[0] == Catch::Approx(-pi / 2).margin(1e-13));
        REQUIRE(e.values[1] == Catch::Approx(pi / 2).margin(1e-13));
    }

    SECTION("zero matrix") {
        const ctqa::EighResult e = ctqa::eigh(ComplexMatrix::zero(2));
        REQUIRE(e.values[0] == 0.0);
        REQUIRE(e.values[1] == 0.0);
        REQUIRE(e.vectors.unitarity_defect() <= 1e-12);
    }
}

TEST_CASE("eigh reconstructs random Hermitian matrices", "[linalg]") {
    std::mt19937 rng(20240811);
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 13u, 16u}) {
        for (int rep = 0; rep < 5; ++rep) {
            const ComplexMatrix h = random_hermitian(rng, n, 2.0);
            const ctqa::EighResult e = ctqa::eigh(h);
            REQUIRE(e.vectors.unitarity_defect() <= 1e-12);
            for (std::size_t k = 0; k + 1 < n; ++k) REQUIRE(e.values[k] <= e.values[k + 1]);
            ComplexMatrix recon(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t k = 0; k < n; ++k)
                        recon(i, j) += e.vectors(i, k) * e.values[k] * std::conj(e.vectors(j, k));
            REQUIRE(ctqa::max_abs_diff(recon, h) <= 1e-10);
        }
    }
}

TEST_CASE("mat_exp_hermitian is unitary and a semigroup", "[linalg]") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> tdist(0.0, 8.0);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 1 + rep % 8;
        const ComplexMatrix h = random_hermitian(rng, n);
        const double t1 = tdist(rng), t2 = tdist(rng);
        const ComplexMatrix u1 = ctqa::mat_exp_hermitian(h, t1);
        REQUIRE(u1.unitarity_defect() <= 1e-10);
        const ComplexMatrix u2 = ctqa::mat_exp_hermitian(h, t2);
        const ComplexMatrix u12 = ctqa::mat_exp_hermitian(h, t1 + t2);
        REQUIRE(ctqa::max_abs_diff(u1 * u2, u12) <= 1e-9);
    }
}

TEST_CASE("mat_exp_hermitian agrees with the Taylor oracle", "[linalg]") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> tdist(0.0, 2.0);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rep % 4;
        const ComplexMatrix h = random_hermitian(rng, n, 0.5);  // keeps ||Ht|| <= 4
        const double t = tdist(rng);
        REQUIRE(ctqa::max_abs_diff(ctqa::mat_exp_hermitian(h, t), mat_exp_taylor(h, t)) <= 1e-9);
    }
}

TEST_CASE("kron matches its definition and known block patterns", "[linalg]") {
    const ComplexMatrix x = not_gate();
    const ComplexMatrix i2 = ComplexMatrix::identity(2);

    SECTION("identity (x) NOT is block diagonal") {
        const ComplexMatrix k = ctqa::kron(i2, x);
        ComplexMatrix want(4, 4);
        want(0, 1) = want(1, 0) = want(2, 3) = want(3, 2) = 1.0;
        REQUIRE(ctqa::max_abs_diff(k, want) == 0.0);
    }

    SECTION("NOT (x) identity is the anti-block pattern") {
        const ComplexMatrix k = ctqa::kron(x, i2);
        ComplexMatrix want(4, 4);
        want(0, 2) = want(1, 3) = want(2, 0) = want(3, 1) = 1.0;
        REQUIRE(ctqa::max_abs_diff(k, want) == 0.0);
    }

    SECTION("kron with the 1x1 identity is a no-op") {
        std::mt19937 rng(3);
        const ComplexMatrix a = random_hermitian(rng, 3);
        ComplexMatrix one(1, 1);
        one(0, 0) = 1.0;
        REQUIRE(ctqa::max_abs_diff(ctqa::kron(a, one), a) == 0.0);
        REQUIRE(ctqa::max_abs_diff(ctqa::kron(one, a), a) == 0.0);
    }

    SECTION("definition expansion on random inputs") {
        std::mt19937 rng(4);
        const ComplexMatrix a = random_hermitian(rng, 2);
        const ComplexMatrix b = random_hermitian(rng, 3);
        const ComplexMatrix k = ctqa::kron(a, b);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                REQUIRE(k(i, j) == a(i / 3, j / 3) * b(i % 3, j % 3));
    }
}

TEST_CASE("direct_sum builds block diagonals and commutes with exp", "[linalg]") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    REQUIRE(ctqa::max_abs_diff(ctqa::direct_sum(i2, i2), ComplexMatrix::identity(4)) == 0.0);

    ComplexMatrix a(1, 1), b(1, 1);
    a(0, 0) = 1.0;
    b(0, 0) = 2.0;
    const ComplexMatrix d = ctqa::direct_sum(a, b);
    REQUIRE(d(0, 0) == Complex(1.0));
    REQUIRE(d(1, 1) == Complex(2.0));
    REQUIRE(d(0, 1) == Complex(0.0));

    // Block-wise exponentiation: exp of (pi/2)NOT (+) -(pi/2)NOT at t=1 is
    // diag(-i NOT, +i NOT).
    const ComplexMatrix h = ctqa::direct_sum(ctqa::not_pi_2(), ctqa::not_pi_2().scaled(-1.0));
    const ComplexMatrix u = ctqa::mat_exp_hermitian(h, 1.0);
    ComplexMatrix want(4, 4);
    want(0, 1) = want(1, 0) = Complex(0.0, -1.0);
    want(2, 3) = want(3, 2) = Complex(0.0, 1.0);
    REQUIRE(ctqa::max_abs_diff(u, want) <= 1e-12);
}

TEST_CASE("exponentiation factorizes over kron and direct_sum", "[linalg]") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> tdist(0.0, 3.0);
    for (int rep = 0; rep < 10; ++rep) {
        const ComplexMatrix a = random_hermitian(rng, 2);
        const ComplexMatrix b = random_hermitian(rng, 3);
        const double t = tdist(rng);

        const ComplexMatrix lhs_sum = ctqa::mat_exp_hermitian(ctqa::direct_sum(a, b), t);
        const ComplexMatrix rhs_sum =
            ctqa::direct_sum(ctqa::mat_exp_hermitian(a, t), ctqa::mat_exp_hermitian(b, t));
        REQUIRE(ctqa::max_abs_diff(lhs_sum, rhs_sum) <= 1e-9);

        const ComplexMatrix i2 = ComplexMatrix::identity(2);
        const ComplexMatrix lhs_kron = ctqa::mat_exp_hermitian(ctqa::kron(i2, b), t);
        const ComplexMatrix rhs_kron = ctqa::kron(i2, ctqa::mat_exp_hermitian(b, t));
        REQUIRE(ctqa::max_abs_diff(lhs_kron, rhs_kron) <= 1e-9);
    }
}

TEST_CASE("projector is a diagonal idempotent of the right rank", "[linalg]") {
    const ComplexMatrix p1 = ctqa::projector(2, {0});
    REQUIRE(p1(0, 0) == Complex(1.0));
    REQUIRE(p1(1, 1) == Complex(0.0));

    const ComplexMatrix p2 = ctqa::projector(4, {0, 3});
    REQUIRE(p2(0, 0) == Complex(1.0));
    REQUIRE(p2(1, 1) == Complex(0.0));
    REQUIRE(p2(2, 2) == Complex(0.0));
    REQUIRE(p2(3, 3) == Complex(1.0));
    REQUIRE(ctqa::max_abs_diff(p2 * p2, p2) == 0.0);

    Complex trace(0.0);
    for (std::size_t i = 0; i < 4; ++i) trace += p2(i, i);
    REQUIRE(trace == Complex(2.0));

    REQUIRE_THROWS_WITH(ctqa::projector(2, {2}), Catch::Matchers::ContainsSubstring("out of range"));

    // <psi|P|psi> picks out the retained weight.
    StateVector psi;
    psi.amp = {std::sqrt(0.6), std::sqrt(0.4)};
    const StateVector proj = ctqa::apply(ctqa::projector(2, {0}), psi);
    double weight = 0.0;
    for (const Complex& z : proj.amp) weight += std::norm(z);
    REQUIRE(weight == Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("apply performs the matrix-vector product and keeps norms", "[linalg]") {
    const StateVector zero = StateVector::basis(2, 0);

    const StateVector same = ctqa::apply(ComplexMatrix::identity(2), zero);
    REQUIRE(same.amp[0] == Complex(1.0));
    REQUIRE(same.amp[1] == Complex(0.0));

    ComplexMatrix minus_i_not(2, 2);
    minus_i_not(0, 1) = Complex(0.0, -1.0);
    minus_i_not(1, 0) = Complex(0.0, -1.0);
    const StateVector flipped = ctqa::apply(minus_i_not, zero);
    REQUIRE(std::abs(flipped.amp[0]) <= 1e-15);
    REQUIRE(std::abs(flipped.amp[1] - Complex(0.0, -1.0)) <= 1e-15);

    const StateVector half = ctqa::apply(ctqa::mat_exp_hermitian(ctqa::not_pi_2(), 0.5), zero);
    const double rt = std::sqrt(2.0) / 2.0;
    REQUIRE(std::abs(half.amp[0] - Complex(rt, 0.0)) <= 1e-12);
    REQUIRE(std::abs(half.amp[1] - Complex(0.0, -rt)) <= 1e-12);
    REQUIRE(half.norm() == Catch::Approx(1.0).margin(1e-9));

    REQUIRE_THROWS_WITH(ctqa::apply(ComplexMatrix::identity(3), zero),
                        Catch::Matchers::ContainsSubstring("dimension mismatch"));
}

TEST_CASE("matrix construction enforces the dimension cap and finiteness", "[linalg]") {
    REQUIRE_THROWS_WITH(ComplexMatrix(65, 65), Catch::Matchers::ContainsSubstring("above 64"));
    REQUIRE_NOTHROW(ComplexMatrix(64, 64));
    REQUIRE_THROWS_WITH(
        ComplexMatrix(1, 1, {Complex(std::numeric_limits<double>::infinity(), 0.0)}),
        Catch::Matchers::ContainsSubstring("non-finite"));
    // kron above the cap must be rejected through the constructor.
    const ComplexMatrix i8 = ComplexMatrix::identity(8);
    const ComplexMatrix i16 = ComplexMatrix::identity(16);
    REQUIRE_NOTHROW(ctqa::kron(i8, i8));
    REQUIRE_THROWS(ctqa::kron(i8, i16));
}
