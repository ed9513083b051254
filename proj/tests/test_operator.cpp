#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "slh/errors.hpp"
#include "slh/operator_algebra.hpp"

using namespace slh;

namespace {

Operator pauli_x() {
    Operator m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Operator pauli_y() {
    Operator m(2, 2);
    m << 0, complex(0, -1), complex(0, 1), 0;
    return m;
}

Operator pauli_z() {
    Operator m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// |g> = e0, |e> = e1; lowering operator |g><e|.
Operator lower() {
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}

Operator random_matrix(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Operator m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = complex(gauss(rng), gauss(rng));
    return m;
}

Operator random_unitary(Eigen::Index d, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Operator> qr(random_matrix(d, rng));
    Operator q = qr.householderQ();
    Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
    return q;
}

}  // namespace

TEST_CASE("spectral norm") {
    CHECK(op_norm(lower()) == doctest::Approx(1.0).epsilon(1e-12));
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 2;
    CHECK(op_norm(m) == doctest::Approx(2.0).epsilon(1e-12));
    Operator diag = Operator::Zero(2, 2);
    diag(0, 0) = 3;
    diag(1, 1) = -5;
    CHECK(op_norm(diag) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("structural predicates") {
    CHECK(is_hermitian(pauli_x()));
    CHECK(is_unitary(pauli_x()));
    CHECK_FALSE(is_hermitian(lower()));
    CHECK_FALSE(is_unitary(lower()));
    Operator j(2, 2);
    j << 0, -1, 1, 0;
    CHECK(is_skew_adjoint(j));
    CHECK_FALSE(is_skew_adjoint(pauli_x()));
}

TEST_CASE("commutator of sigma_x and sigma_y is 2i sigma_z") {
    const Operator lhs = commutator(pauli_x(), pauli_y());
    const Operator rhs = complex(0, 2) * pauli_z();
    CHECK(op_norm(lhs - rhs) < 1e-14);
}

TEST_CASE("real and imaginary operator parts") {
    Operator a = Operator::Zero(2, 2);
    a(0, 1) = complex(0, 2);
    // (a - a*)/2i = sigma_x, (a + a*)/2 = i(|0><1| - |1><0|) ... check directly
    CHECK(op_norm(im_part(a) - pauli_x()) < 1e-15);
    Operator re_expect(2, 2);
    re_expect << 0, complex(0, 1), complex(0, -1), 0;
    CHECK(op_norm(re_part(a) - re_expect) < 1e-15);
    CHECK(is_hermitian(im_part(a)));
    CHECK(is_hermitian(re_part(a)));
    // a = re + i im
    CHECK(op_norm(a - (re_part(a) + complex(0, 1) * im_part(a))) < 1e-15);
}

TEST_CASE("function of a Hermitian operator") {
    const double kappa = 0.7;
    Operator fz(2, 2);
    fz << 0.5, 0, 0, -0.5;
    const Operator c = func_of_hermitian(kappa * fz, [](double x) { return std::cos(x); });
    CHECK(op_norm(c - std::cos(kappa / 2) * Operator::Identity(2, 2)) < 1e-14);
    const Operator s = func_of_hermitian(kappa * fz, [](double x) { return std::sin(x); });
    Operator s_expect(2, 2);
    s_expect << std::sin(kappa / 2), 0, 0, -std::sin(kappa / 2);
    CHECK(op_norm(s - s_expect) < 1e-14);
    CHECK_THROWS_AS(func_of_hermitian(lower(), [](double x) { return x; }), validation_error);
}

TEST_CASE("matrix exponential closed forms") {
    const double theta = 0.3;
    Operator j(2, 2);
    j << 0, -theta, theta, 0;
    Operator rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    CHECK(op_norm(matrix_exp(j) - rot) < 1e-14);

    Operator nil = Operator::Zero(2, 2);
    nil(0, 1) = 1;
    Operator nil_exp = Operator::Identity(2, 2);
    nil_exp(0, 1) = 1;
    CHECK(op_norm(matrix_exp(nil) - nil_exp) < 1e-15);

    CHECK(op_norm(matrix_exp(Operator::Zero(3, 3)) - Operator::Identity(3, 3)) == 0.0);
}

TEST_CASE("matrix exponential against eigendecomposition") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        Operator a = random_matrix(4, rng);
        a = (a + a.adjoint()).eval();  // Hermitian
        Eigen::SelfAdjointEigenSolver<Operator> es(a);
        Operator expect = es.eigenvectors() *
                          es.eigenvalues().array().exp().matrix().asDiagonal() *
                          es.eigenvectors().adjoint();
        CHECK(op_norm(matrix_exp(a) - expect) < 1e-11 * op_norm(expect));
    }
}

TEST_CASE("unitary logarithm round trip") {
    const double theta = 0.3;
    Operator rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Operator j(2, 2);
    j << 0, -theta, theta, 0;
    CHECK(op_norm(unitary_log(rot) - j) < 1e-13);

    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 5; ++rep) {
        const Operator u = random_unitary(5, rng);
        const Operator x = unitary_log(u);
        CHECK(is_skew_adjoint(x, 1e-12));
        CHECK(op_norm(matrix_exp(x) - u) < 1e-11);
    }
    CHECK_THROWS_AS(unitary_log(2.0 * Operator::Identity(2, 2)), validation_error);
}

TEST_CASE("column stacking convention") {
    Operator a(2, 2);
    a << 1, 2, 3, 4;
    const Eigen::VectorXcd v = vec(a);
    CHECK(v(0) == complex(1, 0));
    CHECK(v(1) == complex(3, 0));
    CHECK(v(2) == complex(2, 0));
    CHECK(v(3) == complex(4, 0));
    CHECK(op_norm(unvec(v, 2) - a) == 0.0);
}

TEST_CASE("sandwich acts as a X b") {
    std::mt19937_64 rng(3);
    const Operator a = random_matrix(3, rng);
    const Operator b = random_matrix(3, rng);
    const Operator x = random_matrix(3, rng);
    CHECK(op_norm(sandwich(a, b).apply(x) - a * x * b) < 1e-12);
    CHECK(op_norm(left_mult(a).apply(x) - a * x) < 1e-12);
    CHECK(op_norm(right_mult(b).apply(x) - x * b) < 1e-12);
    const Superoperator sum = left_mult(a) + complex(0, 1) * right_mult(b);
    CHECK(op_norm(sum.apply(x) - (a * x + complex(0, 1) * x * b)) < 1e-12);
    CHECK(op_norm(superop_identity(3).apply(x) - x) == 0.0);
    CHECK(op_norm(superop_zero(3).apply(x)) == 0.0);
}

TEST_CASE("superoperator exponential reproduces amplitude decay") {
    // Heisenberg generator L* X L + K* X + X K with L = |g><e|, H = 0:
    // the excited population decays as e^{-t}.
    const Operator l = lower();
    const Operator k = -0.5 * (l.adjoint() * l);
    const Superoperator gen =
        sandwich(l.adjoint(), l) + complex(1, 0) * left_mult(k.adjoint()) +
        complex(1, 0) * right_mult(k);
    Operator number = Operator::Zero(2, 2);
    number(1, 1) = 1;
    const Operator out = superop_exp(gen, 1.0).apply(number);
    CHECK(op_norm(out - std::exp(-1.0) * number) < 1e-13);
}
