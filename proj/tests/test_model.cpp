#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "slh/errors.hpp"
#include "slh/model.hpp"
#include "test_support.hpp"

using namespace slh;
using testsupport::random_matrix;
using testsupport::random_model;
using testsupport::random_vector;

namespace {

SLHModel scalar_model(complex s, complex l, double h) {
    SLHModel g;
    g.n = 1;
    g.d = 1;
    g.S = {{Operator::Constant(1, 1, s)}};
    g.L = {Operator::Constant(1, 1, l)};
    g.H = Operator::Constant(1, 1, h);
    return g;
}

// |g> = e0, |e> = e1.
Operator lower() {
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1;
    return m;
}

double model_gap(const SLHModel& a, const SLHModel& b) {
    double gap = op_norm(a.scattering() - b.scattering());
    for (size_t i = 0; i < a.L.size(); ++i) gap = std::max(gap, op_norm(a.L[i] - b.L[i]));
    return std::max(gap, op_norm(a.H - b.H));
}

}  // namespace

TEST_CASE("validate reports unitarity and hermiticity residuals") {
    SLHModel g = identity_model(1, 2);
    g.S[0][0] *= 1.1;
    g.H = Operator::Zero(2, 2);
    g.H(1, 0) = 1;  // |e><g|, not Hermitian
    const auto violations = validate(g);
    REQUIRE(violations.size() == 2);
    CHECK(violations[0].component == "S");
    CHECK(violations[0].residual == doctest::Approx(0.21).epsilon(1e-9));
    CHECK(violations[1].component == "H");
    CHECK(violations[1].residual == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(require_valid(g), validation_error);
    CHECK(validate(identity_model(2, 3)).empty());
}

TEST_CASE("validate reports shape problems without assembling") {
    SLHModel g = identity_model(2, 2);
    g.L.pop_back();
    auto violations = validate(g);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].component == "L");

    SLHModel h = identity_model(1, 2);
    h.H = Operator::Zero(3, 3);
    violations = validate(h);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].component == "H");
}

TEST_CASE("scalar series product") {
    const SLHModel g1 = scalar_model(1, 1, 1);
    const SLHModel g2 = scalar_model(1, complex(0, 1), 2);
    const SLHModel g = series(g2, g1);
    CHECK(std::abs(g.S[0][0](0, 0) - complex(1, 0)) < 1e-15);
    CHECK(std::abs(g.L[0](0, 0) - complex(1, 1)) < 1e-15);
    // H = 1 + 2 + Im{conj(i) * 1 * 1} = 3 - 1
    CHECK(std::abs(g.H(0, 0) - complex(2, 0)) < 1e-15);
}

TEST_CASE("scalar series in damping form") {
    const SLHModel g1 = scalar_model(1, 1, 1);
    const SLHModel g2 = scalar_model(1, complex(0, 1), 2);
    const DampingForm d = series_damping(damping(g2), damping(g1));
    // K1 = -1/2 - i, K2 = -1/2 - 2i, K = K1 + K2 - conj(i)*1*1 = -1 - 2i
    CHECK(std::abs(d.K(0, 0) - complex(-1, -2)) < 1e-15);
    // matches the damping of the series product
    const DampingForm d2 = damping(series(g2, g1));
    CHECK(op_norm(d.K - d2.K) < 1e-15);
}

TEST_CASE("damping operator identity K + K* = -sum L*L") {
    std::mt19937_64 rng(21);
    const SLHModel g = random_model(3, 2, rng);
    const DampingForm d = damping(g);
    CHECK(op_norm(d.K + d.K.adjoint() + coupling_sum(g)) < 1e-12);
}

TEST_CASE("scalar displacement") {
    const SLHModel g = scalar_model(1, 1, 0);
    Eigen::VectorXcd alpha(1);
    alpha(0) = complex(0, 1);
    const DampingForm d = displace(g, alpha);
    CHECK(std::abs(d.L[0](0, 0) - complex(1, 1)) < 1e-15);
    // K' = -1/2 - 1/2 - conj(1)*1*i = -1 - i
    CHECK(std::abs(d.K(0, 0) - complex(-1, -1)) < 1e-15);
}

TEST_CASE("series is associative and has identity and inverse") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index n = 1 + Eigen::Index(rng() % 3);
        const Eigen::Index d = 1 + Eigen::Index(rng() % 2);
        const SLHModel a = random_model(n, d, rng);
        const SLHModel b = random_model(n, d, rng);
        const SLHModel c = random_model(n, d, rng);
        CHECK(model_gap(series(series(c, b), a), series(c, series(b, a))) < 1e-10);
        const SLHModel e = identity_model(n, d);
        CHECK(model_gap(series(e, a), a) < 1e-12);
        CHECK(model_gap(series(a, e), a) < 1e-12);
        CHECK(model_gap(series(inverse(a), a), e) < 1e-10);
        CHECK(model_gap(series(a, inverse(a)), e) < 1e-10);
    }
}

TEST_CASE("series preserves validity and damping law") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        const SLHModel a = random_model(2, 2, rng);
        const SLHModel b = random_model(2, 2, rng);
        const SLHModel ba = series(b, a);
        CHECK(validate(ba).empty());
        const DampingForm lhs = series_damping(damping(b), damping(a));
        const DampingForm rhs = damping(ba);
        CHECK(op_norm(lhs.K - rhs.K) < 1e-10);
        for (Eigen::Index i = 0; i < ba.n; ++i) CHECK(op_norm(lhs.L[i] - rhs.L[i]) < 1e-10);
    }
}

TEST_CASE("perturbation_between closes the gap") {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 10; ++rep) {
        const SLHModel a = random_model(2, 2, rng);
        const SLHModel b = random_model(2, 2, rng);
        const SLHModel dg = perturbation_between(a, b);
        CHECK(model_gap(series(a, dg), b) < 1e-10);
        CHECK(model_gap(right_perturb(a, dg), b) < 1e-10);
        // the perturbation from a model to itself is the identity
        CHECK(perturbation_residual(perturbation_between(a, a)) < 1e-10);
    }
}

TEST_CASE("lindblad closed forms for amplitude decay") {
    SLHModel g = identity_model(1, 2);
    g.L[0] = lower();
    Operator number = Operator::Zero(2, 2);
    number(1, 1) = 1;
    CHECK(op_norm(lindblad(g, number) + number) < 1e-15);
    Operator sx(2, 2);
    sx << 0, 1, 1, 0;
    CHECK(op_norm(lindblad(g, sx) + 0.5 * sx) < 1e-15);
    // z = 1 - 2 n relaxes toward the ground value
    Operator z(2, 2);
    z << 1, 0, 0, -1;
    CHECK(op_norm(lindblad(g, z) - 2.0 * number) < 1e-15);
}

TEST_CASE("lindblad equals its commutator form") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        const SLHModel g = random_model(2, 3, rng);
        const Operator x = random_matrix(3, 3, rng);
        Operator expect = -complex(0, 1) * commutator(x, g.H);
        for (const auto& l : g.L)
            expect += 0.5 * l.adjoint() * commutator(x, l) +
                      0.5 * commutator(l.adjoint(), x) * l;
        CHECK(op_norm(lindblad(g, x) - expect) < 1e-11);
    }
}

TEST_CASE("gauge transforms preserve the generator") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 10; ++rep) {
        const SLHModel g = random_model(2, 2, rng);
        GaugeElement u;
        u.R = testsupport::random_unitary(2, rng);
        u.beta = random_vector(2, rng);
        u.e = std::normal_distribution<double>()(rng);
        const SLHModel g2 = gauge_transform(u, g);
        CHECK(validate(g2).empty());
        const Operator x = random_matrix(2, 2, rng);
        CHECK(op_norm(lindblad(g2, x) - lindblad(g, x)) < 1e-10);
    }
}

TEST_CASE("virtual work equals the series Hamiltonian shift") {
    std::mt19937_64 rng(10);
    for (int rep = 0; rep < 10; ++rep) {
        const SLHModel g = random_model(2, 2, rng);
        SLHModel dg = identity_model(2, 2);
        dg.L[0] = random_matrix(2, 2, rng);
        dg.L[1] = random_matrix(2, 2, rng);
        dg.H = testsupport::random_hermitian(2, rng);
        const Operator shift = virtual_work(g, dg);
        const SLHModel composed = series(dg, g);
        CHECK(op_norm(shift - (composed.H - g.H)) < 1e-12);
    }
}

TEST_CASE("left residual vanishes for the identity perturbation") {
    std::mt19937_64 rng(12);
    const SLHModel g = random_model(2, 2, rng);
    const Eigen::VectorXcd alpha = random_vector(2, rng);
    CHECK(op_norm(left_residual(g, identity_model(2, 2), alpha)) < 1e-13);
}

TEST_CASE("left residual scaling for shrinking perturbations") {
    // g_k = (1, k, 0) scalar; real perturbation dL = 1/k gives residual
    // -1/(2 k^2) at alpha = 1, while the rephased dL = i/k locks near -2i.
    Eigen::VectorXcd alpha(1);
    alpha(0) = 1;
    const double k = 8;
    const SLHModel g = scalar_model(1, k, 0);
    const SLHModel real_dg = scalar_model(1, 1.0 / k, 0);
    const Operator r_real = left_residual(g, real_dg, alpha);
    CHECK(std::abs(r_real(0, 0) - complex(-1.0 / 128.0, 0)) < 1e-14);

    const SLHModel phase_dg = scalar_model(1, complex(0, 1.0 / k), 0);
    const Operator r_phase = left_residual(g, phase_dg, alpha);
    // -1/(2k^2) + (-2 + 2/k) i
    CHECK(std::abs(r_phase(0, 0) - complex(-1.0 / 128.0, -1.75)) < 1e-14);
    CHECK(op_norm(r_phase) > 1.7);

    // the rephased obstruction survives k -> infinity
    const SLHModel g64 = scalar_model(1, 64, 0);
    const Operator r64 =
        left_residual(g64, scalar_model(1, complex(0, 1.0 / 64.0), 0), alpha);
    CHECK(std::abs(r64(0, 0) - complex(0, -2)) < 0.04);
}

TEST_CASE("perturbation residual measures distance from the identity") {
    CHECK(perturbation_residual(identity_model(2, 3)) == 0.0);
    SLHModel dg = identity_model(1, 2);
    dg.L[0] = lower();
    dg.H = Operator::Identity(2, 2);
    CHECK(perturbation_residual(dg) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("shape mismatches throw") {
    const SLHModel a = identity_model(1, 2);
    const SLHModel b = identity_model(2, 2);
    CHECK_THROWS_AS(series(a, b), validation_error);
    Eigen::VectorXcd alpha(3);
    alpha.setZero();
    CHECK_THROWS_AS(displace(a, alpha), validation_error);
}
