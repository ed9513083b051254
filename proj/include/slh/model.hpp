#pragma once

#include <string>
#include <vector>

#include "slh/operator_algebra.hpp"

namespace slh {

/// Markov model G ~ (S, L, H) with n input channels and system dimension d.
/// S is an n x n block matrix of d x d operators whose assembled (n d) x (n d)
/// matrix is unitary, L is an n-vector of coupling operators, H is Hermitian.
struct SLHModel {
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    std::vector<std::vector<Operator>> S;  // S[i][j], row i, column j
    std::vector<Operator> L;               // L[i]
    Operator H;

    /// Assembled scattering matrix, (n d) x (n d).
    Operator scattering() const;
};

/// Same data with the Hamiltonian folded into the damping operator
/// K = -1/2 sum_i L_i* L_i - i H, so K + K* = -sum_i L_i* L_i.
struct DampingForm {
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    std::vector<std::vector<Operator>> S;
    std::vector<Operator> L;
    Operator K;
};

/// Element (R, beta, e) of the Euclidean group on the channel space:
/// R an n x n unitary scalar matrix, beta a displacement vector, e a phase
/// generator. Acts on models by left multiplication.
struct GaugeElement {
    Eigen::MatrixXcd R;
    Eigen::VectorXcd beta;
    double e = 0.0;
};

struct Violation {
    std::string component;  // "S", "S[0][1]", "L[2]", "H", ...
    double residual = 0.0;
    std::string message;
};

/// Structural checks: block dimensions, unitarity of the assembled S,
/// hermiticity of H. Returns one entry per failing component.
std::vector<Violation> validate(const SLHModel& g, double eps = structural_tol);

/// Throws slh::validation_error listing all violations.
void require_valid(const SLHModel& g, double eps = structural_tol);

Operator coupling_sum(const SLHModel& g);  // sum_i L_i* L_i

DampingForm damping(const SLHModel& g);

SLHModel identity_model(Eigen::Index n, Eigen::Index d);

/// Group law: series(g2, g1) feeds the output of g1 into g2 and returns
/// (S2 S1, L2 + S2 L1, H1 + H2 + Im{L2* S2 L1}).
SLHModel series(const SLHModel& g2, const SLHModel& g1);

/// Same law on damping forms: K = K1 + K2 - L2* S2 L1.
DampingForm series_damping(const DampingForm& g2, const DampingForm& g1);

/// Group inverse (S*, -S* L, -H); series(inverse(g), g) = identity.
SLHModel inverse(const SLHModel& g);

/// g followed by the perturbation: series(g, dg).
SLHModel right_perturb(const SLHModel& g, const SLHModel& dg);

/// The unique dg with series(g, dg) = g_tilde.
SLHModel perturbation_between(const SLHModel& g, const SLHModel& g_tilde);

/// Coherent displacement by the channel amplitude vector alpha:
/// [S, L + S alpha, K - 1/2 |alpha|^2 - L* S alpha].
DampingForm displace(const SLHModel& g, const Eigen::VectorXcd& alpha);

/// Heisenberg generator sum_i L_i* X L_i + K* X + X K
/// (= 1/2 sum_i L_i*[X, L_i] + 1/2 sum_i [L_i*, X] L_i - i[X, H]).
Operator lindblad(const SLHModel& g, const Operator& x);

/// Left action of (R, beta, e): L -> beta + R L, H -> H + e + Im{beta* R L}.
/// Leaves lindblad invariant.
SLHModel gauge_transform(const GaugeElement& g, const SLHModel& model);

/// Hamiltonian shift under a left perturbation with trivial scattering:
/// dH_total = g'.H - g.H = dg.H + Im{(dg.L)* g.L} where g' = series(dg, g).
/// Requires dg.S = identity.
Operator virtual_work(const SLHModel& g, const SLHModel& dg);

/// Obstruction term for matching a left perturbation by a coherent input
/// alpha. With dS = dg.S (the perturbation scattering) and S = g.S:
///   dK + L*(dS - 1)L + (dL)* dS L - L* dL
///   + alpha* S* [(dS - 1)L + dL]
///   - [L*(dS - 1) + (dL)* dS] S alpha
///   + alpha* S* (dS - 1) S alpha
/// where dK = -i dH - 1/2 (dL)* dL. Vanishing for every alpha is required
/// for the left-perturbed sequence to stay equivalent.
Operator left_residual(const SLHModel& g, const SLHModel& dg, const Eigen::VectorXcd& alpha);

/// Closeness of a perturbation to the identity model:
/// ||dS - 1|| + ||dL|| + ||dH|| (stacked column norm for dL).
double perturbation_residual(const SLHModel& dg);

}  // namespace slh
