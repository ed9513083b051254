#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace slh {

using complex = std::complex<double>;

/// Dense operator on a finite-dimensional Hilbert space. Square by
/// convention; functions that consume operators check squareness where
/// it matters.
using Operator = Eigen::MatrixXcd;

/// Default tolerance for structural predicates (hermiticity, unitarity).
inline constexpr double structural_tol = 1e-9;

/// Spectral norm (largest singular value).
double op_norm(const Operator& a);

bool is_hermitian(const Operator& a, double tol = structural_tol);
bool is_unitary(const Operator& a, double tol = structural_tol);
bool is_skew_adjoint(const Operator& a, double tol = structural_tol);

/// [a, b] = ab - ba.
Operator commutator(const Operator& a, const Operator& b);

/// Operator imaginary part, (a - a*)/2i. Hermitian for any a.
Operator im_part(const Operator& a);

/// Operator real part, (a + a*)/2.
Operator re_part(const Operator& a);

/// Apply a real scalar function to a Hermitian operator through its
/// eigendecomposition. Throws slh::validation_error if the hermiticity
/// residual exceeds tol.
Operator func_of_hermitian(const Operator& a, const std::function<double(double)>& f,
                           double tol = structural_tol);

/// exp(m) by scaling-and-squaring with a truncated Taylor series; tol is
/// the relative truncation target for the scaled series.
Operator matrix_exp(const Operator& m, double tol = 1e-13);

/// Principal logarithm of a unitary matrix via Schur form; result is
/// skew-adjoint. Throws slh::validation_error if u is not unitary or the
/// reconstruction exp(log u) drifts from u.
Operator unitary_log(const Operator& u, double tol = 1e-8);

/// Linear map on operators stored as a dim^2 x dim^2 matrix acting on
/// column-stacked operators: vec(a X b) = (b^T (x) a) vec(X).
struct Superoperator {
    Eigen::Index dim = 0;
    Eigen::MatrixXcd mat;

    Operator apply(const Operator& x) const;
};

/// Superoperator for X -> a X b.
Superoperator sandwich(const Operator& a, const Operator& b);

Superoperator left_mult(const Operator& a);
Superoperator right_mult(const Operator& b);

Superoperator superop_zero(Eigen::Index dim);
Superoperator superop_identity(Eigen::Index dim);

Superoperator operator+(const Superoperator& a, const Superoperator& b);
Superoperator operator*(complex c, const Superoperator& a);

/// exp(s g) as a superoperator; s >= 0.
Superoperator superop_exp(const Superoperator& g, double s, double tol = 1e-13);

/// Column-stacking helpers.
Eigen::VectorXcd vec(const Operator& x);
Operator unvec(const Eigen::VectorXcd& v, Eigen::Index dim);

}  // namespace slh
