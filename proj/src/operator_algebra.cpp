#include "slh/operator_algebra.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "slh/errors.hpp"

namespace slh {

namespace {

void require_square(const Operator& a, const char* who) {
    if (a.rows() != a.cols())
        throw validation_error(std::string(who) + ": operator is not square");
}

}  // namespace

double op_norm(const Operator& a) {
    if (a.size() == 0) return 0.0;
    return a.jacobiSvd().singularValues()(0);
}

bool is_hermitian(const Operator& a, double tol) {
    return a.rows() == a.cols() && op_norm(a - a.adjoint()) <= tol;
}

bool is_unitary(const Operator& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const Operator id = Operator::Identity(a.rows(), a.cols());
    return op_norm(a * a.adjoint() - id) <= tol && op_norm(a.adjoint() * a - id) <= tol;
}

bool is_skew_adjoint(const Operator& a, double tol) {
    return a.rows() == a.cols() && op_norm(a + a.adjoint()) <= tol;
}

Operator commutator(const Operator& a, const Operator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw validation_error("commutator: dimension mismatch");
    return a * b - b * a;
}

Operator im_part(const Operator& a) {
    return (a - a.adjoint()) / complex(0.0, 2.0);
}

Operator re_part(const Operator& a) {
    return (a + a.adjoint()) / 2.0;
}

Operator func_of_hermitian(const Operator& a, const std::function<double(double)>& f,
                           double tol) {
    require_square(a, "func_of_hermitian");
    const double herm_residual = op_norm(a - a.adjoint());
    if (herm_residual > tol)
        throw validation_error("func_of_hermitian: hermiticity residual " +
                               std::to_string(herm_residual) + " exceeds tolerance");
    Eigen::SelfAdjointEigenSolver<Operator> es(re_part(a));
    if (es.info() != Eigen::Success)
        throw numerical_error("func_of_hermitian: eigendecomposition failed");
    Eigen::VectorXd vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = f(vals(i));
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

Operator matrix_exp(const Operator& m, double tol) {
    require_square(m, "matrix_exp");
    const Eigen::Index dim = m.rows();
    const Operator id = Operator::Identity(dim, dim);
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    if (norm == 0.0 || dim == 0) return id;

    int squarings = 0;
    if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
    const Operator a = m / std::pow(2.0, squarings);

    // Taylor series of the scaled matrix; ||a|| <= 0.25 so terms decay fast.
    Operator sum = id;
    Operator term = id;
    for (int k = 1; k <= 40; ++k) {
        term = (term * a) / static_cast<double>(k);
        sum += term;
        const double tnorm = term.cwiseAbs().rowwise().sum().maxCoeff();
        if (tnorm <= tol * sum.cwiseAbs().rowwise().sum().maxCoeff()) break;
        if (k == 40)
            throw numerical_error("matrix_exp: Taylor series failed to converge");
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

Operator unitary_log(const Operator& u, double tol) {
    require_square(u, "unitary_log");
    if (!is_unitary(u, tol))
        throw validation_error("unitary_log: input is not unitary");
    Eigen::ComplexSchur<Operator> schur(u);
    if (schur.info() != Eigen::Success)
        throw numerical_error("unitary_log: Schur decomposition failed");
    // A unitary matrix is normal, so the Schur form is diagonal up to
    // rounding; take principal logs of the diagonal.
    const Eigen::Index dim = u.rows();
    Eigen::VectorXcd logs(dim);
    for (Eigen::Index i = 0; i < dim; ++i) logs(i) = std::log(schur.matrixT()(i, i));
    Operator out = schur.matrixU() * logs.asDiagonal() * schur.matrixU().adjoint();
    out = (out - out.adjoint().eval()) / 2.0;  // enforce skew-adjointness
    if (op_norm(matrix_exp(out) - u) > std::max(tol, 1e-10 * dim))
        throw numerical_error("unitary_log: exp(log u) does not reproduce u");
    return out;
}

Operator Superoperator::apply(const Operator& x) const {
    if (x.rows() != dim || x.cols() != dim)
        throw validation_error("Superoperator::apply: dimension mismatch");
    return unvec(mat * vec(x), dim);
}

Superoperator sandwich(const Operator& a, const Operator& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw validation_error("sandwich: dimension mismatch");
    Superoperator s;
    s.dim = a.rows();
    s.mat = Eigen::kroneckerProduct(b.transpose(), a);
    return s;
}

Superoperator left_mult(const Operator& a) {
    return sandwich(a, Operator::Identity(a.rows(), a.cols()));
}

Superoperator right_mult(const Operator& b) {
    return sandwich(Operator::Identity(b.rows(), b.cols()), b);
}

Superoperator superop_zero(Eigen::Index dim) {
    Superoperator s;
    s.dim = dim;
    s.mat = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
    return s;
}

Superoperator superop_identity(Eigen::Index dim) {
    Superoperator s;
    s.dim = dim;
    s.mat = Eigen::MatrixXcd::Identity(dim * dim, dim * dim);
    return s;
}

Superoperator operator+(const Superoperator& a, const Superoperator& b) {
    if (a.dim != b.dim)
        throw validation_error("Superoperator+: dimension mismatch");
    Superoperator s;
    s.dim = a.dim;
    s.mat = a.mat + b.mat;
    return s;
}

Superoperator operator*(complex c, const Superoperator& a) {
    Superoperator s;
    s.dim = a.dim;
    s.mat = c * a.mat;
    return s;
}

Superoperator superop_exp(const Superoperator& g, double s, double tol) {
    if (s < 0.0)
        throw validation_error("superop_exp: negative time");
    Superoperator out;
    out.dim = g.dim;
    out.mat = matrix_exp(s * g.mat, tol);
    return out;
}

Eigen::VectorXcd vec(const Operator& x) {
    // Eigen is column-major, so the raw buffer is already column-stacked.
    return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

Operator unvec(const Eigen::VectorXcd& v, Eigen::Index dim) {
    if (v.size() != dim * dim)
        throw validation_error("unvec: size mismatch");
    return Eigen::Map<const Operator>(v.data(), dim, dim);
}

}  // namespace slh
