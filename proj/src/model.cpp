#include "slh/model.hpp"

#include <cmath>

#include "slh/errors.hpp"

namespace slh {

namespace {

using Blocks = std::vector<std::vector<Operator>>;
using Column = std::vector<Operator>;

Blocks identity_blocks(Eigen::Index n, Eigen::Index d) {
    Blocks s(n, std::vector<Operator>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            s[i][j] = (i == j) ? Operator(Operator::Identity(d, d)) : Operator(Operator::Zero(d, d));
    return s;
}

Blocks block_product(const Blocks& a, const Blocks& b, Eigen::Index n, Eigen::Index d) {
    Blocks out(n, std::vector<Operator>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            Operator acc = Operator::Zero(d, d);
            for (Eigen::Index k = 0; k < n; ++k) acc += a[i][k] * b[k][j];
            out[i][j] = acc;
        }
    return out;
}

Blocks block_adjoint(const Blocks& a, Eigen::Index n) {
    Blocks out(n, std::vector<Operator>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out[i][j] = a[j][i].adjoint();
    return out;
}

Column block_apply(const Blocks& a, const Column& x, Eigen::Index n, Eigen::Index d) {
    Column out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Operator acc = Operator::Zero(d, d);
        for (Eigen::Index j = 0; j < n; ++j) acc += a[i][j] * x[j];
        out[i] = acc;
    }
    return out;
}

// (S alpha)_i = sum_j alpha_j S_ij for a scalar channel vector alpha.
Column block_apply_scalar(const Blocks& a, const Eigen::VectorXcd& alpha, Eigen::Index n,
                          Eigen::Index d) {
    Column out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Operator acc = Operator::Zero(d, d);
        for (Eigen::Index j = 0; j < n; ++j) acc += alpha(j) * a[i][j];
        out[i] = acc;
    }
    return out;
}

// x* y = sum_i x_i* y_i.
Operator column_pairing(const Column& x, const Column& y, Eigen::Index d) {
    Operator acc = Operator::Zero(d, d);
    for (size_t i = 0; i < x.size(); ++i) acc += x[i].adjoint() * y[i];
    return acc;
}

// alpha* x = sum_i conj(alpha_i) x_i.
Operator scalar_pairing(const Eigen::VectorXcd& alpha, const Column& x, Eigen::Index d) {
    Operator acc = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < alpha.size(); ++i) acc += std::conj(alpha(i)) * x[i];
    return acc;
}

Column column_sum(const Column& x, const Column& y) {
    Column out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

Blocks minus_identity(Blocks a, Eigen::Index n, Eigen::Index d) {
    for (Eigen::Index i = 0; i < n; ++i) a[i][i] -= Operator::Identity(d, d);
    return a;
}

void require_same_shape(const SLHModel& a, const SLHModel& b, const char* who) {
    if (a.n != b.n || a.d != b.d)
        throw validation_error(std::string(who) + ": channel or system dimension mismatch");
}

void require_alpha(const Eigen::VectorXcd& alpha, Eigen::Index n, const char* who) {
    if (alpha.size() != n)
        throw validation_error(std::string(who) + ": amplitude vector has wrong channel count");
}

// Tolerance for checking a constructed model, scaled so that large but
// legitimate coefficients (k L, k^2 H) keep their rounding headroom.
double result_tol(const SLHModel& g) {
    double scale = op_norm(g.H);
    for (const auto& l : g.L) scale = std::max(scale, op_norm(l));
    return 1e-9 * std::max(1.0, scale);
}

}  // namespace

Operator SLHModel::scattering() const {
    Operator out = Operator::Zero(n * d, n * d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out.block(i * d, j * d, d, d) = S[i][j];
    return out;
}

std::vector<Violation> validate(const SLHModel& g, double eps) {
    std::vector<Violation> out;
    if (g.n <= 0 || g.d <= 0) {
        out.push_back({"model", 0.0, "channel count and dimension must be positive"});
        return out;
    }
    bool shapes_ok = true;
    auto check_block = [&](const Operator& op, const std::string& name) {
        if (op.rows() != g.d || op.cols() != g.d) {
            out.push_back({name, 0.0, name + " is not d x d"});
            shapes_ok = false;
        }
    };
    if (static_cast<Eigen::Index>(g.S.size()) != g.n) {
        out.push_back({"S", 0.0, "S must have n block rows"});
        shapes_ok = false;
    } else {
        for (Eigen::Index i = 0; i < g.n; ++i) {
            if (static_cast<Eigen::Index>(g.S[i].size()) != g.n) {
                out.push_back({"S[" + std::to_string(i) + "]", 0.0, "block row has wrong width"});
                shapes_ok = false;
                continue;
            }
            for (Eigen::Index j = 0; j < g.n; ++j)
                check_block(g.S[i][j], "S[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        }
    }
    if (static_cast<Eigen::Index>(g.L.size()) != g.n) {
        out.push_back({"L", 0.0, "L must have n components"});
        shapes_ok = false;
    } else {
        for (Eigen::Index i = 0; i < g.n; ++i) check_block(g.L[i], "L[" + std::to_string(i) + "]");
    }
    check_block(g.H, "H");
    if (!shapes_ok) return out;

    const Operator s = g.scattering();
    const Operator id = Operator::Identity(g.n * g.d, g.n * g.d);
    const double right = op_norm(s * s.adjoint() - id);
    const double left = op_norm(s.adjoint() * s - id);
    const double uni = std::max(right, left);
    if (uni > eps)
        out.push_back({"S", uni, "assembled scattering matrix is not unitary"});
    const double herm = op_norm(g.H - g.H.adjoint());
    if (herm > eps)
        out.push_back({"H", herm, "Hamiltonian is not Hermitian"});
    return out;
}

void require_valid(const SLHModel& g, double eps) {
    const auto violations = validate(g, eps);
    if (violations.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& v : violations)
        msg += " [" + v.component + "] " + v.message + " (residual " +
               std::to_string(v.residual) + ")";
    throw validation_error(msg);
}

Operator coupling_sum(const SLHModel& g) {
    Operator acc = Operator::Zero(g.d, g.d);
    for (const auto& l : g.L) acc += l.adjoint() * l;
    return acc;
}

DampingForm damping(const SLHModel& g) {
    DampingForm out;
    out.n = g.n;
    out.d = g.d;
    out.S = g.S;
    out.L = g.L;
    out.K = -0.5 * coupling_sum(g) - complex(0, 1) * g.H;
    return out;
}

SLHModel identity_model(Eigen::Index n, Eigen::Index d) {
    SLHModel g;
    g.n = n;
    g.d = d;
    g.S = identity_blocks(n, d);
    g.L.assign(n, Operator::Zero(d, d));
    g.H = Operator::Zero(d, d);
    return g;
}

SLHModel series(const SLHModel& g2, const SLHModel& g1) {
    require_same_shape(g2, g1, "series");
    SLHModel out;
    out.n = g2.n;
    out.d = g2.d;
    out.S = block_product(g2.S, g1.S, out.n, out.d);
    out.L = column_sum(g2.L, block_apply(g2.S, g1.L, out.n, out.d));
    const Operator cross = column_pairing(g2.L, block_apply(g2.S, g1.L, out.n, out.d), out.d);
    out.H = g1.H + g2.H + im_part(cross);
    require_valid(out, result_tol(out));
    return out;
}

DampingForm series_damping(const DampingForm& g2, const DampingForm& g1) {
    if (g2.n != g1.n || g2.d != g1.d)
        throw validation_error("series_damping: dimension mismatch");
    DampingForm out;
    out.n = g2.n;
    out.d = g2.d;
    out.S = block_product(g2.S, g1.S, out.n, out.d);
    const Column s2l1 = block_apply(g2.S, g1.L, out.n, out.d);
    out.L = column_sum(g2.L, s2l1);
    out.K = g1.K + g2.K - column_pairing(g2.L, s2l1, out.d);
    return out;
}

SLHModel inverse(const SLHModel& g) {
    SLHModel out;
    out.n = g.n;
    out.d = g.d;
    out.S = block_adjoint(g.S, g.n);
    const Column sl = block_apply(out.S, g.L, g.n, g.d);
    out.L.resize(g.n);
    for (Eigen::Index i = 0; i < g.n; ++i) out.L[i] = -sl[i];
    out.H = -g.H;
    return out;
}

SLHModel right_perturb(const SLHModel& g, const SLHModel& dg) {
    return series(g, dg);
}

SLHModel perturbation_between(const SLHModel& g, const SLHModel& g_tilde) {
    require_same_shape(g, g_tilde, "perturbation_between");
    return series(inverse(g), g_tilde);
}

DampingForm displace(const SLHModel& g, const Eigen::VectorXcd& alpha) {
    require_alpha(alpha, g.n, "displace");
    DampingForm out = damping(g);
    const Column s_alpha = block_apply_scalar(g.S, alpha, g.n, g.d);
    out.L = column_sum(g.L, s_alpha);
    out.K -= 0.5 * alpha.squaredNorm() * Operator::Identity(g.d, g.d);
    out.K -= column_pairing(g.L, s_alpha, g.d);
    return out;
}

Operator lindblad(const SLHModel& g, const Operator& x) {
    if (x.rows() != g.d || x.cols() != g.d)
        throw validation_error("lindblad: observable dimension mismatch");
    Operator acc = Operator::Zero(g.d, g.d);
    for (const auto& l : g.L)
        acc += 0.5 * l.adjoint() * commutator(x, l) + 0.5 * commutator(l.adjoint(), x) * l;
    acc -= complex(0, 1) * commutator(x, g.H);
    return acc;
}

SLHModel gauge_transform(const GaugeElement& g, const SLHModel& model) {
    const Eigen::Index n = model.n;
    const Eigen::Index d = model.d;
    if (g.R.rows() != n || g.R.cols() != n || g.beta.size() != n)
        throw validation_error("gauge_transform: element has wrong channel count");
    SLHModel gm;
    gm.n = n;
    gm.d = d;
    gm.S.assign(n, std::vector<Operator>(n));
    gm.L.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            gm.S[i][j] = g.R(i, j) * Operator::Identity(d, d);
        gm.L[i] = g.beta(i) * Operator::Identity(d, d);
    }
    gm.H = g.e * Operator::Identity(d, d);
    return series(gm, model);
}

Operator virtual_work(const SLHModel& g, const SLHModel& dg) {
    require_same_shape(g, dg, "virtual_work");
    const Operator ds = dg.scattering();
    if (op_norm(ds - Operator::Identity(dg.n * dg.d, dg.n * dg.d)) > structural_tol)
        throw validation_error("virtual_work: perturbation must have trivial scattering");
    const SLHModel perturbed = series(dg, g);
    return perturbed.H - g.H;
}

Operator left_residual(const SLHModel& g, const SLHModel& dg, const Eigen::VectorXcd& alpha) {
    require_same_shape(g, dg, "left_residual");
    require_alpha(alpha, g.n, "left_residual");
    const Eigen::Index n = g.n;
    const Eigen::Index d = g.d;

    const Blocks ds_m1 = minus_identity(dg.S, n, d);  // dS - 1
    const Operator dk =
        -complex(0, 1) * dg.H - 0.5 * column_pairing(dg.L, dg.L, d);

    Operator r = dk;
    r += column_pairing(g.L, block_apply(ds_m1, g.L, n, d), d);        // L*(dS-1)L
    r += column_pairing(dg.L, block_apply(dg.S, g.L, n, d), d);        // (dL)* dS L
    r -= column_pairing(g.L, dg.L, d);                                 // - L* dL

    // alpha* S* [(dS - 1) L + dL]
    const Blocks s_adj = block_adjoint(g.S, n);
    const Column inner = column_sum(block_apply(ds_m1, g.L, n, d), dg.L);
    r += scalar_pairing(alpha, block_apply(s_adj, inner, n, d), d);

    // - [L*(dS - 1) + (dL)* dS] S alpha; the bracket is the adjoint column
    // row_j = sum_i (dS-1)*_ji L_i ... assembled via block adjoints.
    const Column row_part1 = block_apply(block_adjoint(ds_m1, n), g.L, n, d);   // ((dS-1)* L)_j
    const Column row_part2 = block_apply(block_adjoint(dg.S, n), dg.L, n, d);   // (dS* dL)_j
    const Column s_alpha = block_apply_scalar(g.S, alpha, n, d);
    Operator bracket = Operator::Zero(d, d);
    for (Eigen::Index jj = 0; jj < n; ++jj)
        bracket += (row_part1[jj] + row_part2[jj]).adjoint() * s_alpha[jj];
    r -= bracket;

    // alpha* S* (dS - 1) S alpha
    r += scalar_pairing(alpha, block_apply(s_adj, block_apply(ds_m1, s_alpha, n, d), n, d), d);
    return r;
}

double perturbation_residual(const SLHModel& dg) {
    const Operator ds = dg.scattering();
    const Operator id = Operator::Identity(dg.n * dg.d, dg.n * dg.d);
    Operator stacked(dg.n * dg.d, dg.d);
    for (Eigen::Index i = 0; i < dg.n; ++i) stacked.block(i * dg.d, 0, dg.d, dg.d) = dg.L[i];
    return op_norm(ds - id) + op_norm(stacked) + op_norm(dg.H);
}

}  // namespace slh
