#include "slh/fock_oracle.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "slh/errors.hpp"

namespace slh {

namespace {

struct SliceOps {
    Eigen::Index n = 0;
    Eigen::Index levels = 0;
    Eigen::Index dim = 0;            // levels^n
    std::vector<Operator> a;         // annihilation, one per channel
};

SliceOps make_slice_ops(Eigen::Index n, Eigen::Index levels) {
    SliceOps ops;
    ops.n = n;
    ops.levels = levels;
    ops.dim = 1;
    for (Eigen::Index i = 0; i < n; ++i) ops.dim *= levels;

    Operator a1 = Operator::Zero(levels, levels);
    for (Eigen::Index k = 1; k < levels; ++k) a1(k - 1, k) = std::sqrt(double(k));

    ops.a.resize(n);
    for (Eigen::Index ch = 0; ch < n; ++ch) {
        Operator acc = Operator::Identity(1, 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Operator& factor = (i == ch) ? a1 : Operator::Identity(levels, levels);
            acc = Eigen::kroneckerProduct(acc, factor).eval();
        }
        ops.a[ch] = acc;
    }
    return ops;
}

// Truncated unnormalized exponential vector, one coherent factor per channel.
Eigen::VectorXcd slice_exponential(const SliceOps& ops, const Eigen::VectorXcd& z) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Ones(1);
    for (Eigen::Index ch = 0; ch < ops.n; ++ch) {
        Eigen::VectorXcd f(ops.levels);
        complex pow = 1.0;
        double fact = 1.0;
        for (Eigen::Index k = 0; k < ops.levels; ++k) {
            if (k > 0) {
                pow *= z(ch);
                fact *= double(k);
            }
            f(k) = pow / std::sqrt(fact);
        }
        out = Eigen::kroneckerProduct(out, f).eval();
    }
    return out;
}

Operator sys_slice(const Operator& sys, const Operator& slice) {
    return Eigen::kroneckerProduct(sys, slice);
}

// Step propagator on system (x) slice for one segment of constant
// coefficients. dt is the exact step for this segment.
Operator step_propagator(const SLHModel& g, const SliceOps& ops, double dt, SliceScheme scheme) {
    const Eigen::Index d = g.d;
    const Eigen::Index n = g.n;
    const Eigen::Index joint = d * ops.dim;
    const double rt = std::sqrt(dt);
    const Operator id_sys = Operator::Identity(d, d);
    const Operator id_slice = Operator::Identity(ops.dim, ops.dim);
    const Operator K = damping(g).K;

    if (scheme == SliceScheme::euler_ito) {
        Operator v = Operator::Identity(joint, joint);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                Operator blk = g.S[i][j];
                if (i == j) blk -= id_sys;
                v += sys_slice(blk, ops.a[i].adjoint() * ops.a[j]);
            }
        for (Eigen::Index i = 0; i < n; ++i)
            v += rt * sys_slice(g.L[i], ops.a[i].adjoint());
        for (Eigen::Index j = 0; j < n; ++j) {
            Operator coeff = Operator::Zero(d, d);
            for (Eigen::Index i = 0; i < n; ++i) coeff += g.L[i].adjoint() * g.S[i][j];
            v -= rt * sys_slice(coeff, ops.a[j]);
        }
        v += dt * sys_slice(K, id_slice);
        return v;
    }

    // exponential_midpoint: skew-adjoint exponent with dt^{3/2} coupling and
    // dt^2 drift corrections so the vacuum transfer matches exp(dt lindblad)
    // through O(dt^2) for trivial scattering.
    const Operator D = -complex(0, 1) * g.H;
    const Operator sigma = coupling_sum(g);

    std::vector<Operator> c1(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Operator mixed = Operator::Zero(d, d);
        for (Eigen::Index j = 0; j < n; ++j) mixed += g.L[j].adjoint() * g.L[i] * g.L[j];
        c1[i] = -(sigma * g.L[i] + g.L[i] * sigma) / 12.0 + mixed / 6.0;
    }

    Operator n02 = 0.5 * D * D;
    {
        Operator mid = Operator::Zero(d, d);
        for (Eigen::Index i = 0; i < n; ++i) mid += g.L[i].adjoint() * D * g.L[i];
        n02 -= (D * sigma + mid + sigma * D) / 6.0;
        Operator quart = Operator::Zero(d, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            Operator inner = g.L[i] * sigma;
            for (Eigen::Index j = 0; j < n; ++j)
                inner += g.L[j].adjoint() * (g.L[j] * g.L[i] + g.L[i] * g.L[j]);
            quart += g.L[i].adjoint() * inner;
        }
        n02 += quart / 24.0;
    }
    Operator cross = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i)
        cross += g.L[i].adjoint() * c1[i] + c1[i].adjoint() * g.L[i];
    const Operator d2 = 0.5 * K * K - n02 + 0.5 * cross;
    const double d2_herm = op_norm(d2 + d2.adjoint());
    if (d2_herm > 1e-9 * std::max(1.0, op_norm(d2)))
        throw numerical_error("step_propagator: drift correction lost skew-adjointness");

    Operator m = Operator::Zero(joint, joint);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Operator coup = rt * g.L[i] + rt * dt * c1[i];
        m += sys_slice(coup, ops.a[i].adjoint());
        m -= sys_slice(coup.adjoint(), ops.a[i]);
    }
    m += sys_slice(dt * D + dt * dt * d2, id_slice);
    Operator v = matrix_exp(m);

    const Operator s = g.scattering();
    if (op_norm(s - Operator::Identity(n * d, n * d)) > 1e-14) {
        const Operator theta = unitary_log(s);
        Operator gamma = Operator::Zero(joint, joint);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                gamma += sys_slice(theta.block(i * d, j * d, d, d),
                                   ops.a[i].adjoint() * ops.a[j]);
        v = v * matrix_exp(gamma);  // scattering acts first
    }
    return v;
}

Operator partial_trace_slice(const Operator& w, Eigen::Index d, Eigen::Index dim_slice) {
    Operator out = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            complex acc = 0.0;
            for (Eigen::Index k = 0; k < dim_slice; ++k)
                acc += w(i * dim_slice + k, j * dim_slice + k);
            out(i, j) = acc;
        }
    return out;
}

struct SegmentPlan {
    double duration = 0.0;
    long steps = 0;
    Eigen::VectorXcd alpha;
};

std::vector<SegmentPlan> plan_segments(const ExponentialState& psi, double t, double dt) {
    std::vector<SegmentPlan> plan;
    if (psi.segments.empty()) return plan;  // t = 0
    if (dt <= 0.0) throw validation_error("slice lattice: dt must be positive");
    double t_prev = 0.0;
    for (const auto& seg : psi.segments) {
        SegmentPlan p;
        p.duration = seg.t_end - t_prev;
        p.steps = std::max(1L, std::lround(p.duration / dt));
        const double actual = p.duration / double(p.steps);
        if (std::abs(actual - dt) > 0.25 * dt)
            throw validation_error("slice lattice: segment duration is not resolvable by dt");
        p.alpha = seg.alpha;
        plan.push_back(p);
        t_prev = seg.t_end;
    }
    (void)t;
    return plan;
}

// Cross state C_j = Tr_{slices<=j}[ U_b (v v* (x) sigma_1..j) U_a* ];
// tr C_N = <U_a psi, U_b psi> on the truncated lattice.
Operator contract_lattice(const SLHModel& ga, const SLHModel& gb, const ExponentialState& psi,
                          double t, const SliceConfig& cfg, long refine, long* steps_out) {
    const Eigen::Index d = ga.d;
    const SliceOps ops = make_slice_ops(ga.n, cfg.d_noise);
    const auto plan = plan_segments(psi, t, cfg.dt);
    const bool same = &ga == &gb;

    Operator c = psi.v * psi.v.adjoint();
    long total_steps = 0;
    for (const auto& seg : plan) {
        const long steps = seg.steps * refine;
        const double dt = seg.duration / double(steps);
        const Operator va = step_propagator(ga, ops, dt, cfg.scheme);
        const Operator vb = same ? va : step_propagator(gb, ops, dt, cfg.scheme);
        const Eigen::VectorXcd e = slice_exponential(ops, seg.alpha * std::sqrt(dt));
        const Operator sigma = e * e.adjoint();
        const Operator va_adj = va.adjoint();
        for (long s = 0; s < steps; ++s) {
            const Operator joint = Eigen::kroneckerProduct(c, sigma);
            c = partial_trace_slice(vb * joint * va_adj, d, ops.dim);
        }
        total_steps += steps;
    }
    if (steps_out) *steps_out = total_steps;
    return c;
}

}  // namespace

double suggested_dt(const SLHModel& g, const ExponentialState& psi, double t) {
    double amp2 = 0.0;
    for (const auto& seg : psi.segments) amp2 = std::max(amp2, seg.alpha.squaredNorm());
    const double rate = op_norm(coupling_sum(g)) + op_norm(damping(g).K) + amp2;
    const double target = 0.05 / std::max(rate, 0.05);
    const long steps = std::max(1L, std::lround(std::ceil(t / target)));
    return t / double(steps);
}

SliceResult simulate(const SLHModel& g, const ExponentialState& psi, double t,
                     const SliceConfig& cfg) {
    require_valid(g, structural_tol * std::max(1.0, op_norm(g.H)));
    require_partition(psi, t, g.n);
    SliceConfig run = cfg;
    if (run.dt <= 0.0) run.dt = suggested_dt(g, psi, t);

    SliceResult out;
    long steps = 0;
    out.rho = contract_lattice(g, g, psi, t, run, 1, &steps);
    out.steps = steps;
    out.norm_squared = out.rho.trace().real();
    out.norm_deficit = psi.squared_norm() - out.norm_squared;
    if (out.norm_deficit > cfg.max_norm_deficit * std::max(1.0, psi.squared_norm()))
        throw numerical_error("simulate: truncation norm deficit exceeds bound");
    return out;
}

complex oracle_overlap(const SLHModel& ga, const SLHModel& gb, const ExponentialState& psi,
                       double t, const SliceConfig& cfg) {
    if (ga.n != gb.n || ga.d != gb.d)
        throw validation_error("oracle_overlap: model dimension mismatch");
    require_valid(ga, structural_tol * std::max(1.0, op_norm(ga.H)));
    require_valid(gb, structural_tol * std::max(1.0, op_norm(gb.H)));
    require_partition(psi, t, ga.n);
    SliceConfig run = cfg;
    if (run.dt <= 0.0) run.dt = std::min(suggested_dt(ga, psi, t), suggested_dt(gb, psi, t));
    return contract_lattice(ga, gb, psi, t, run, 1, nullptr).trace();
}

OracleDistance oracle_distance(const SLHModel& ga, const SLHModel& gb,
                               const ExponentialState& psi, double t, const SliceConfig& cfg) {
    if (ga.n != gb.n || ga.d != gb.d)
        throw validation_error("oracle_distance: model dimension mismatch");
    require_partition(psi, t, ga.n);
    SliceConfig run = cfg;
    if (run.dt <= 0.0) run.dt = std::min(suggested_dt(ga, psi, t), suggested_dt(gb, psi, t));

    const double psi2 = psi.squared_norm();
    double dist[3];
    double deficit = 0.0;
    for (int level = 0; level < 3; ++level) {
        const long refine = 1L << level;
        const double naa = contract_lattice(ga, ga, psi, t, run, refine, nullptr).trace().real();
        const double nbb = contract_lattice(gb, gb, psi, t, run, refine, nullptr).trace().real();
        const complex ab = contract_lattice(ga, gb, psi, t, run, refine, nullptr).trace();
        const double radicand = naa + nbb - 2.0 * ab.real();
        if (radicand < -1e-9 * std::max(1.0, psi2))
            throw numerical_error("oracle_distance: negative radicand beyond rounding budget");
        dist[level] = std::sqrt(std::max(0.0, radicand));
        if (level == 2)
            deficit = std::max(psi2 - naa, psi2 - nbb);
    }
    if (deficit > run.max_norm_deficit * std::max(1.0, psi2))
        throw numerical_error("oracle_distance: truncation norm deficit exceeds bound");

    const double nominal = (run.scheme == SliceScheme::euler_ito) ? 1.0 : 2.0;
    const double delta1 = dist[1] - dist[0];
    const double delta2 = dist[2] - dist[1];
    OracleDistance out;
    out.norm_deficit = deficit;
    const double floor = 1e-10 * std::max(1.0, psi2);
    if (std::abs(delta2) < 1e-13 * std::max(1.0, dist[2]) || delta1 * delta2 <= 0.0) {
        // refinement already at rounding level, or non-monotone increments
        out.value = dist[2];
        out.observed_order = nominal;
        out.error_bar = std::max({std::abs(delta1), std::abs(delta2), floor});
        return out;
    }
    double order = std::log2(delta1 / delta2);
    order = std::min(std::max(order, 0.25), 4.0);
    const double ratio = std::pow(2.0, order);
    const double increment = delta2 / (ratio - 1.0);
    out.value = dist[2] + increment;
    out.observed_order = order;
    out.error_bar = 2.0 * std::abs(increment) + floor;
    return out;
}

}  // namespace slh
