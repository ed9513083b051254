#pragma once

#include <vector>

#include "slh/model.hpp"

namespace slh {

/// Piecewise-constant coherent drive: system vector v tensored with the
/// exponential vector of f, where f takes the value alpha_j on
/// [t_{j-1}, t_j) and segments partition [0, t_end]. Squared norm is
/// ||v||^2 exp(sum_j |alpha_j|^2 (t_j - t_{j-1})).
struct ExponentialState {
    struct Segment {
        double t_end = 0.0;
        Eigen::VectorXcd alpha;
    };

    Eigen::VectorXcd v;
    std::vector<Segment> segments;

    double squared_norm() const;
    double norm() const;
};

/// Single-segment drive over [0, t] with constant amplitude alpha.
ExponentialState constant_drive(const Eigen::VectorXcd& v, const Eigen::VectorXcd& alpha,
                                double t);

/// Checks segment monotonicity, channel-count consistency, and that the
/// partition ends at t (within 1e-9 relative). Throws slh::validation_error.
void require_partition(const ExponentialState& psi, double t, Eigen::Index n);

/// Generator of the two-model vacuum transfer semigroup
/// X -> Ka* X + X Kb + sum_i La_i* X Lb_i, where a is the adjoined (bra)
/// model and b the un-adjoined (ket) model in <Ua psi, X Ub psi>.
struct TransferGenerator {
    Superoperator superop;
    DampingForm left;   // adjoined
    DampingForm right;  // un-adjoined
};

TransferGenerator transfer_generator(const DampingForm& ga, const DampingForm& gb);

/// Closed form for the transfer generator of a perturbed pair applied to
/// the identity, written purely in perturbation data:
///   dK* - alpha* dS* dL + (dL)* alpha + alpha* (dS* - 1) alpha
/// with dK = -i dH - 1/2 (dL)* dL and dS = dg.S. Equals
/// transfer_generator(displace(series(g, dg), alpha), displace(g, alpha))
/// applied to the identity, for every g the perturbation is attached to.
Operator delta_generator_on_identity(const SLHModel& g, const SLHModel& dg,
                                     const Eigen::VectorXcd& alpha);

/// exp(s g) applied to x; s >= 0.
Operator evolve(const TransferGenerator& g, const Operator& x, double s);

/// <U_ga(t) psi, U_gb(t) psi> computed segment by segment: the earliest
/// segment's semigroup acts outermost, each run for the segment duration,
/// times exp(sum_j |alpha_j|^2 (t_j - t_{j-1})).
complex overlap(const SLHModel& ga, const SLHModel& gb, const ExponentialState& psi, double t);

/// ||(U_ga(t) - U_gb(t)) psi||. The defect of the two transfer maps is
/// propagated directly (block-triangular augmented generator), so the
/// result keeps full relative accuracy in the model gap even when the
/// models nearly coincide. A radicand within -1e-9 max(1, ||psi||^2) of
/// zero is clamped to zero; anything more negative throws
/// slh::numerical_error.
double distance(const SLHModel& ga, const SLHModel& gb, const ExponentialState& psi, double t);

}  // namespace slh
