#pragma once

#include <optional>

#include "slh/semigroup.hpp"

namespace slh {

/// Discretization scheme for one noise slice.
///
/// euler_ito: V = 1 + (S - 1) dLam + sqrt(dt) L dA* - sqrt(dt) L* S dA + K dt
/// with the slice ladder operators standing in for the increments. First
/// order; gains O(dt^2) norm per step.
///
/// exponential_midpoint: V = exp(M) exp(dGamma(log S)) with M skew-adjoint,
/// M = sqrt(dt)(L a* - L* a) - i H dt + corrections of order dt^{3/2} and
/// dt^2 chosen so the vacuum transfer map matches exp(dt lindblad) through
/// O(dt^2) when S = 1. Exactly unitary, so norm moves only by truncation.
enum class SliceScheme { euler_ito, exponential_midpoint };

struct SliceConfig {
    double dt = 0.0;                // 0 = derive from the step-size rule
    int d_noise = 3;                // levels kept per channel per slice
    SliceScheme scheme = SliceScheme::exponential_midpoint;
    double max_norm_deficit = 1e-2; // abort threshold for truncation loss
};

/// (||L||^2 + ||K|| + |alpha|^2) dt <= 0.05, rounded so every segment
/// duration is an integer number of steps.
double suggested_dt(const SLHModel& g, const ExponentialState& psi, double t);

/// Result of threading an exponential state through the slice lattice.
struct SliceResult {
    Operator rho;          // reduced system state, slices traced after interaction
    double norm_squared;   // tr rho
    double norm_deficit;   // ||psi||^2 - tr rho, truncation loss
    long steps;
};

/// Repeated-interaction integration of one model. Slices are consumed in
/// time order and traced out immediately after interacting.
SliceResult simulate(const SLHModel& g, const ExponentialState& psi, double t,
                     const SliceConfig& cfg);

/// <U_ga(t) psi, U_gb(t) psi> on the shared slice lattice, contracted
/// incrementally (memory stays at one slice).
complex oracle_overlap(const SLHModel& ga, const SLHModel& gb, const ExponentialState& psi,
                       double t, const SliceConfig& cfg);

struct OracleDistance {
    double value = 0.0;      // step-halving extrapolation over dt, dt/2, dt/4
    double error_bar = 0.0;
    double observed_order = 0.0;
    double norm_deficit = 0.0;  // worst single-model truncation loss at finest dt
};

/// ||(U_ga - U_gb) psi|| via three runs at dt, dt/2, dt/4 and Richardson
/// extrapolation at the observed order. The error bar covers the
/// extrapolation increment and the truncation deficit.
OracleDistance oracle_distance(const SLHModel& ga, const SLHModel& gb,
                               const ExponentialState& psi, double t, const SliceConfig& cfg);

}  // namespace slh
