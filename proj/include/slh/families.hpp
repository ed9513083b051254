#pragma once

#include <functional>
#include <optional>
#include <string>

#include "slh/fock_oracle.hpp"

namespace slh {

/// Squeezed-bath rewrite of a single-channel model (1, L, H). For bath
/// photon number n and squeezing phase theta in (-pi, pi):
///   nu = 2n + 1 + 2 sqrt(n(n+1)) cos(theta),  m = sqrt(n(n+1)) e^{i theta}
///   u = (n + 1 + m) / sqrt(nu),  v = (n + m) / sqrt(nu)
/// (Bogoliubov pair: |u|^2 = n+1, |v|^2 = n, u v = m). The vacuum model is
/// G_n = (1, L u* - L* v, H); the divergent part F_n = L_n - L/sqrt(nu) is
/// skew-adjoint and grows like sqrt(n) while G_n stays equivalent to
/// G_n < (1, -L/sqrt(nu), 0), whose Hamiltonian shift H_n has the finite
/// limit H_inf.
struct SqueezingSpec {
    Operator L;
    Operator H;
    double theta = 0.0;
    double n = 0.0;
};

struct SqueezingInstance {
    SLHModel model;        // G_n
    SLHModel equivalent;   // G_n < delta: (1, F_n, H + H_n)
    SLHModel perturbation; // (1, -L/sqrt(nu), 0)
    Operator F;            // skew-adjoint divergent part
    Operator H_n;          // Hamiltonian shift at this n
    Operator H_limit;      // n -> infinity limit of H_n
    double nu = 0.0;
    complex u;
    complex v;
};

SqueezingInstance squeezing_family(const SqueezingSpec& spec);

/// Two-channel dispersive rotator on a spin-j system, scattering strength
/// kappa, coherent input amplitude alpha, at scale k:
///   S_k = [[cos(kappa Fz / k), -sin(kappa Fz / k)],
///          [sin(kappa Fz / k),  cos(kappa Fz / k)]]
///   L_k = (-k sin(kappa Fz / k) alpha, k cos(kappa Fz / k) alpha),  H = 0.
/// The attached perturbation removes the scattering exactly:
/// series(G_k, dG_k) = (1, (-kappa Fz alpha, k alpha), 0) at every k.
struct FaradaySpec {
    double j = 0.5;
    double kappa = 1.0;
    complex alpha = 1.0;
    double k = 1.0;
};

struct FaradayInstance {
    SLHModel model;
    SLHModel equivalent;
    SLHModel perturbation;
    Operator Fz;
};

FaradayInstance faraday_family(const FaradaySpec& spec);

/// Local statistical family around theta0: G_v,k = (1, k L(theta0 + v/k),
/// k^2 H(theta0 + v/k)) against its quadratic expansion
///   G~_v,k = (1, k L + L' v, k^2 H + k H' v + 1/2 H'' v^2
///             + 1/2 v^2 Im[L''* L])   (all derivatives at theta0).
/// Derivatives are taken from the `derivatives` field when supplied, else
/// from Richardson-refined central differences with h = 1e-4 max(1, |theta0|).
struct LanSpec {
    std::function<Operator(double)> L;
    std::function<Operator(double)> H;
    double theta0 = 0.0;
    double v = 0.0;
    double k = 1.0;

    struct Derivatives {
        Operator L1, L2, H1, H2;
    };
    std::optional<Derivatives> derivatives;
};

struct LanInstance {
    SLHModel model;
    SLHModel equivalent;
    SLHModel perturbation;
    Operator phase_term;    // 1/2 v^2 Im[L''* L]
    double remainder_L = 0; // ||L(theta0 + v/k) - quadratic expansion||
    double remainder_H = 0;
};

LanInstance lan_family(const LanSpec& spec);

LanSpec::Derivatives central_derivatives(const std::function<Operator(double)>& f_L,
                                         const std::function<Operator(double)>& f_H,
                                         double theta0);

/// Rotate the couplings and Hamiltonian of g by exp(i F dphi) and report
/// the exact Hamiltonian shift of the left-attached perturbation next to
/// its first-order law -lindblad(g, F) dphi.
struct VirtualWork {
    Operator delta_H;      // virtual_work(g, dg) for the rotation perturbation
    Operator first_order;  // -lindblad(g, F) * dphi
    SLHModel perturbation;
};

VirtualWork virtual_rotation(const SLHModel& g, const Operator& F, double dphi);

struct ConvergenceRow {
    double k = 0.0;
    double distance = 0.0;
    double delta_residual = 0.0;
    std::optional<double> oracle_value;
    std::optional<double> oracle_error;
};

struct ConvergenceReport {
    std::string family;
    double t = 0.0;
    ExponentialState psi;
    std::vector<ConvergenceRow> rows;
};

/// One (model, equivalent, perturbation) triple per scale parameter.
struct FamilyInstance {
    SLHModel model;
    SLHModel equivalent;
    SLHModel perturbation;
};

/// Runs distance(model_k, equivalent_k, psi, t) for every k, recording the
/// perturbation residual per row. When an oracle config is given the
/// smallest k is cross-checked against the slice integrator and its value
/// and error bar recorded. Rows are computed in parallel over k, capped by
/// SLH_NUM_THREADS.
ConvergenceReport convergence_experiment(const std::function<FamilyInstance(double)>& family,
                                         const std::vector<double>& ks,
                                         const ExponentialState& psi, double t,
                                         const std::optional<SliceConfig>& oracle,
                                         const std::string& family_name);

}  // namespace slh
