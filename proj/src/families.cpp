#include "slh/families.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "slh/errors.hpp"

namespace slh {

namespace {

constexpr double theta_margin = 1e-3;  // keep away from the branch point at |theta| = pi

void require_system_pair(const Operator& L, const Operator& H, const char* who) {
    if (L.rows() != L.cols() || H.rows() != H.cols() || L.rows() != H.rows())
        throw validation_error(std::string(who) + ": L and H must be square and same size");
    if (op_norm(H - H.adjoint()) > structural_tol * std::max(1.0, op_norm(H)))
        throw validation_error(std::string(who) + ": H must be Hermitian");
}

int env_thread_cap() {
    const char* raw = std::getenv("SLH_NUM_THREADS");
    if (!raw) return 0;
    const int v = std::atoi(raw);
    return v > 0 ? v : 1;
}

}  // namespace

SqueezingInstance squeezing_family(const SqueezingSpec& spec) {
    require_system_pair(spec.L, spec.H, "squeezing_family");
    if (spec.n < 0.0)
        throw validation_error("squeezing_family: photon number must be nonnegative");
    if (std::abs(spec.theta) >= M_PI - theta_margin)
        throw validation_error("squeezing_family: squeezing phase too close to pi");

    const double n = spec.n;
    const double root = std::sqrt(n * (n + 1.0));
    const double nu = 2.0 * n + 1.0 + 2.0 * root * std::cos(spec.theta);
    if (nu <= 1e-12)
        throw validation_error("squeezing_family: bath covariance degenerate");
    const complex m = root * std::exp(complex(0, spec.theta));
    const complex u = (n + 1.0 + m) / std::sqrt(nu);
    const complex v = (n + m) / std::sqrt(nu);

    const Operator& L = spec.L;
    const Operator Ld = L.adjoint();
    const complex c = n + std::conj(m);  // n + sqrt(n(n+1)) e^{-i theta}

    SqueezingInstance out;
    out.nu = nu;
    out.u = u;
    out.v = v;
    out.F = (c * L - std::conj(c) * Ld) / std::sqrt(nu);

    SLHModel g = identity_model(1, L.rows());
    g.L[0] = std::conj(u) * L - v * Ld;
    g.H = spec.H;
    out.model = g;

    SLHModel dg = identity_model(1, L.rows());
    dg.L[0] = -L / std::sqrt(nu);
    out.perturbation = dg;

    out.equivalent = series(out.model, out.perturbation);

    out.H_n = im_part((c / nu) * L * L) -
              (root / nu) * std::sin(spec.theta) * Ld * L;
    const double denom = 2.0 * (1.0 + std::cos(spec.theta));
    out.H_limit = im_part(((1.0 + std::exp(complex(0, -spec.theta))) / denom) * L * L) -
                  (std::sin(spec.theta) / denom) * Ld * L;
    return out;
}

FaradayInstance faraday_family(const FaradaySpec& spec) {
    const double two_j = 2.0 * spec.j;
    if (spec.j <= 0.0 || std::abs(two_j - std::round(two_j)) > 1e-12)
        throw validation_error("faraday_family: j must be a positive half-integer");
    if (spec.k <= 0.0)
        throw validation_error("faraday_family: scale k must be positive");
    const Eigen::Index d = static_cast<Eigen::Index>(std::lround(two_j)) + 1;

    Operator fz = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) fz(i, i) = spec.j - double(i);

    const Operator arg = (spec.kappa / spec.k) * fz;
    const Operator c = func_of_hermitian(arg, [](double x) { return std::cos(x); });
    const Operator s = func_of_hermitian(arg, [](double x) { return std::sin(x); });
    const Operator id = Operator::Identity(d, d);

    FaradayInstance out;
    out.Fz = fz;

    SLHModel g;
    g.n = 2;
    g.d = d;
    g.S = {{c, -s}, {s, c}};
    g.L = {-spec.k * spec.alpha * s, spec.k * spec.alpha * c};
    g.H = Operator::Zero(d, d);
    require_valid(g, structural_tol);
    out.model = g;

    // Perturbation that strips the scattering: dS = S*, and dL chosen so
    // L + S dL lands on the decoupled pair (-kappa Fz alpha, k alpha).
    SLHModel dg;
    dg.n = 2;
    dg.d = d;
    dg.S = {{c, s}, {-s, c}};  // adjoint of S (blocks Hermitian, commuting)
    const Operator top = spec.k * spec.alpha * s - spec.kappa * spec.alpha * fz;
    const Operator bot = spec.k * spec.alpha * (id - c);
    dg.L = {dg.S[0][0] * top + dg.S[0][1] * bot, dg.S[1][0] * top + dg.S[1][1] * bot};
    dg.H = Operator::Zero(d, d);
    out.perturbation = dg;

    out.equivalent = series(out.model, out.perturbation);
    return out;
}

LanSpec::Derivatives central_derivatives(const std::function<Operator(double)>& f_L,
                                         const std::function<Operator(double)>& f_H,
                                         double theta0) {
    const double h = 1e-4 * std::max(1.0, std::abs(theta0));
    auto first = [&](const std::function<Operator(double)>& f) {
        auto d = [&](double step) {
            return ((f(theta0 + step) - f(theta0 - step)) / (2.0 * step)).eval();
        };
        return ((4.0 * d(h / 2.0) - d(h)) / 3.0).eval();
    };
    auto second = [&](const std::function<Operator(double)>& f) {
        const Operator center = f(theta0);
        auto d = [&](double step) {
            return ((f(theta0 + step) - 2.0 * center + f(theta0 - step)) / (step * step)).eval();
        };
        return ((4.0 * d(h / 2.0) - d(h)) / 3.0).eval();
    };
    LanSpec::Derivatives out;
    out.L1 = first(f_L);
    out.L2 = second(f_L);
    out.H1 = first(f_H);
    out.H2 = second(f_H);
    return out;
}

LanInstance lan_family(const LanSpec& spec) {
    if (!spec.L || !spec.H)
        throw validation_error("lan_family: family evaluators are required");
    if (spec.k <= 0.0)
        throw validation_error("lan_family: scale k must be positive");
    const double k = spec.k;
    const double local = spec.theta0 + spec.v / k;

    const Operator L0 = spec.L(spec.theta0);
    const Operator H0 = spec.H(spec.theta0);
    require_system_pair(L0, H0, "lan_family");
    const auto der =
        spec.derivatives ? *spec.derivatives : central_derivatives(spec.L, spec.H, spec.theta0);

    LanInstance out;
    const Eigen::Index d = L0.rows();

    SLHModel g = identity_model(1, d);
    g.L[0] = k * spec.L(local);
    g.H = k * k * spec.H(local);
    require_valid(g, structural_tol * std::max(1.0, op_norm(g.H)));
    out.model = g;

    out.phase_term = 0.5 * spec.v * spec.v * im_part(der.L2.adjoint() * L0);

    SLHModel gt = identity_model(1, d);
    gt.L[0] = k * L0 + spec.v * der.L1;
    gt.H = k * k * H0 + k * spec.v * der.H1 + 0.5 * spec.v * spec.v * der.H2 + out.phase_term;
    require_valid(gt, structural_tol * std::max(1.0, op_norm(gt.H)));
    out.equivalent = gt;

    out.perturbation = perturbation_between(out.model, out.equivalent);

    const double step = spec.v / k;
    out.remainder_L =
        op_norm(spec.L(local) - (L0 + step * der.L1 + 0.5 * step * step * der.L2));
    out.remainder_H =
        op_norm(spec.H(local) - (H0 + step * der.H1 + 0.5 * step * step * der.H2));
    return out;
}

VirtualWork virtual_rotation(const SLHModel& g, const Operator& F, double dphi) {
    if (F.rows() != g.d || F.cols() != g.d)
        throw validation_error("virtual_rotation: generator dimension mismatch");
    if (op_norm(F - F.adjoint()) > structural_tol * std::max(1.0, op_norm(F)))
        throw validation_error("virtual_rotation: generator must be Hermitian");

    const Operator u = matrix_exp(complex(0, dphi) * F);
    SLHModel dg = identity_model(g.n, g.d);
    for (Eigen::Index i = 0; i < g.n; ++i) dg.L[i] = u * g.L[i] * u.adjoint() - g.L[i];
    dg.H = u * g.H * u.adjoint() - g.H;

    VirtualWork out;
    out.perturbation = dg;
    out.delta_H = virtual_work(g, dg);
    out.first_order = -dphi * lindblad(g, F);
    return out;
}

ConvergenceReport convergence_experiment(const std::function<FamilyInstance(double)>& family,
                                         const std::vector<double>& ks,
                                         const ExponentialState& psi, double t,
                                         const std::optional<SliceConfig>& oracle,
                                         const std::string& family_name) {
    ConvergenceReport report;
    report.family = family_name;
    report.t = t;
    report.psi = psi;
    report.rows.resize(ks.size());

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const int cap = env_thread_cap();
    size_t workers = std::min<size_t>(ks.size(), hw);
    if (cap > 0) workers = std::min<size_t>(workers, size_t(cap));

    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= ks.size()) return;
            try {
                const FamilyInstance inst = family(ks[i]);
                ConvergenceRow row;
                row.k = ks[i];
                row.distance = distance(inst.model, inst.equivalent, psi, t);
                row.delta_residual = perturbation_residual(inst.perturbation);
                report.rows[i] = row;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    if (oracle && !ks.empty()) {
        size_t idx = 0;
        for (size_t i = 1; i < ks.size(); ++i)
            if (ks[i] < ks[idx]) idx = i;
        const FamilyInstance inst = family(ks[idx]);
        const OracleDistance od = oracle_distance(inst.model, inst.equivalent, psi, t, *oracle);
        report.rows[idx].oracle_value = od.value;
        report.rows[idx].oracle_error = od.error_bar;
    }
    return report;
}

}  // namespace slh
