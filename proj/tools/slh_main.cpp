#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "slh/errors.hpp"
#include "slh/io.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string input;
    std::string output;
    double t = 1.0;
    bool t_set = false;
    std::vector<double> ks;
    double oracle_dt = 0.0;
    bool oracle_requested = false;
    int oracle_dnoise = 3;
    double tol = slh::structural_tol;
};

json config_json(const RunConfig& cfg) {
    const char* threads = std::getenv("SLH_NUM_THREADS");
    return json{{"command", cfg.command},
                {"input", cfg.input},
                {"output", cfg.output},
                {"t", cfg.t},
                {"ks", cfg.ks},
                {"oracle", cfg.oracle_requested},
                {"oracle_dt", cfg.oracle_dt},
                {"oracle_dnoise", cfg.oracle_dnoise},
                {"tol", cfg.tol},
                {"num_threads", threads ? std::atoi(threads) : 0}};
}

void emit(const RunConfig& cfg, const std::string& payload) {
    if (cfg.output.empty()) {
        std::cout << payload;
        if (payload.empty() || payload.back() != '\n') std::cout << '\n';
        return;
    }
    slh::io::write_file(cfg.output, payload);
    slh::io::write_file(cfg.output + ".config.json", config_json(cfg).dump(2) + "\n");
}

double resolve_t(const RunConfig& cfg, const json& input) {
    if (cfg.t_set) return cfg.t;
    if (input.is_object() && input.contains("t") && input["t"].is_number())
        return input["t"].get<double>();
    return cfg.t;
}

slh::ExponentialState resolve_psi(const json& input, Eigen::Index n, Eigen::Index d, double t) {
    if (input.is_object() && input.contains("psi"))
        return slh::io::state_from_json(input["psi"]);
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(d, 1.0 / std::sqrt(double(d)));
    Eigen::VectorXcd alpha = Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
    return slh::constant_drive(v, alpha, t);
}

std::optional<slh::SliceConfig> oracle_config(const RunConfig& cfg) {
    if (!cfg.oracle_requested) return std::nullopt;
    slh::SliceConfig s;
    s.dt = cfg.oracle_dt;
    s.d_noise = cfg.oracle_dnoise;
    return s;
}

int run_validate(const RunConfig& cfg) {
    const json input = slh::io::read_json_file(cfg.input);
    const slh::SLHModel g = slh::io::model_from_json(input, cfg.tol, /*check=*/false);
    const auto violations = slh::validate(g, cfg.tol);
    json out = json::array();
    for (const auto& v : violations)
        out.push_back(json{{"component", v.component},
                           {"residual", v.residual},
                           {"message", v.message}});
    emit(cfg, json{{"violations", out}}.dump(2));
    return violations.empty() ? 0 : 3;
}

int run_distance(const RunConfig& cfg) {
    const json input = slh::io::read_json_file(cfg.input);
    if (!input.is_object() || !input.contains("Ga") || !input.contains("Gb"))
        throw slh::parse_error("distance: input must contain models Ga and Gb");
    const slh::SLHModel ga = slh::io::model_from_json(input["Ga"], cfg.tol);
    const slh::SLHModel gb = slh::io::model_from_json(input["Gb"], cfg.tol);
    const double t = resolve_t(cfg, input);
    const slh::ExponentialState psi = resolve_psi(input, ga.n, ga.d, t);
    const slh::complex ov = slh::overlap(ga, gb, psi, t);
    const double dist = slh::distance(ga, gb, psi, t);
    emit(cfg, json{{"distance", dist},
                   {"overlap", {ov.real(), ov.imag()}},
                   {"psi_squared_norm", psi.squared_norm()},
                   {"t", t}}
                  .dump(2));
    return 0;
}

int run_oracle_check(const RunConfig& cfg) {
    const json input = slh::io::read_json_file(cfg.input);
    if (!input.is_object() || !input.contains("Ga") || !input.contains("Gb"))
        throw slh::parse_error("oracle-check: input must contain models Ga and Gb");
    const slh::SLHModel ga = slh::io::model_from_json(input["Ga"], cfg.tol);
    const slh::SLHModel gb = slh::io::model_from_json(input["Gb"], cfg.tol);
    const double t = resolve_t(cfg, input);
    const slh::ExponentialState psi = resolve_psi(input, ga.n, ga.d, t);

    slh::SliceConfig sc;
    sc.dt = cfg.oracle_dt;
    sc.d_noise = cfg.oracle_dnoise;
    const double engine = slh::distance(ga, gb, psi, t);
    const slh::OracleDistance od = slh::oracle_distance(ga, gb, psi, t, sc);
    emit(cfg, json{{"engine_distance", engine},
                   {"oracle_distance", od.value},
                   {"error_bar", od.error_bar},
                   {"observed_order", od.observed_order},
                   {"norm_deficit", od.norm_deficit},
                   {"within_bar", std::abs(engine - od.value) <= od.error_bar}}
                  .dump(2));
    return 0;
}

int run_family(const RunConfig& cfg) {
    const json input = slh::io::read_json_file(cfg.input);
    std::function<slh::FamilyInstance(double)> family;
    Eigen::Index n = 1;
    Eigen::Index d = 0;
    std::vector<double> ks = cfg.ks;

    if (cfg.command == "squeezing") {
        if (!input.is_object() || !input.contains("L") || !input.contains("theta"))
            throw slh::parse_error("squeezing: input needs L, theta (H optional)");
        slh::SqueezingSpec base;
        base.L = slh::io::operator_from_json(input["L"]);
        base.H = input.contains("H") ? slh::io::operator_from_json(input["H"])
                                     : slh::Operator::Zero(base.L.rows(), base.L.cols());
        base.theta = input["theta"].get<double>();
        d = base.L.rows();
        if (ks.empty()) ks = {1, 4, 16, 64, 256};
        family = [base](double k) {
            slh::SqueezingSpec s = base;
            s.n = k;
            const auto inst = slh::squeezing_family(s);
            return slh::FamilyInstance{inst.model, inst.equivalent, inst.perturbation};
        };
    } else if (cfg.command == "faraday") {
        slh::FaradaySpec base;
        if (input.is_object()) {
            base.j = input.value("j", 0.5);
            base.kappa = input.value("kappa", 1.0);
            if (input.contains("alpha"))
                base.alpha = input["alpha"].is_number()
                                 ? slh::complex(input["alpha"].get<double>(), 0.0)
                                 : slh::complex(input["alpha"][0].get<double>(),
                                                input["alpha"][1].get<double>());
        }
        n = 2;
        d = static_cast<Eigen::Index>(std::lround(2.0 * base.j)) + 1;
        if (ks.empty()) ks = {2, 4, 8, 16, 32};
        family = [base](double k) {
            slh::FaradaySpec s = base;
            s.k = k;
            const auto inst = slh::faraday_family(s);
            return slh::FamilyInstance{inst.model, inst.equivalent, inst.perturbation};
        };
    } else {  // lan
        if (!input.is_object() || !input.contains("L_poly"))
            throw slh::parse_error("lan: input needs L_poly (and optionally H_poly)");
        std::vector<slh::Operator> lp, hp;
        for (const auto& c : input["L_poly"]) lp.push_back(slh::io::operator_from_json(c));
        if (input.contains("H_poly"))
            for (const auto& c : input["H_poly"]) hp.push_back(slh::io::operator_from_json(c));
        if (lp.empty()) throw slh::parse_error("lan: L_poly must not be empty");
        d = lp[0].rows();
        if (hp.empty()) hp.push_back(slh::Operator::Zero(d, d));
        const double theta0 = input.value("theta0", 0.0);
        const double v = input.value("v", 1.0);
        const bool analytic = input.value("analytic_derivatives", true);

        auto poly_eval = [](const std::vector<slh::Operator>& coeffs, Eigen::Index dim) {
            return [coeffs, dim](double theta) {
                slh::Operator acc = slh::Operator::Zero(dim, dim);
                double p = 1.0;
                for (const auto& c : coeffs) {
                    acc += p * c;
                    p *= theta;
                }
                return acc;
            };
        };
        auto poly_derivative = [](const std::vector<slh::Operator>& coeffs) {
            std::vector<slh::Operator> out;
            for (size_t p = 1; p < coeffs.size(); ++p) out.push_back(double(p) * coeffs[p]);
            return out;
        };

        slh::LanSpec base;
        base.L = poly_eval(lp, d);
        base.H = poly_eval(hp, d);
        base.theta0 = theta0;
        base.v = v;
        if (analytic) {
            const auto lp1 = poly_derivative(lp);
            const auto hp1 = poly_derivative(hp);
            slh::LanSpec::Derivatives der;
            der.L1 = lp1.empty() ? slh::Operator::Zero(d, d) : poly_eval(lp1, d)(theta0);
            der.L2 = poly_derivative(lp1).empty()
                         ? slh::Operator::Zero(d, d)
                         : poly_eval(poly_derivative(lp1), d)(theta0);
            der.H1 = hp1.empty() ? slh::Operator::Zero(d, d) : poly_eval(hp1, d)(theta0);
            der.H2 = poly_derivative(hp1).empty()
                         ? slh::Operator::Zero(d, d)
                         : poly_eval(poly_derivative(hp1), d)(theta0);
            base.derivatives = der;
        }
        if (ks.empty()) ks = {1, 2, 4, 8, 16};
        family = [base](double k) {
            slh::LanSpec s = base;
            s.k = k;
            const auto inst = slh::lan_family(s);
            return slh::FamilyInstance{inst.model, inst.equivalent, inst.perturbation};
        };
    }

    const double t = resolve_t(cfg, input);
    const slh::ExponentialState psi = resolve_psi(input, n, d, t);
    const auto report =
        slh::convergence_experiment(family, ks, psi, t, oracle_config(cfg), cfg.command);
    emit(cfg, slh::io::to_csv(report));
    return 0;
}

int run_virtual_work(const RunConfig& cfg) {
    const json input = slh::io::read_json_file(cfg.input);
    if (!input.is_object() || !input.contains("G") || !input.contains("F"))
        throw slh::parse_error("virtual-work: input needs a model G and a generator F");
    const slh::SLHModel g = slh::io::model_from_json(input["G"], cfg.tol);
    const slh::Operator f = slh::io::operator_from_json(input["F"]);
    std::vector<double> dphis{1e-2, 5e-3, 2.5e-3};
    if (input.contains("dphis")) {
        dphis.clear();
        for (const auto& x : input["dphis"]) dphis.push_back(x.get<double>());
    }
    std::ostringstream out;
    out << "dphi,delta_H_norm,first_order_residual\n";
    for (double dphi : dphis) {
        const auto w = slh::virtual_rotation(g, f, dphi);
        out << slh::io::format_double(dphi) << ','
            << slh::io::format_double(slh::op_norm(w.delta_H)) << ','
            << slh::io::format_double(slh::op_norm(w.delta_H - w.first_order)) << '\n';
    }
    emit(cfg, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Series-product algebra and convergence experiments for quantum"
                 " input-output models"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<CLI::App*> subs;
    for (const char* name : {"validate", "distance", "oracle-check", "squeezing", "faraday",
                             "lan", "virtual-work"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--input", cfg.input, "input JSON file")->required();
        sub->add_option("--output", cfg.output, "output file (stdout when omitted)");
        sub->add_option("--t", cfg.t, "evolution horizon");
        sub->add_option("--ks", cfg.ks, "scale parameters")->delimiter(',');
        sub->add_option("--oracle-dt", cfg.oracle_dt,
                        "slice step for the oracle (0 = automatic); presence enables the"
                        " cross-check in family commands");
        sub->add_option("--oracle-dnoise", cfg.oracle_dnoise, "levels kept per noise channel");
        sub->add_option("--tol", cfg.tol, "validation tolerance");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", {{"type", "parse"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    cfg.t_set = sub->count("--t") > 0;
    cfg.oracle_requested = sub->count("--oracle-dt") > 0;

    try {
        if (cfg.command == "validate") return run_validate(cfg);
        if (cfg.command == "distance") return run_distance(cfg);
        if (cfg.command == "oracle-check") return run_oracle_check(cfg);
        if (cfg.command == "virtual-work") return run_virtual_work(cfg);
        return run_family(cfg);
    } catch (const slh::parse_error& e) {
        std::cerr << json{{"error", {{"type", "parse"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const slh::validation_error& e) {
        std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 3;
    } catch (const slh::numerical_error& e) {
        std::cerr << json{{"error", {{"type", "numerical"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 1;
    }
}
