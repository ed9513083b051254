#include "slh/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slh/errors.hpp"

namespace slh::io {

namespace {

json complex_to_json(const complex& c) {
    return json::array({c.real(), c.imag()});
}

complex complex_from_json(const json& j, const char* where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw parse_error(std::string(where) + ": entry must be a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json to_json(const Operator& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(complex_to_json(a(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Operator operator_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw parse_error("operator: expected a non-empty array of rows");
    const size_t rows = j.size();
    size_t cols = 0;
    Operator out;
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array())
            throw parse_error("operator: row " + std::to_string(i) + " is not an array");
        if (i == 0) {
            cols = j[i].size();
            if (cols != rows)
                throw parse_error("operator: matrix must be square");
            out.resize(rows, cols);
        } else if (j[i].size() != cols) {
            throw parse_error("operator: ragged rows");
        }
        for (size_t k = 0; k < cols; ++k)
            out(i, k) = complex_from_json(j[i][k], "operator");
    }
    return out;
}

json to_json(const Eigen::VectorXcd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

Eigen::VectorXcd vector_from_json(const json& j) {
    if (!j.is_array())
        throw parse_error("vector: expected an array of [re, im] pairs");
    Eigen::VectorXcd out(j.size());
    for (size_t i = 0; i < j.size(); ++i) out(i) = complex_from_json(j[i], "vector");
    return out;
}

json to_json(const SLHModel& g) {
    json s_rows = json::array();
    for (const auto& row : g.S) {
        json r = json::array();
        for (const auto& blk : row) r.push_back(to_json(blk));
        s_rows.push_back(std::move(r));
    }
    json l = json::array();
    for (const auto& op : g.L) l.push_back(to_json(op));
    return json{{"n", g.n}, {"d", g.d}, {"S", std::move(s_rows)}, {"L", std::move(l)},
                {"H", to_json(g.H)}};
}

SLHModel model_from_json(const json& j, double eps, bool check) {
    if (!j.is_object())
        throw parse_error("model: expected an object with n, d, S, L, H");
    for (const char* key : {"n", "d", "S", "L", "H"})
        if (!j.contains(key))
            throw parse_error(std::string("model: missing field '") + key + "'");
    SLHModel g;
    if (!j["n"].is_number_integer() || !j["d"].is_number_integer())
        throw parse_error("model: n and d must be integers");
    g.n = j["n"].get<Eigen::Index>();
    g.d = j["d"].get<Eigen::Index>();
    if (g.n <= 0 || g.d <= 0)
        throw parse_error("model: n and d must be positive");
    if (!j["S"].is_array() || !j["L"].is_array())
        throw parse_error("model: S and L must be arrays");
    g.S.resize(j["S"].size());
    for (size_t i = 0; i < j["S"].size(); ++i) {
        if (!j["S"][i].is_array())
            throw parse_error("model: S rows must be arrays of blocks");
        for (const auto& blk : j["S"][i]) g.S[i].push_back(operator_from_json(blk));
    }
    for (const auto& op : j["L"]) g.L.push_back(operator_from_json(op));
    g.H = operator_from_json(j["H"]);
    if (check) require_valid(g, eps);
    return g;
}

json to_json(const ExponentialState& psi) {
    json segs = json::array();
    for (const auto& seg : psi.segments)
        segs.push_back(json{{"t_end", seg.t_end}, {"alpha", to_json(seg.alpha)}});
    return json{{"v", to_json(psi.v)}, {"segments", std::move(segs)}};
}

ExponentialState state_from_json(const json& j) {
    if (!j.is_object() || !j.contains("v") || !j.contains("segments"))
        throw parse_error("state: expected an object with v and segments");
    ExponentialState psi;
    psi.v = vector_from_json(j["v"]);
    if (!j["segments"].is_array())
        throw parse_error("state: segments must be an array");
    for (const auto& seg : j["segments"]) {
        if (!seg.is_object() || !seg.contains("t_end") || !seg.contains("alpha") ||
            !seg["t_end"].is_number())
            throw parse_error("state: each segment needs numeric t_end and alpha");
        psi.segments.push_back({seg["t_end"].get<double>(), vector_from_json(seg["alpha"])});
    }
    return psi;
}

json to_json(const GaugeElement& g) {
    json r = json::array();
    for (Eigen::Index i = 0; i < g.R.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < g.R.cols(); ++k) row.push_back(complex_to_json(g.R(i, k)));
        r.push_back(std::move(row));
    }
    return json{{"R", std::move(r)}, {"beta", to_json(g.beta)}, {"e", g.e}};
}

GaugeElement gauge_from_json(const json& j) {
    if (!j.is_object() || !j.contains("R") || !j.contains("beta") || !j.contains("e") ||
        !j["e"].is_number())
        throw parse_error("gauge element: expected an object with R, beta, e");
    GaugeElement g;
    g.R = operator_from_json(j["R"]);
    g.beta = vector_from_json(j["beta"]);
    g.e = j["e"].get<double>();
    return g;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string to_csv(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "k,distance,delta_residual,oracle_value,oracle_error\n";
    for (const auto& row : report.rows) {
        out << format_double(row.k) << ',' << format_double(row.distance) << ','
            << format_double(row.delta_residual) << ',';
        if (row.oracle_value) out << format_double(*row.oracle_value);
        out << ',';
        if (row.oracle_error) out << format_double(*row.oracle_error);
        out << '\n';
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw parse_error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw parse_error("failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parse_error("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw parse_error("invalid JSON in '" + path + "': " + e.what());
    }
}

}  // namespace slh::io
