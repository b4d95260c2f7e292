#pragma once

// Serialization: system description files (JSON), certificate files,
// sweep/trace CSV emission, and a raw binary state dump.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "phsdecay/certifier.hpp"
#include "phsdecay/simulator.hpp"
#include "phsdecay/system.hpp"

namespace phsdecay {

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

/// Shortest round-trip decimal text for a double (deterministic output).
inline std::string fmt_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j,
                                        const std::string& field) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw std::invalid_argument(field + ": expected an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols)
            throw std::invalid_argument(field + ": ragged rows");
        for (Eigen::Index k = 0; k < cols; ++k)
            m(i, k) = j[i][k].get<double>();
    }
    return m;
}

}  // namespace detail

/// FNV-1a 64-bit hash, used to tie certificates to their system file.
inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline nlohmann::json system_to_json(const PHSystem& sys) {
    nlohmann::json j;
    j["n"] = sys.n;
    j["a"] = sys.a;
    j["b"] = sys.b;
    j["P1"] = detail::matrix_to_json(sys.P1);
    j["P0"] = detail::matrix_to_json(sys.P0);
    j["G0"] = detail::matrix_to_json(sys.G0);
    if (sys.L.is_expression_backed()) {
        j["L"] = {{"expr", sys.L.expression_text()}};
    } else {
        nlohmann::json vals = nlohmann::json::array();
        for (const auto& m : sys.L.sample_values())
            vals.push_back(detail::matrix_to_json(m));
        j["L"] = {{"samples",
                   {{"grid", sys.L.sample_grid()}, {"values", std::move(vals)}}}};
    }
    j["W1"] = detail::matrix_to_json(sys.W1);
    j["W2"] = detail::matrix_to_json(sys.W2);
    j["Wt1"] = detail::matrix_to_json(sys.Wt1);
    j["K"] = detail::matrix_to_json(sys.K);
    return j;
}

inline PHSystem system_from_json(const nlohmann::json& j) {
    PHSystem sys;
    try {
        sys.n = j.at("n").get<int>();
        sys.a = j.at("a").get<double>();
        sys.b = j.at("b").get<double>();
        sys.P1 = detail::matrix_from_json(j.at("P1"), "P1");
        sys.P0 = detail::matrix_from_json(j.at("P0"), "P0");
        sys.G0 = detail::matrix_from_json(j.at("G0"), "G0");
        const nlohmann::json& L = j.at("L");
        if (L.contains("expr")) {
            sys.L = CoefficientFunction::from_expressions(
                L.at("expr").get<std::vector<std::vector<std::string>>>());
        } else if (L.contains("samples")) {
            const nlohmann::json& s = L.at("samples");
            std::vector<Eigen::MatrixXd> samples;
            for (const auto& m : s.at("values"))
                samples.push_back(detail::matrix_from_json(m, "L.samples"));
            sys.L = CoefficientFunction::from_samples(
                s.at("grid").get<std::vector<double>>(), samples);
        } else {
            throw std::invalid_argument("L: expected 'expr' or 'samples'");
        }
        sys.W1 = detail::matrix_from_json(j.at("W1"), "W1");
        sys.W2 = detail::matrix_from_json(j.at("W2"), "W2");
        sys.Wt1 = detail::matrix_from_json(j.at("Wt1"), "Wt1");
        sys.K = detail::matrix_from_json(j.at("K"), "K");
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed system file: ") +
                                    e.what());
    }
    return sys;
}

inline void save_system(const std::string& path, const PHSystem& sys) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << system_to_json(sys).dump(2) << '\n';
}

inline PHSystem load_system(const std::string& path,
                            std::uint64_t* hash_out = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read system file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (hash_out) *hash_out = fnv1a64(text);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed system file: ") +
                                    e.what());
    }
    return system_from_json(j);
}

inline nlohmann::json multiplier_to_json(const MultiplierSpec& m) {
    nlohmann::json j;
    j["family"] = to_string(m.family());
    j["description"] = m.describe();
    switch (m.family()) {
        case MultiplierFamily::Linear:
            j["x0"] = m.param0();
            break;
        case MultiplierFamily::Exponential:
            j["C"] = m.param0();
            j["beta"] = m.param1();
            j["a"] = m.param2();
            break;
        case MultiplierFamily::Affine:
            j["q"] = m.param0();
            j["d"] = m.param1();
            break;
        default:
            break;
    }
    return j;
}

inline nlohmann::json certificate_to_json(const Certificate& cert,
                                          std::uint64_t system_hash) {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(system_hash));
    j["system_hash"] = hash;
    j["c"] = cert.c;
    j["eps0"] = cert.eps0;
    j["eps1"] = cert.eps1;
    j["xi"] = cert.xi;
    j["eps"] = cert.eps;
    j["M"] = cert.M;
    j["alpha"] = cert.alpha;
    j["multiplier"] = multiplier_to_json(cert.multiplier);
    j["positivity_margin"] = cert.positivity_margin;
    j["grid_size"] = cert.grid_size;
    j["converged"] = cert.converged;
    j["warnings"] = cert.warnings;
    return j;
}

inline void save_certificate(const std::string& path, const Certificate& cert,
                             std::uint64_t system_hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << certificate_to_json(cert, system_hash).dump(2) << '\n';
}

struct SweepRow {
    double sweep_var = 0.0;
    double eps0 = 0.0;
    double eps1 = 0.0;
    double c = 0.0;
    double M = 0.0;
    double alpha = 0.0;
    double margin = 0.0;
};

inline void write_sweep_csv(std::ostream& out,
                            const std::vector<SweepRow>& rows) {
    out << "sweep_var,eps0,eps1,c,M,alpha,margin\n";
    for (const auto& r : rows) {
        out << detail::fmt_double(r.sweep_var) << ','
            << detail::fmt_double(r.eps0) << ',' << detail::fmt_double(r.eps1)
            << ',' << detail::fmt_double(r.c) << ',' << detail::fmt_double(r.M)
            << ',' << detail::fmt_double(r.alpha) << ','
            << detail::fmt_double(r.margin) << '\n';
    }
}

inline void write_trace_csv(std::ostream& out, const SimulationTrace& tr) {
    out << "t,H";
    for (int i = 1; i <= tr.n / 2; ++i) out << ",yb_" << i;
    out << '\n';
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        out << detail::fmt_double(tr.times[k]) << ','
            << detail::fmt_double(tr.energy[k]);
        for (int i = 0; i < tr.n / 2; ++i)
            out << ',' << detail::fmt_double(tr.yb[k](i));
        out << '\n';
    }
}

/// Raw snapshot dump: 24-byte header (magic "PHSDUMP\0", int32 N, int32 n,
/// float64 dt) then per snapshot a float64 time and the row-major state.
inline void write_state_dump(const std::string& path,
                             const SimulationTrace& tr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const char magic[8] = {'P', 'H', 'S', 'D', 'U', 'M', 'P', '\0'};
    out.write(magic, 8);
    const std::int32_t N = tr.N, n = tr.n;
    out.write(reinterpret_cast<const char*>(&N), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&tr.dt), 8);
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        out.write(reinterpret_cast<const char*>(&tr.snapshot_times[k]), 8);
        for (const auto& v : tr.snapshots[k].values)
            out.write(reinterpret_cast<const char*>(v.data()),
                      static_cast<std::streamsize>(sizeof(double) * v.size()));
    }
}

}  // namespace phsdecay
