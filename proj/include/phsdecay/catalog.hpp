#pragma once

// Built-in example systems: constant-coefficient wave equation, vibrating
// string with non-uniform cross-section, and the Timoshenko beam.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "phsdecay/multiplier.hpp"
#include "phsdecay/system.hpp"

namespace phsdecay {

struct CatalogEntry {
    std::string name;
    std::string description;
    PHSystem system;
    MultiplierSpec recommended_multiplier;
    double recommended_xi = 0.5;
    std::string expected;  // provenance notes on the reference certificate
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Wave equation z_t = P1 (L z)_x with L = diag(tau, 1/rho) and boundary
/// gain k at x = b.
inline CatalogEntry wave_constant(double tau, double rho, double k, double a,
                                  double b) {
    if (!(tau > 0.0) || !(rho > 0.0) || !(k > 0.0))
        throw std::domain_error("wave system needs tau, rho, k > 0");
    if (!(a < b)) throw std::domain_error("wave system needs a < b");

    CatalogEntry e;
    e.name = "wave-unit";
    e.description = "constant-coefficient wave equation with boundary damping";
    PHSystem& s = e.system;
    s.n = 2;
    s.a = a;
    s.b = b;
    s.P1 = Eigen::MatrixXd{{0.0, 1.0}, {1.0, 0.0}};
    s.P0 = Eigen::MatrixXd::Zero(2, 2);
    s.G0 = Eigen::MatrixXd::Zero(2, 2);
    s.L = CoefficientFunction::from_expressions(
        {{detail::num(tau), "0"}, {"0", detail::num(1.0 / rho)}});
    s.W1 = Eigen::MatrixXd{{1.0, 0.0}};
    s.W2 = Eigen::MatrixXd{{1.0, 0.0}};
    s.Wt1 = Eigen::MatrixXd{{0.0, 1.0}};
    s.K = Eigen::MatrixXd{{k}};
    e.recommended_multiplier = MultiplierSpec::linear(a);
    e.recommended_xi = 0.5;
    e.expected =
        "with unit parameters, m=x-a and xi=1/2: M=(k^2+k+1)/(k^2-k+1), "
        "alpha=k/(k^2+k+1); k=1 gives (M,alpha)=(3,1/3)";
    return e;
}

/// Vibrating string with cross-sectional area A(x) = (10-x)/10 on [0,1],
/// boundary gain k = 0.5.
inline CatalogEntry wave_variable_area() {
    CatalogEntry e;
    e.name = "wave-variable";
    e.description = "vibrating string with non-uniform cross-sectional area";
    PHSystem& s = e.system;
    s.n = 2;
    s.a = 0.0;
    s.b = 1.0;
    s.P1 = Eigen::MatrixXd{{0.0, 1.0}, {1.0, 0.0}};
    s.P0 = Eigen::MatrixXd::Zero(2, 2);
    s.G0 = Eigen::MatrixXd::Zero(2, 2);
    s.L = CoefficientFunction::from_expressions(
        {{"(10-x)/10", "0"}, {"0", "10/(10-x)"}});
    s.W1 = Eigen::MatrixXd{{1.0, 0.0}};
    s.W2 = Eigen::MatrixXd{{1.0, 0.0}};
    s.Wt1 = Eigen::MatrixXd{{0.0, 1.0}};
    s.K = Eigen::MatrixXd{{0.5}};
    e.recommended_multiplier = MultiplierSpec::linear(0.0);  // m(x) = x
    e.recommended_xi = 1.0;  // eps = eps1 (< eps0 here, so M stays finite)
    e.expected = "c=8/9, eps0=9/10, eps1=4/5, alpha=32/85";
    return e;
}

struct TimoshenkoParams {
    double rho = 1.0;      // mass per unit length
    double iota_rho = 1.0; // mass moment of inertia
    double kappa = 1.0;    // shear modulus
    double ei = 1.0;       // bending stiffness (epsilon * iota)
    double gamma = 0.0;    // viscous damping, translational
    double delta = 0.0;    // viscous damping, rotational
};

inline CatalogEntry timoshenko(const TimoshenkoParams& p, double k1, double k2,
                               double a, double b) {
    if (!(p.rho > 0.0) || !(p.iota_rho > 0.0) || !(p.kappa > 0.0) ||
        !(p.ei > 0.0) || !(k1 > 0.0) || !(k2 > 0.0))
        throw std::domain_error("timoshenko: physical parameters must be positive");
    if (p.gamma < 0.0 || p.delta < 0.0)
        throw std::domain_error("timoshenko: gamma, delta must be >= 0");
    if (!(a < b)) throw std::domain_error("timoshenko needs a < b");

    CatalogEntry e;
    e.name = "timoshenko";
    e.description = "Timoshenko beam with boundary damping";
    PHSystem& s = e.system;
    s.n = 4;
    s.a = a;
    s.b = b;
    s.P1 = Eigen::MatrixXd{{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
    s.P0 = Eigen::MatrixXd{{0, 0, 0, 0}, {0, 0, 1, 0}, {0, -1, 0, 0}, {0, 0, 0, 0}};
    s.G0 = Eigen::MatrixXd::Zero(4, 4);
    s.G0(0, 0) = p.gamma;
    s.G0(1, 1) = p.delta;
    s.L = CoefficientFunction::from_expressions(
        {{detail::num(1.0 / p.rho), "0", "0", "0"},
         {"0", detail::num(1.0 / p.iota_rho), "0", "0"},
         {"0", "0", detail::num(p.kappa), "0"},
         {"0", "0", "0", detail::num(p.ei)}});
    s.W1 = Eigen::MatrixXd{{0, 0, 1, 0}, {0, 0, 0, 1}};
    s.Wt1 = Eigen::MatrixXd{{1, 0, 0, 0}, {0, 1, 0, 0}};
    s.W2 = Eigen::MatrixXd{{1, 0, 0, 0}, {0, 1, 0, 0}};
    s.K = Eigen::MatrixXd{{k1, 0.0}, {0.0, k2}};
    e.recommended_multiplier = MultiplierSpec::linear(a);
    e.recommended_xi = 0.5;
    return e;
}

/// Inviscid beam with the reference parameter set on a 0.1 m bar.
inline CatalogEntry timoshenko_inviscid(double k = 1.0) {
    TimoshenkoParams p;
    p.rho = 0.2;
    p.iota_rho = 2e-2;
    p.kappa = 4e-3;
    p.ei = 1.2e-2;
    CatalogEntry e = timoshenko(p, k, k, 0.0, 0.1);
    e.name = "timoshenko-inviscid";
    e.description = "inviscid Timoshenko beam, reference physical parameters";
    e.recommended_multiplier = MultiplierSpec::linear(0.0);
    e.expected = "eps0=1/25, eps1=100k/(1250k^2+1), c~0.6838 with m=x-a";
    return e;
}

/// All physical parameters normalized to 1, viscous damping included.
inline CatalogEntry timoshenko_normalized() {
    TimoshenkoParams p;
    p.gamma = 1.0;
    p.delta = 1.0;
    CatalogEntry e = timoshenko(p, 1.0, 1.0, 0.0, 1.0);
    e.name = "timoshenko-normalized";
    e.description = "Timoshenko beam with unit parameters and viscous damping";
    // The linear multiplier fails positivity here; the exponential one at
    // beta_op = 1 + sqrt(2) certifies the decay.
    e.recommended_multiplier =
        MultiplierSpec::exponential(1.0, 1.0 + std::sqrt(2.0), 0.0);
    e.recommended_xi = 0.5;
    e.expected = "beta_op=1+sqrt(2); xi=1/2 gives M=3, alpha~0.0298";
    return e;
}

inline std::vector<CatalogEntry> catalog_entries() {
    return {wave_constant(1.0, 1.0, 1.0, 0.0, 1.0), wave_variable_area(),
            timoshenko_inviscid(), timoshenko_normalized()};
}

inline CatalogEntry find_catalog_entry(const std::string& name) {
    for (auto& e : catalog_entries())
        if (e.name == name) return e;
    throw std::invalid_argument("unknown catalog entry '" + name +
                                "' (try: wave-unit, wave-variable, "
                                "timoshenko-inviscid, timoshenko-normalized)");
}

}  // namespace phsdecay
