#pragma once

// Domain model of the boundary-dissipative port-Hamiltonian system class
// and the matrix-valued quantities the decay certificate is built from.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "phsdecay/coefficient.hpp"
#include "phsdecay/multiplier.hpp"
#include "phsdecay/scan.hpp"

namespace phsdecay {

struct PHSystem {
    int n = 0;          // state dimension, even
    double a = 0.0;
    double b = 1.0;
    Eigen::MatrixXd P1;   // n x n, symmetric invertible
    Eigen::MatrixXd P0;   // n x n, skew-symmetric
    Eigen::MatrixXd G0;   // n x n, symmetric psd
    CoefficientFunction L;
    Eigen::MatrixXd W1;   // n/2 x n
    Eigen::MatrixXd W2;   // n/2 x n
    Eigen::MatrixXd Wt1;  // n/2 x n
    Eigen::MatrixXd K;    // n/2 x n/2, symmetric pd
};

struct StateField {
    std::vector<double> grid;            // strictly increasing, spans [a,b]
    std::vector<Eigen::VectorXd> values; // one n-vector per node
};

struct ValidationCheck {
    std::string name;
    bool passed = false;
    bool warning_only = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool passed = true;

    void add(const std::string& name, bool ok, const std::string& detail = "",
             bool warning_only = false) {
        checks.push_back({name, ok, warning_only, detail});
        if (!ok && !warning_only) passed = false;
    }
};

/// Extremal scalars the certificate algebra consumes.
struct SystemParameters {
    double mu_L = 0.0;   // max eig L over [a,b]
    double eta_L = 0.0;  // min eig L over [a,b]
    double mu_B = 0.0;   // max eig B over [a,b]
    double mu_Psi = 0.0; // max eig Psi over [a,b]
    double mu_P1 = 0.0;  // sqrt(max eig P1^-2)
    double mu_m = 0.0;   // max m over [a,b]
    double eta_K = 0.0;  // min eig K
};

namespace detail {

inline void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows,
                          Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols)
        throw std::invalid_argument(std::string(name) + " has shape " +
                                    std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + ", expected " +
                                    std::to_string(rows) + "x" +
                                    std::to_string(cols));
}

inline double min_eig(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double max_eig(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

inline void check_system_shapes(const PHSystem& sys) {
    if (sys.n <= 0 || sys.n % 2 != 0)
        throw std::invalid_argument("state dimension n must be a positive even integer");
    if (!(sys.a < sys.b))
        throw std::invalid_argument("domain endpoints must satisfy a < b");
    const Eigen::Index n = sys.n;
    const Eigen::Index h = n / 2;
    require_shape(sys.P1, n, n, "P1");
    require_shape(sys.P0, n, n, "P0");
    require_shape(sys.G0, n, n, "G0");
    require_shape(sys.W1, h, n, "W1");
    require_shape(sys.W2, h, n, "W2");
    require_shape(sys.Wt1, h, n, "Wt1");
    require_shape(sys.K, h, h, "K");
    if (sys.L.dim() != sys.n)
        throw std::invalid_argument("L has dimension " +
                                    std::to_string(sys.L.dim()) + ", expected " +
                                    std::to_string(sys.n));
}

/// Stacked boundary matrix [W1; Wt1].
inline Eigen::MatrixXd stacked_boundary(const PHSystem& sys) {
    Eigen::MatrixXd S(sys.n, sys.n);
    S.topRows(sys.n / 2) = sys.W1;
    S.bottomRows(sys.n / 2) = sys.Wt1;
    return S;
}

}  // namespace detail

/// One report entry per structural invariant; malformed shapes throw.
inline ValidationReport validate_system(const PHSystem& sys, int grid_size) {
    if (grid_size < 2) throw std::domain_error("grid_size must be >= 2");
    detail::check_system_shapes(sys);

    ValidationReport rep;
    const double p1_scale = sys.P1.cwiseAbs().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, p1_scale);

    rep.add("P1 symmetric", (sys.P1 - sys.P1.transpose()).cwiseAbs().maxCoeff() <= tol);
    {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.P1);
        rep.add("P1 invertible", lu.isInvertible(),
                "rank " + std::to_string(lu.rank()));
    }
    rep.add("P0 skew-symmetric",
            (sys.P0 + sys.P0.transpose()).cwiseAbs().maxCoeff() <=
                1e-12 * std::max(1.0, sys.P0.cwiseAbs().maxCoeff()));
    {
        const bool sym = (sys.G0 - sys.G0.transpose()).cwiseAbs().maxCoeff() <=
                         1e-12 * std::max(1.0, sys.G0.cwiseAbs().maxCoeff());
        const double lo = sym ? detail::min_eig(0.5 * (sys.G0 + sys.G0.transpose())) : -1.0;
        rep.add("G0 symmetric positive semidefinite",
                sym && lo >= -1e-12 * std::max(1.0, sys.G0.cwiseAbs().maxCoeff()),
                "min eig " + std::to_string(lo));
    }
    {
        const bool sym = (sys.K - sys.K.transpose()).cwiseAbs().maxCoeff() <=
                         1e-12 * std::max(1.0, sys.K.cwiseAbs().maxCoeff());
        const double lo = sym ? detail::min_eig(0.5 * (sys.K + sys.K.transpose())) : -1.0;
        rep.add("K symmetric positive definite", sym && lo > 0.0,
                "min eig " + std::to_string(lo));
    }
    {
        // L(x) = L(x)^T > 0 at grid_size uniform samples.
        double worst = std::numeric_limits<double>::infinity();
        double worst_x = sys.a;
        double worst_asym = 0.0;
        for (int i = 0; i < grid_size; ++i) {
            const double x =
                sys.a + (sys.b - sys.a) * static_cast<double>(i) / (grid_size - 1);
            const Eigen::MatrixXd Lx = sys.L.eval(x);
            worst_asym = std::max(worst_asym,
                                  (Lx - Lx.transpose()).cwiseAbs().maxCoeff());
            const double lo = detail::min_eig(0.5 * (Lx + Lx.transpose()));
            if (lo < worst) {
                worst = lo;
                worst_x = x;
            }
        }
        rep.add("L symmetric positive definite on [a,b]",
                worst > 0.0 && worst_asym <= 1e-12,
                "min eig " + std::to_string(worst) + " at x=" +
                    std::to_string(worst_x));
    }
    {
        // [[0, W2],[W1, 0]] is n x 2n; assemble literally.
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(sys.n, 2 * sys.n);
        full.topRightCorner(sys.n / 2, sys.n) = sys.W2;
        full.bottomLeftCorner(sys.n / 2, sys.n) = sys.W1;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(full);
        rep.add("rank([[0,W2],[W1,0]]) = n",
                lu.rank() == static_cast<Eigen::Index>(sys.n),
                "rank " + std::to_string(lu.rank()));
    }
    {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(detail::stacked_boundary(sys));
        rep.add("rank([W1;Wt1]) = n", lu.rank() == static_cast<Eigen::Index>(sys.n),
                "rank " + std::to_string(lu.rank()));
    }
    {
        const Eigen::MatrixXd sym_port =
            sys.W1.transpose() * sys.Wt1 + sys.Wt1.transpose() * sys.W1;
        const double err = (sym_port - sys.P1).cwiseAbs().maxCoeff();
        rep.add("W1'Wt1 + Wt1'W1 = P1", err <= tol, "max deviation " +
                                                       std::to_string(err));
        const double literal_err =
            (sys.W1.transpose() * sys.Wt1 - sys.P1).cwiseAbs().maxCoeff();
        rep.add("W1'Wt1 = P1 (literal form)", literal_err <= tol,
                "max deviation " + std::to_string(literal_err) +
                    "; informational only",
                /*warning_only=*/true);
    }
    return rep;
}

/// Total energy (1/2) integral of z'Lz via composite trapezoid on z.grid.
inline double energy(const PHSystem& sys, const StateField& z) {
    detail::check_system_shapes(sys);
    if (z.grid.size() < 2 || z.grid.size() != z.values.size())
        throw std::invalid_argument("state field grid/values mismatch");
    if (std::abs(z.grid.front() - sys.a) > 1e-12 * (sys.b - sys.a) ||
        std::abs(z.grid.back() - sys.b) > 1e-12 * (sys.b - sys.a))
        throw std::invalid_argument("state field grid does not span [a,b]");
    double total = 0.0;
    std::vector<double> density(z.grid.size());
    for (std::size_t i = 0; i < z.grid.size(); ++i) {
        if (z.values[i].size() != sys.n)
            throw std::invalid_argument("state vector has wrong dimension");
        density[i] = z.values[i].dot(sys.L.eval(z.grid[i]) * z.values[i]);
    }
    for (std::size_t i = 0; i + 1 < z.grid.size(); ++i)
        total += 0.5 * (z.grid[i + 1] - z.grid[i]) * (density[i] + density[i + 1]);
    return 0.5 * total;
}

/// B(x) = dL/dx - L(P0+G0)P1^-1 + P1^-1(P0-G0)L
inline Eigen::MatrixXd compute_B(const PHSystem& sys, double x) {
    if (x < sys.a - 1e-12 || x > sys.b + 1e-12)
        throw std::domain_error("x outside [a,b]");
    const Eigen::MatrixXd Lx = sys.L.eval(x);
    const Eigen::MatrixXd P1inv = sys.P1.inverse();
    return sys.L.derivative(x) - Lx * (sys.P0 + sys.G0) * P1inv +
           P1inv * (sys.P0 - sys.G0) * Lx;
}

/// Psi(x) = [-K; I]' [W1;Wt1]^-T L^-1(x) [W1;Wt1]^-1 [-K; I]
inline Eigen::MatrixXd compute_Psi(const PHSystem& sys, double x) {
    if (x < sys.a - 1e-12 || x > sys.b + 1e-12)
        throw std::domain_error("x outside [a,b]");
    const Eigen::Index h = sys.n / 2;
    const Eigen::MatrixXd S = detail::stacked_boundary(sys);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    if (!lu.isInvertible())
        throw std::logic_error("stacked boundary matrix [W1;Wt1] is singular");
    Eigen::MatrixXd KI(sys.n, h);
    KI.topRows(h) = -sys.K;
    KI.bottomRows(h) = Eigen::MatrixXd::Identity(h, h);
    const Eigen::MatrixXd V = lu.solve(KI);  // [W1;Wt1]^-1 [-K; I]
    const Eigen::MatrixXd Linv = sys.L.eval(x).inverse();
    return V.transpose() * Linv * V;
}

/// A_s(x) = m'(x) L(x) - m(x) B(x)
inline Eigen::MatrixXd compute_As(const PHSystem& sys, const MultiplierSpec& m,
                                  double x) {
    return m.derivative(x) * sys.L.eval(x) - m.eval(x) * compute_B(sys, x);
}

/// Table of extremal scalars, each extremum located by a coarse grid scan
/// plus golden-section refinement.
inline SystemParameters extremal_parameters(const PHSystem& sys,
                                            const MultiplierSpec& m,
                                            int grid_size) {
    detail::check_system_shapes(sys);
    SystemParameters p;
    p.mu_L = scan_maximum(
                 [&](double x) { return detail::max_eig(sys.L.eval(x)); },
                 sys.a, sys.b, grid_size)
                 .value;
    p.eta_L = scan_minimum(
                  [&](double x) { return detail::min_eig(sys.L.eval(x)); },
                  sys.a, sys.b, grid_size)
                  .value;
    p.mu_B = scan_maximum(
                 [&](double x) {
                     const Eigen::MatrixXd B = compute_B(sys, x);
                     return detail::max_eig(0.5 * (B + B.transpose()));
                 },
                 sys.a, sys.b, grid_size)
                 .value;
    p.mu_Psi = scan_maximum(
                   [&](double x) { return detail::max_eig(compute_Psi(sys, x)); },
                   sys.a, sys.b, grid_size)
                   .value;
    p.mu_P1 = std::sqrt(
        detail::max_eig((sys.P1.inverse() * sys.P1.inverse()).eval()));
    p.mu_m = scan_maximum([&](double x) { return m.eval(x); }, sys.a, sys.b,
                          grid_size)
                 .value;
    p.eta_K = detail::min_eig(sys.K);
    return p;
}

/// Internal-dissipation constant c1 of the energy balance: positive only
/// for G0 > 0, zero otherwise. Diagnostic; not used by the certificate.
inline double dissipation_constant_c1(const PHSystem& sys, int grid_size) {
    if (detail::min_eig(0.5 * (sys.G0 + sys.G0.transpose())) <= 0.0) return 0.0;
    const double c1 = scan_minimum(
                          [&](double x) {
                              const Eigen::MatrixXd Lx = sys.L.eval(x);
                              return detail::min_eig(Lx * sys.G0 * Lx) /
                                     detail::max_eig(Lx);
                          },
                          sys.a, sys.b, grid_size)
                          .value;
    return std::max(c1, 0.0);
}

}  // namespace phsdecay
