#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "phsdecay/catalog.hpp"
#include "phsdecay/certifier.hpp"

using namespace phsdecay;
using Catch::Approx;

TEST_CASE("check_positivity") {
    SECTION("variable-area string with m = x") {
        const PHSystem sys = wave_variable_area().system;
        const PositivityResult r =
            check_positivity(sys, MultiplierSpec::linear(0.0), 1001);
        CHECK(r.positive);
        CHECK(r.margin > 0.5);
    }

    SECTION("normalized beam with m = x-a fails at x = b") {
        const PHSystem sys = timoshenko_normalized().system;
        const PositivityResult r =
            check_positivity(sys, MultiplierSpec::linear(sys.a), 1001);
        CHECK_FALSE(r.positive);
        CHECK(r.argmin_x == Approx(sys.b).margin(1e-9));
        CHECK(r.margin == Approx(1.0 - std::sqrt(2.0)).epsilon(1e-9));
    }

    SECTION("steep exponential multiplier restores positivity") {
        for (const auto& e : catalog_entries()) {
            INFO(e.name);
            const BetaOptimum bo = optimize_beta(e.system, 0.5, 501);
            const double span = bo.beta_op * (e.system.b - e.system.a);
            if (span < 700.0) {
                const MultiplierSpec m =
                    MultiplierSpec::exponential(1.0, bo.beta_op, e.system.a);
                CHECK(check_positivity(e.system, m, 501).positive);
            } else {
                // m itself overflows double range; A_s = m (beta L - B) is
                // positive iff the scale-free factor is, so check that.
                for (int i = 0; i <= 500; ++i) {
                    const double x = e.system.a +
                                     (e.system.b - e.system.a) * i / 500.0;
                    const Eigen::MatrixXd gap =
                        bo.beta_op * e.system.L.eval(x) -
                        compute_B(e.system, x);
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gap);
                    REQUIRE(es.eigenvalues().minCoeff() > 0.0);
                }
            }
        }
    }
}

TEST_CASE("compute_c") {
    SECTION("A_s = L gives c = 1") {
        const PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        CHECK(compute_c(sys, MultiplierSpec::linear(0.0), 1001) ==
              Approx(1.0).epsilon(1e-12));
    }

    SECTION("variable-area string: c = 8/9") {
        const PHSystem sys = wave_variable_area().system;
        CHECK(compute_c(sys, MultiplierSpec::linear(0.0), 1001) ==
              Approx(8.0 / 9.0).margin(1e-6));
    }

    SECTION("inviscid beam: c = 1 - sqrt(1/10)") {
        const PHSystem sys = timoshenko_inviscid().system;
        const double c = compute_c(sys, MultiplierSpec::linear(0.0), 1001);
        CHECK(c == Approx(0.6837).margin(2e-4));
        CHECK(c == Approx(1.0 - std::sqrt(0.1)).epsilon(1e-9));
    }

    SECTION("positivity failure is a precondition violation") {
        const PHSystem sys = timoshenko_normalized().system;
        CHECK_THROWS_AS(compute_c(sys, MultiplierSpec::linear(sys.a), 1001),
                        std::logic_error);
    }
}

TEST_CASE("epsilon thresholds") {
    SECTION("unit wave") {
        for (double k : {0.5, 1.0, 2.0}) {
            const PHSystem sys = wave_constant(1, 1, k, 0, 1).system;
            const SystemParameters p =
                extremal_parameters(sys, MultiplierSpec::linear(0.0), 1001);
            const auto [e0, e1] = epsilons(p);
            CHECK(e0 == Approx(1.0).epsilon(1e-10));
            CHECK(e1 == Approx(2.0 * k / (k * k + 1.0)).epsilon(1e-10));
        }
    }

    SECTION("variable-area string") {
        const PHSystem sys = wave_variable_area().system;
        const SystemParameters p =
            extremal_parameters(sys, MultiplierSpec::linear(0.0), 1001);
        const auto [e0, e1] = epsilons(p);
        CHECK(e0 == Approx(0.9).epsilon(1e-10));
        CHECK(e1 == Approx(0.8).epsilon(1e-10));
    }

    SECTION("inviscid beam") {
        for (double k : {0.5, 1.0, 3.0}) {
            const PHSystem sys = timoshenko_inviscid(k).system;
            const SystemParameters p =
                extremal_parameters(sys, MultiplierSpec::linear(0.0), 1001);
            const auto [e0, e1] = epsilons(p);
            CHECK(e0 == Approx(1.0 / 25.0).epsilon(1e-10));
            CHECK(e1 ==
                  Approx(100.0 * k / (1250.0 * k * k + 1.0)).epsilon(1e-10));
        }
    }

    SECTION("nonpositive parameters are a domain error") {
        SystemParameters p;
        p.mu_L = p.eta_L = p.mu_Psi = p.mu_P1 = p.mu_m = p.eta_K = 1.0;
        p.eta_K = 0.0;
        CHECK_THROWS_AS(epsilons(p), std::domain_error);
    }
}

TEST_CASE("assemble_certificate") {
    SECTION("unit wave, k=1, xi=1/2: (M, alpha) = (3, 1/3)") {
        const PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        const CertifyResult r =
            assemble_certificate(sys, MultiplierSpec::linear(0.0), 0.5, 1001);
        REQUIRE(r.certified());
        CHECK(r.certificate->M == Approx(3.0).epsilon(1e-9));
        CHECK(r.certificate->alpha == Approx(1.0 / 3.0).epsilon(1e-9));
        CHECK(r.certificate->converged);
    }

    SECTION("variable-area string at xi = 1: alpha = 32/85, with warning") {
        const PHSystem sys = wave_variable_area().system;
        const CertifyResult r =
            assemble_certificate(sys, MultiplierSpec::linear(0.0), 1.0, 1001);
        REQUIRE(r.certified());
        CHECK(r.certificate->alpha == Approx(32.0 / 85.0).epsilon(1e-9));
        CHECK_FALSE(r.certificate->warnings.empty());
    }

    SECTION("inviscid beam at eps = 1/50: M = 3") {
        const PHSystem sys = timoshenko_inviscid().system;
        const CertifyResult r =
            assemble_certificate(sys, MultiplierSpec::linear(0.0), 0.5, 1001);
        REQUIRE(r.certified());
        CHECK(r.certificate->eps == Approx(1.0 / 50.0).epsilon(1e-10));
        CHECK(r.certificate->M == Approx(3.0).epsilon(1e-9));
    }

    SECTION("xi outside (0,1] is a domain error") {
        const PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        const MultiplierSpec m = MultiplierSpec::linear(0.0);
        CHECK_THROWS_AS(assemble_certificate(sys, m, 0.0, 101),
                        std::domain_error);
        CHECK_THROWS_AS(assemble_certificate(sys, m, 1.5, 101),
                        std::domain_error);
    }

    SECTION("positivity failure reports the failing x") {
        const PHSystem sys = timoshenko_normalized().system;
        const CertifyResult r =
            assemble_certificate(sys, MultiplierSpec::linear(sys.a), 0.5, 1001);
        CHECK_FALSE(r.certified());
        CHECK(r.positivity.argmin_x == Approx(sys.b).margin(1e-9));
        CHECK(!r.message.empty());
    }
}

TEST_CASE("certificate chain identities hold as stored") {
    for (const auto& e : catalog_entries()) {
        INFO(e.name);
        const CertifyResult r = assemble_certificate(
            e.system, e.recommended_multiplier, e.recommended_xi, 1001);
        REQUIRE(r.certified());
        const Certificate& c = *r.certificate;
        CHECK(c.eps == c.xi * std::min(c.eps0, c.eps1));
        CHECK(c.M == (c.eps0 + c.eps) / (c.eps0 - c.eps));
        CHECK(c.alpha == c.c * c.eps * c.eps0 / (c.eps0 + c.eps));
        CHECK(c.M >= 1.0);
        CHECK(c.alpha > 0.0);
    }
}

TEST_CASE("exponential_alpha") {
    SECTION("unit wave, beta=1, xi=1/2: alpha = k/e/(k^2+k+1)") {
        for (double k : {0.25, 1.0, 4.0}) {
            const PHSystem sys = wave_constant(1, 1, k, 0, 1).system;
            CHECK(exponential_alpha(sys, 1.0, 0.5, 1001) ==
                  Approx(k * std::exp(-1.0) / (k * k + k + 1.0)).epsilon(1e-9));
        }
    }

    SECTION("normalized beam, xi=1/3 at beta_op: alpha near 0.0224") {
        const PHSystem sys = timoshenko_normalized().system;
        const double a =
            exponential_alpha(sys, 1.0 + std::sqrt(2.0), 1.0 / 3.0, 1001);
        CHECK(a == Approx(0.0224).margin(5e-4));
    }

    SECTION("alpha vanishes as beta grows") {
        const PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        CHECK(exponential_alpha(sys, 80.0, 0.5, 101) < 1e-30);
    }

    SECTION("scale invariance in C") {
        for (const auto& e : catalog_entries()) {
            INFO(e.name);
            const double beta = optimize_beta(e.system, 0.5, 501).beta_op;
            const double ref = exponential_alpha(e.system, beta, 0.5, 501, 1.0);
            for (double C : {0.1, 10.0})
                CHECK(exponential_alpha(e.system, beta, 0.5, 501, C) ==
                      Approx(ref).epsilon(1e-12));
        }
    }

    SECTION("beta below the admissible threshold") {
        const PHSystem sys = timoshenko_normalized().system;
        // mu_B/eta_L = sqrt(2) here
        CHECK_THROWS_AS(exponential_alpha(sys, 1.0, 0.5, 101),
                        std::domain_error);
    }
}

TEST_CASE("optimize_beta") {
    SECTION("unit wave: beta_op = 1") {
        const PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        const BetaOptimum r = optimize_beta(sys, 0.5, 1001);
        CHECK(r.beta_op == Approx(1.0).epsilon(1e-10));
        CHECK(r.scan_confirmed);
    }

    SECTION("normalized beam: beta_op = 1+sqrt(2), Table II values") {
        const PHSystem sys = timoshenko_normalized().system;
        const BetaOptimum r = optimize_beta(sys, 0.5, 1001);
        CHECK(r.beta_op == Approx(1.0 + std::sqrt(2.0)).epsilon(1e-9));
        CHECK(r.alpha_op == Approx(0.0298).margin(5e-4));
        CHECK(r.scan_confirmed);

        const CertifyResult cr = assemble_certificate(
            sys, MultiplierSpec::exponential(1.0, r.beta_op, sys.a), 0.4713,
            1001);
        REQUIRE(cr.certified());
        CHECK(cr.certificate->M == Approx(2.783).margin(1e-3));
        CHECK(cr.certificate->alpha == Approx(0.0286).margin(5e-4));
    }

    SECTION("closed form matches the chain on all built-in systems") {
        for (const auto& e : catalog_entries()) {
            INFO(e.name);
            const BetaOptimum r = optimize_beta(e.system, 0.5, 1001);
            CHECK(r.alpha_closed_form ==
                  Approx(r.alpha_op).epsilon(1e-10));
            CHECK(r.cross_check);
        }
    }
}

TEST_CASE("M and alpha increase with xi") {
    const PHSystem sys = wave_constant(1, 1, 2.0, 0, 1).system;
    double prevM = 0.0, prevA = 0.0;
    for (int i = 1; i <= 9; ++i) {
        const CertifyResult r = assemble_certificate(
            sys, MultiplierSpec::linear(0.0), 0.1 * i, 501);
        REQUIRE(r.certified());
        CHECK(r.certificate->M > prevM);
        CHECK(r.certificate->alpha > prevA);
        prevM = r.certificate->M;
        prevA = r.certificate->alpha;
    }
}

TEST_CASE("compute_c is sound and maximal on all built-in systems") {
    std::mt19937 rng(7);
    for (const auto& e : catalog_entries()) {
        INFO(e.name);
        const PHSystem& sys = e.system;
        const MultiplierSpec& m = e.recommended_multiplier;
        const double c = compute_c(sys, m, 1001);
        std::uniform_real_distribution<double> ux(sys.a, sys.b);
        double worst_excess = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 1000; ++t) {
            const double x = ux(rng);
            const Eigen::MatrixXd Lx = sys.L.eval(x);
            const Eigen::MatrixXd gap = compute_As(sys, m, x) - c * Lx;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gap);
            const double lo = es.eigenvalues().minCoeff();
            CHECK(lo >= -1e-8 * Lx.norm());
        }
        // c + 1e-3 must fail somewhere. The violation window can be tiny
        // (e.g. a boundary layer near x = a), so probe a uniform grid that
        // includes both endpoints rather than random draws.
        for (int t = 0; t <= 1000; ++t) {
            const double x = sys.a + (sys.b - sys.a) * t / 1000.0;
            const Eigen::MatrixXd gap2 =
                compute_As(sys, m, x) - (c + 1e-3) * sys.L.eval(x);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(gap2);
            worst_excess = std::min(worst_excess, es2.eigenvalues().minCoeff());
        }
        CHECK(worst_excess < 0.0);
    }
}

TEST_CASE("affine_multiplier_check") {
    SECTION("non-affine L falls back to the numeric path, c = 8/9") {
        const PHSystem sys = wave_variable_area().system;
        const AffineCheckResult r = affine_multiplier_check(sys, 1.0, 0.0, 1001);
        CHECK_FALSE(r.used_affine_condition);
        CHECK(r.usable);
        CHECK(r.c == Approx(8.0 / 9.0).margin(1e-6));
    }

    SECTION("constant L with q=1, d=-a reduces to m = x-a") {
        PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        sys.a = 1.0;
        sys.b = 2.0;
        const AffineCheckResult r =
            affine_multiplier_check(sys, 1.0, -sys.a, 1001);
        CHECK(r.used_affine_condition);
        CHECK(r.usable);
        CHECK(r.c == Approx(1.0).epsilon(1e-9));
    }

    SECTION("q/d below the slope threshold is rejected") {
        // L(x) = (1+x) I on [1,2]: slope I, intercept I, threshold
        // mu_L/eta_D = 1; q/d = 1/2 must fail (A_s = (q-d) I < 0 here).
        PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        sys.a = 1.0;
        sys.b = 2.0;
        sys.L = CoefficientFunction::from_expressions(
            {{"1+x", "0"}, {"0", "1+x"}});
        const AffineCheckResult r =
            affine_multiplier_check(sys, 1.0, 2.0, 1001);
        CHECK(r.used_affine_condition);
        CHECK_FALSE(r.usable);
        // brute-force confirmation on a scan
        bool indefinite = false;
        for (int i = 0; i <= 100; ++i) {
            const double x = 1.0 + i / 100.0;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                compute_As(sys, MultiplierSpec::affine(1.0, 2.0), x));
            if (es.eigenvalues().minCoeff() < 0.0) indefinite = true;
        }
        CHECK(indefinite);
    }

    SECTION("d = 0 on the affine path with a != 0 is a domain error") {
        PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        sys.a = 1.0;
        sys.b = 2.0;
        CHECK_THROWS_AS(affine_multiplier_check(sys, 1.0, 0.0, 101),
                        std::domain_error);
    }
}

TEST_CASE("best_certificate") {
    SECTION("unit wave: the linear family wins") {
        const PHSystem sys = wave_constant(1, 1, 1, 0, 1).system;
        const BestCertificateResult r = best_certificate(sys, 0.5, {}, 1001);
        REQUIRE(r.certificate);
        CHECK(r.certificate->multiplier.family() == MultiplierFamily::Linear);
        CHECK(r.certificate->alpha == Approx(1.0 / 3.0).epsilon(1e-9));
        CHECK(r.certificate->alpha > std::exp(-1.0) / 3.0);
    }

    SECTION("normalized beam: exponential wins, linear fails positivity") {
        const PHSystem sys = timoshenko_normalized().system;
        const BestCertificateResult r = best_certificate(sys, 0.5, {}, 1001);
        REQUIRE(r.certificate);
        CHECK(r.certificate->multiplier.family() ==
              MultiplierFamily::Exponential);
        bool linear_failed = false;
        for (const auto& f : r.failures)
            if (f.family == MultiplierFamily::Linear) linear_failed = true;
        CHECK(linear_failed);
    }

    SECTION("inviscid beam: linear is not improved by exponential") {
        const PHSystem sys = timoshenko_inviscid().system;
        const BestCertificateResult r = best_certificate(sys, 0.5, {}, 1001);
        REQUIRE(r.certificate);
        CHECK(r.certificate->multiplier.family() == MultiplierFamily::Linear);
        const double exp_alpha = exponential_alpha(
            sys, optimize_beta(sys, 0.5, 1001).beta_op, 0.5, 1001);
        CHECK(r.certificate->alpha >= exp_alpha);
    }

    SECTION("uncertifiable request carries the failure locations") {
        const PHSystem sys = timoshenko_normalized().system;
        const BestCertificateResult r =
            best_certificate(sys, 0.5, {MultiplierFamily::Linear}, 501);
        CHECK_FALSE(r.certificate);
        REQUIRE_FALSE(r.failures.empty());
        CHECK(r.failures.front().failing_x == Approx(sys.b).margin(1e-6));
    }
}

TEST_CASE("grid convergence flag") {
    for (const auto& e : catalog_entries()) {
        INFO(e.name);
        const CertifyResult r = assemble_certificate(
            e.system, e.recommended_multiplier, e.recommended_xi, 1001);
        REQUIRE(r.certified());
        CHECK(r.certificate->converged);
        CHECK(r.certificate->grid_size == 1001);
    }
}
