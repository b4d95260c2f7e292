#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "phsdecay/catalog.hpp"
#include "phsdecay/certifier.hpp"

using namespace phsdecay;
using Catch::Approx;

TEST_CASE("catalog entries are well formed") {
    const auto entries = catalog_entries();
    REQUIRE(entries.size() == 4);
    std::set<std::string> names;
    for (const auto& e : entries) {
        INFO(e.name);
        names.insert(e.name);
        CHECK_FALSE(e.description.empty());
        CHECK_FALSE(e.expected.empty());
        CHECK(validate_system(e.system, 101).passed);
        CHECK(e.recommended_multiplier.positive_on(e.system.a, e.system.b));
        CHECK(e.recommended_xi > 0.0);
        CHECK(e.recommended_xi <= 1.0);
    }
    CHECK(names.size() == 4);
}

TEST_CASE("lookup by name") {
    CHECK(find_catalog_entry("wave-unit").system.n == 2);
    CHECK(find_catalog_entry("timoshenko-normalized").system.n == 4);
    CHECK_THROWS_AS(find_catalog_entry("nope"), std::invalid_argument);
}

TEST_CASE("wave_constant matrices") {
    const PHSystem s = wave_constant(3.0, 2.0, 0.7, -1.0, 2.0).system;
    CHECK(s.P1(0, 1) == 1.0);
    CHECK(s.P1(0, 0) == 0.0);
    CHECK(s.P0.norm() == 0.0);
    CHECK(s.G0.norm() == 0.0);
    CHECK(s.L.eval(0.0)(0, 0) == Approx(3.0));
    CHECK(s.L.eval(0.0)(1, 1) == Approx(0.5));
    CHECK((s.W1 - Eigen::MatrixXd{{1.0, 0.0}}).norm() == 0.0);
    CHECK((s.Wt1 - Eigen::MatrixXd{{0.0, 1.0}}).norm() == 0.0);
    CHECK(s.K(0, 0) == 0.7);

    CHECK_THROWS_AS(wave_constant(0.0, 1, 1, 0, 1), std::domain_error);
    CHECK_THROWS_AS(wave_constant(1, -1, 1, 0, 1), std::domain_error);
    CHECK_THROWS_AS(wave_constant(1, 1, 0, 0, 1), std::domain_error);
    CHECK_THROWS_AS(wave_constant(1, 1, 1, 1, 1), std::domain_error);
}

TEST_CASE("closed-form wave certificate over a range of gains") {
    for (double k : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const PHSystem sys = wave_constant(1, 1, k, 0, 1).system;
        const CertifyResult r =
            assemble_certificate(sys, MultiplierSpec::linear(0.0), 0.5, 1001);
        REQUIRE(r.certified());
        CHECK(r.certificate->alpha ==
              Approx(k / (k * k + k + 1.0)).epsilon(1e-9));
        CHECK(r.certificate->M ==
              Approx((k * k + k + 1.0) / (k * k - k + 1.0)).epsilon(1e-9));
    }
}

TEST_CASE("the unit gain maximizes the linear-multiplier rate") {
    auto rate = [](double k) { return k / (k * k + k + 1.0); };
    for (double k : {0.3, 0.9, 1.1, 3.0}) CHECK(rate(k) < rate(1.0));
}

TEST_CASE("timoshenko structure") {
    TimoshenkoParams p;
    p.rho = 0.2;
    p.iota_rho = 2e-2;
    p.kappa = 4e-3;
    p.ei = 1.2e-2;
    const PHSystem s = timoshenko(p, 1.0, 2.0, 0.0, 0.1).system;
    CHECK(s.n == 4);
    CHECK(s.P1(0, 2) == 1.0);
    CHECK(s.P1(3, 1) == 1.0);
    CHECK(s.P0(1, 2) == 1.0);
    CHECK(s.P0(2, 1) == -1.0);
    CHECK(s.G0.norm() == 0.0);
    const Eigen::MatrixXd L = s.L.eval(0.05);
    CHECK(L(0, 0) == Approx(5.0));
    CHECK(L(1, 1) == Approx(50.0));
    CHECK(L(2, 2) == Approx(1.0 / 250.0));
    CHECK(L(3, 3) == Approx(1.2e-2));
    CHECK(s.K(0, 0) == 1.0);
    CHECK(s.K(1, 1) == 2.0);

    CHECK_THROWS_AS(timoshenko(TimoshenkoParams{}, 0.0, 1.0, 0, 1),
                    std::domain_error);
    TimoshenkoParams bad;
    bad.kappa = -1.0;
    CHECK_THROWS_AS(timoshenko(bad, 1.0, 1.0, 0, 1), std::domain_error);
    TimoshenkoParams neg_damp;
    neg_damp.gamma = -0.5;
    CHECK_THROWS_AS(timoshenko(neg_damp, 1.0, 1.0, 0, 1), std::domain_error);
}

TEST_CASE("normalized beam entry certifies with its recommended multiplier") {
    const CatalogEntry e = find_catalog_entry("timoshenko-normalized");
    CHECK(e.recommended_multiplier.family() == MultiplierFamily::Exponential);
    CHECK(e.recommended_multiplier.param1() ==
          Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
    const CertifyResult r = assemble_certificate(
        e.system, e.recommended_multiplier, e.recommended_xi, 1001);
    REQUIRE(r.certified());
    CHECK(r.certificate->M == Approx(3.0).margin(1e-3));
    CHECK(r.certificate->alpha == Approx(0.029785).margin(5e-4));
}
