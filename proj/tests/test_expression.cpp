#include <catch2/catch_amalgamated.hpp>

#include "phsdecay/expression.hpp"

using namespace phsdecay;

static double ev(const std::string& s, double x) {
    return parse_expression(s)->eval(x);
}

static double dev(const std::string& s, double x) {
    return parse_expression(s)->derivative()->eval(x);
}

TEST_CASE("constants and the variable") {
    CHECK(ev("3", 7.0) == 3.0);
    CHECK(ev("2.5e-1", 0.0) == 0.25);
    CHECK(ev("x", 4.5) == 4.5);
    CHECK(ev("-x", 2.0) == -2.0);
}

TEST_CASE("arithmetic and precedence") {
    CHECK(ev("1+2*3", 0.0) == 7.0);
    CHECK(ev("(1+2)*3", 0.0) == 9.0);
    CHECK(ev("10/(10-x)", 2.0) == Catch::Approx(1.25));
    CHECK(ev("2-3-4", 0.0) == -5.0);     // left associative
    CHECK(ev("24/4/2", 0.0) == 3.0);
    CHECK(ev("x^3", 2.0) == 8.0);
    CHECK(ev("2*x^2", 3.0) == 18.0);     // power binds tighter than *
    CHECK(ev("-x^2", 3.0) == -9.0);
}

TEST_CASE("analytic derivatives") {
    CHECK(dev("(10-x)/10", 5.0) == Catch::Approx(-0.1).margin(1e-15));
    // d/dx 10/(10-x) = 10/(10-x)^2
    CHECK(dev("10/(10-x)", 2.0) == Catch::Approx(10.0 / 64.0));
    CHECK(dev("x^3", 2.0) == Catch::Approx(12.0));
    CHECK(dev("x^1", 9.0) == 1.0);
    CHECK(dev("5", 1.0) == 0.0);
    CHECK(dev("x*x+2*x", 3.0) == Catch::Approx(8.0));
}

TEST_CASE("round trip through str") {
    for (const char* s : {"(10-x)/10", "10/(10-x)", "x^2-3*x+1"}) {
        auto e = parse_expression(s);
        auto e2 = parse_expression(e->str());
        for (double x : {0.1, 0.5, 0.9})
            CHECK(e->eval(x) == Catch::Approx(e2->eval(x)).epsilon(1e-15));
    }
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_expression(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_expression("1+"), std::invalid_argument);
    CHECK_THROWS_AS(parse_expression("(1+2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_expression("y"), std::invalid_argument);
    CHECK_THROWS_AS(parse_expression("x^1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_expression("1 2"), std::invalid_argument);
}

TEST_CASE("constant_expression emits round-trippable text") {
    for (double v : {1.0 / 3.0, 0.004, 1.2e-2, -7.25}) {
        auto e = constant_expression(v);
        CHECK(parse_expression(e->str())->eval(0.0) == v);
    }
}
