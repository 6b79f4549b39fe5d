#include <cmath>

#include <doctest.h>

#include "freefront/errors.hpp"
#include "freefront/expression.hpp"
#include "freefront/field_model.hpp"
#include "oracles.hpp"

using freefront::Expression;

TEST_CASE("precedence and associativity follow the conventional grammar") {
    CHECK(Expression::parse("2+3*4").evaluate(0, 0) == doctest::Approx(14.0).epsilon(1e-15));
    CHECK(Expression::parse("2*3+4").evaluate(0, 0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(Expression::parse("2^3^2").evaluate(0, 0) == doctest::Approx(512.0).epsilon(1e-15));
    CHECK(Expression::parse("(2^3)^2").evaluate(0, 0) == doctest::Approx(64.0).epsilon(1e-15));
    CHECK(Expression::parse("-2^2").evaluate(0, 0) == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(Expression::parse("(-2)^2").evaluate(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(Expression::parse("2-3-4").evaluate(0, 0) == doctest::Approx(-5.0).epsilon(1e-15));
    CHECK(Expression::parse("12/3/2").evaluate(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(Expression::parse("-x^2").evaluate(0, 3) == doctest::Approx(-9.0).epsilon(1e-15));
    CHECK(Expression::parse(" 1\t- x * exp( -x ^ 2 ) ").evaluate(0, 0) == 1.0);
}

TEST_CASE("band formula evaluates to the known values") {
    const Expression e = Expression::parse("1 - x*exp(-x^2)");
    CHECK(e.evaluate(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.evaluate(0.0, 1.0) == doctest::Approx(oracles::kOneMinusInvE).epsilon(1e-14));
}

TEST_CASE("integer powers are exact, general powers go through exp/log") {
    CHECK(Expression::parse("x^8").evaluate(0, 3) == 6561.0);
    CHECK(Expression::parse("x^-2").evaluate(0, 2) == 0.25);
    CHECK(Expression::parse("x^0").evaluate(0, 7) == 1.0);
    CHECK(Expression::parse("x^0.5").evaluate(0, 9) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(Expression::parse("x^-1").evaluate(0, 0), freefront::ExpressionEvalError);
    CHECK_THROWS_AS(Expression::parse("(0-2)^0.5").evaluate(0, 0),
                    freefront::ExpressionEvalError);
}

TEST_CASE("function calls cover the whitelist with checked arity") {
    CHECK(Expression::parse("min(t, x)").evaluate(2, 3) == 2.0);
    CHECK(Expression::parse("max(t, x)").evaluate(2, 3) == 3.0);
    CHECK(Expression::parse("abs(0-3)").evaluate(0, 0) == 3.0);
    CHECK(Expression::parse("sqrt(x)").evaluate(0, 16) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(Expression::parse("sin(0)").evaluate(0, 0) == 0.0);
    CHECK(Expression::parse("cos(0)").evaluate(0, 0) == 1.0);
    CHECK_THROWS_AS(Expression::parse("min(1)"), freefront::ExpressionSyntaxError);
    CHECK_THROWS_AS(Expression::parse("exp(1, 2)"), freefront::ExpressionSyntaxError);
    CHECK_THROWS_AS(Expression::parse("log(1)"), freefront::UnknownIdentifierError);
}

TEST_CASE("syntax errors carry the byte offset of the fault") {
    try {
        Expression::parse("2*(t");
        FAIL("expected a syntax error");
    } catch (const freefront::ExpressionSyntaxError& e) {
        CHECK(e.offset == 4);
    }
    try {
        Expression::parse("y + 1");
        FAIL("expected an unknown identifier error");
    } catch (const freefront::UnknownIdentifierError& e) {
        CHECK(e.offset == 0);
    }
}

TEST_CASE("parsing is total: malformed input throws, never aborts") {
    const char* bad[] = {"", ")", "1+", "((1)", "1 2", "*3", "min(,)", "1..2", "t t", "^2"};
    for (const char* text : bad)
        CHECK_THROWS_AS(Expression::parse(text), freefront::ExpressionSyntaxError);
    CHECK_THROWS_AS(Expression::parse("foo(2)"), freefront::UnknownIdentifierError);
    CHECK_THROWS_AS(Expression::parse("t + zz"), freefront::UnknownIdentifierError);
}

TEST_CASE("evaluation faults are errors, not silent non-finite values") {
    CHECK_THROWS_AS(Expression::parse("1/x").evaluate(0, 0), freefront::ExpressionEvalError);
    CHECK_THROWS_AS(Expression::parse("sqrt(0-1)").evaluate(0, 0),
                    freefront::ExpressionEvalError);
    CHECK_THROWS_AS(Expression::parse("exp(x)").evaluate(0, 1000.0),
                    freefront::ExpressionEvalError);
    try {
        Expression::parse("1 + 1/(x - 2)").evaluate(0, 2);
        FAIL("expected an evaluation error");
    } catch (const freefront::ExpressionEvalError& e) {
        CHECK(e.subexpression.find('/') != std::string::npos);
    }
}

TEST_CASE("print and re-parse round-trips the tree") {
    const char* samples[] = {
        "1 - x*exp(-x^2)",
        "min(t, max(x, 0.5)) + sin(t)*cos(x)",
        "-(t + x)^3 / 2",
        "1 - 0.05*t - 2*0.5*x*exp(-x^2)",
    };
    for (const char* text : samples) {
        const Expression first = Expression::parse(text);
        const Expression second = Expression::parse(first.to_string());
        CHECK(first.structurally_equal(second));
        CHECK(first.evaluate(0.3, 0.7) == doctest::Approx(second.evaluate(0.3, 0.7)).epsilon(1e-15));
    }
}

TEST_CASE("parsed band formula matches the built-in family to 1e-12") {
    const Expression e = Expression::parse("(1 + 0*t) - 2*0.5*x*exp(-x^2)");
    const freefront::FieldSpec built = freefront::FieldSpec::gauss_band(1.0, 0.0, 0.5);
    for (double x = 0.0; x <= 3.0; x += 0.1)
        for (double t : {0.0, 1.0, 7.5})
            CHECK(e.evaluate(t, x) == doctest::Approx(built.eval(t, x)).epsilon(1e-12));
}
