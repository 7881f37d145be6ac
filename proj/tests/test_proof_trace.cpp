#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "simpcert/proof_trace.hpp"
#include "simpcert/rational.hpp"

#include "helpers.hpp"

using namespace simpcert;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double single_panel_error(const Expr& e, const Interval& iv) {
    const ReferenceIntegral ref = detail::expr_reference(e, iv, Config{});
    auto f = [&](double x) { return eval(e, x); };
    return true_error(f, iv, 1, ref).error_E;
}

void check_interlacing(const ProofTrace& trace) {
    std::vector<double> prev{trace.interval.a(), trace.u, trace.interval.midpoint(), trace.v,
                             trace.interval.b()};
    for (const std::vector<double>& level : trace.rolle_levels) {
        REQUIRE(level.size() == prev.size() - 1);
        for (std::size_t i = 0; i < level.size(); ++i) {
            CHECK(prev[i] < level[i]);
            CHECK(level[i] < prev[i + 1]);
        }
        prev = level;
    }
}

} // namespace

TEST_CASE("build_phi on x^4 over [0,1]") {
    const Expr e = parse("x^4");
    const Interval iv(0.0, 1.0);
    const double E = single_panel_error(e, iv);  // -1/120 via the exact path
    const PhiFunction phi = build_phi(e, iv, E);

    // exact rational oracle: E = -1/120, int xp = -1/120 so lambda = 1;
    // k = (int_0^1/2 (f-q) - lambda int_0^1/2 xp) / int_0^1/2 p
    //   = (1/160 + 1/48 - 7/1920) / (1/64) = (45/1920)*64 = 3/2
    CHECK_THAT(phi.lambda, WithinAbs(1.0, 1e-12));
    CHECK_THAT(phi.k, WithinAbs(1.5, 1e-12));

    // for a quartic, f - q - lambda x p is exactly k p: phi vanishes
    CHECK(phi.identically_zero);
    CHECK_THAT(phi.value(0.33), WithinAbs(0.0, 1e-13));
}

TEST_CASE("build_phi on x^3: phi is identically zero with k = 1") {
    const Expr e = parse("x^3");
    const Interval iv(0.0, 1.0);
    const double E = single_panel_error(e, iv);
    CHECK_THAT(E, WithinAbs(0.0, 1e-15));
    const PhiFunction phi = build_phi(e, iv, E);
    // f - q vanishes at the three nodes and is cubic, hence equals 1 * p
    CHECK_THAT(phi.k, WithinAbs(1.0, 1e-12));
    CHECK_THAT(phi.lambda, WithinAbs(0.0, 1e-12));
    CHECK(phi.identically_zero);
}

TEST_CASE("build_phi on exp over [0,1] against frozen oracles") {
    const Expr e = parse("exp(x)");
    const Interval iv(0.0, 1.0);
    const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
    // high-precision oracle: lambda = E / (-1/120), k from the closed form
    CHECK_THAT(phi.lambda, WithinAbs(0.069518810105728212, 1e-10));
    CHECK_THAT(phi.k, WithinAbs(0.244638036738251644, 1e-10));
    CHECK(!phi.identically_zero);
}

TEST_CASE("phi vanishes at the three nodes for assorted functions") {
    const char* functions[] = {"x^4", "exp(x)", "sin(x)*exp(x)", "1/(1+x^2)", "x^5-2*x"};
    std::mt19937 gen(91);
    for (const char* text : functions) {
        const Expr e = parse(text);
        const Interval iv = testutil::random_interval(gen);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        INFO(text << " on [" << iv.a() << ", " << iv.b() << "]");
        CHECK(std::abs(phi.value(iv.a())) <= 1e-11 * phi.node_scale);
        CHECK(std::abs(phi.value(iv.midpoint())) <= 1e-11 * phi.node_scale);
        CHECK(std::abs(phi.value(iv.b())) <= 1e-11 * phi.node_scale);
    }
}

TEST_CASE("phi is evaluable in jet mode and matches its pieces") {
    const Expr e = parse("exp(x)");
    const Interval iv(0.0, 1.0);
    const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
    for (double x : {0.1, 0.37, 0.62, 0.93}) {
        const Jet4 j = phi.jet(x);
        CHECK_THAT(j.v0, WithinAbs(phi.value(x), 1e-15));
        for (int order = 1; order <= 4; ++order)
            CHECK_THAT(j.deriv(order), WithinAbs(phi.derivative(order, x), 1e-12));
    }
    // phi'''' is f'''' minus the constant 24 lambda
    CHECK_THAT(phi.derivative(4, 0.5),
               WithinAbs(std::exp(0.5) - 24.0 * phi.lambda, 1e-12));
}

TEST_CASE("k well-posedness: int_a^c p = (b-a)^4/64") {
    CHECK(integrate_poly(node_polynomial(Rational(0), Rational(1)), Rational(0),
                         Rational(1, 2)) == Rational(1, 64));
    std::mt19937 gen(92);
    for (int i = 0; i < 50; ++i) {
        const Interval iv = testutil::random_interval(gen);
        const double w = iv.width();
        const double expected = w * w * w * w / 64.0;
        const double got = integrate_poly(node_polynomial(iv), iv.a(), iv.midpoint());
        CHECK_THAT(got, WithinRel(expected, 1e-12));
        CHECK(std::abs(got) >= w * w * w * w / 100.0);  // the solver's guard
    }
}

TEST_CASE("verify_vanishing") {
    SECTION("x^4: all three integrals vanish to 1e-12") {
        const Expr e = parse("x^4");
        const Interval iv(0.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        for (double r : verify_vanishing(phi)) CHECK_THAT(r, WithinAbs(0.0, 1e-12));
    }
    SECTION("exp: all three integrals vanish to 1e-10") {
        const Expr e = parse("exp(x)");
        const Interval iv(0.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        for (double r : verify_vanishing(phi)) CHECK_THAT(r, WithinAbs(0.0, 1e-10));
    }
    SECTION("an inconsistent E shows up as a nonvanishing total integral") {
        // k always zeroes int_a^c phi, so a wrong E surfaces in the other two
        const Expr e = parse("exp(x)");
        const Interval iv(0.0, 1.0);
        const double E_true = single_panel_error(e, iv);
        const double E_wrong = E_true + 0.25;
        const PhiFunction phi = build_phi(e, iv, E_wrong);
        const auto r = verify_vanishing(phi);
        CHECK_THAT(r[0], WithinAbs(0.0, 1e-10));               // forced by k
        CHECK_THAT(r[2], WithinAbs(E_true - E_wrong, 1e-10));  // the discrepancy
        CHECK_THAT(r[1], WithinAbs(r[2] - r[0], 1e-10));
    }
}

TEST_CASE("find_mean_value_zeros") {
    SECTION("degenerate phi returns half midpoints, flagged") {
        const Expr e = parse("x^3");
        const Interval iv(0.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        const MeanValueZeros z = find_mean_value_zeros(phi);
        CHECK(z.u == 0.25);
        CHECK(z.v == 0.75);
        CHECK(z.u_degenerate);
        CHECK(z.v_degenerate);
    }
    SECTION("x^4 degenerates the same way, still inside the halves") {
        const Expr e = parse("x^4");
        const Interval iv(0.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        const MeanValueZeros z = find_mean_value_zeros(phi);
        CHECK(0.0 < z.u);
        CHECK(z.u < 0.5);
        CHECK(0.5 < z.v);
        CHECK(z.v < 1.0);
        CHECK(std::abs(phi.value(z.u)) <= 1e-11 * phi.node_scale);
        CHECK(std::abs(phi.value(z.v)) <= 1e-11 * phi.node_scale);
    }
    SECTION("interior zeros with small phi values for exp") {
        const Expr e = parse("exp(x)");
        const Interval iv(0.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        const MeanValueZeros z = find_mean_value_zeros(phi);
        CHECK(!z.u_degenerate);
        CHECK(!z.v_degenerate);
        CHECK(0.0 < z.u);
        CHECK(z.u < 0.5);
        CHECK(0.5 < z.v);
        CHECK(z.v < 1.0);
        CHECK(std::abs(phi.value(z.u)) <= 1e-11 * phi.node_scale);
        CHECK(std::abs(phi.value(z.v)) <= 1e-11 * phi.node_scale);
    }
    SECTION("even functions about the midpoint give mirrored zeros") {
        const Expr e = parse("cos(x)");
        const Interval iv(-1.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        const MeanValueZeros z = find_mean_value_zeros(phi);
        CHECK_THAT(z.v - iv.midpoint(), WithinAbs(iv.midpoint() - z.u, 1e-9));
    }
    SECTION("a phi with no interior zero is an explicit trace failure") {
        PhiFunction bogus{parse("x"),
                          Polynomial<double>(),
                          Polynomial<double>(),
                          0.0,
                          0.0,
                          Interval(0.0, 1.0),
                          {},
                          std::nullopt,
                          2.0,
                          false};
        bogus.poly_derivs[0] = Polynomial<double>::constant(-1.0);  // phi(x) = x + 1 > 0
        try {
            find_mean_value_zeros(bogus);
            FAIL("expected TraceError");
        } catch (const TraceError& err) {
            CHECK(err.stage() == "mean-value-zeros");
            CHECK(std::string(err.what()).find("contradicts") != std::string::npos);
        }
    }
}

TEST_CASE("rolle_cascade") {
    SECTION("x^4: every level degenerate, xi at the midpoint, residual ~ 0") {
        const Expr e = parse("x^4");
        const Interval iv(0.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        const MeanValueZeros z = find_mean_value_zeros(phi);
        const ProofTrace trace =
            rolle_cascade(phi, {iv.a(), z.u, iv.midpoint(), z.v, iv.b()});
        CHECK(trace.xi == 0.5);
        CHECK_THAT(trace.final_residual, WithinAbs(0.0, 1e-10));
        CHECK(trace.level_degenerate[3]);
        check_interlacing(trace);
    }
    SECTION("x^5: xi = 0.5 and f''''(xi) = 60") {
        const Expr e = parse("x^5");
        const Interval iv(0.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        const MeanValueZeros z = find_mean_value_zeros(phi);
        const ProofTrace trace =
            rolle_cascade(phi, {iv.a(), z.u, iv.midpoint(), z.v, iv.b()});
        CHECK_THAT(trace.xi, WithinAbs(0.5, 1e-8));
        CHECK_THAT(eval_jet4(e, trace.xi).v4, WithinAbs(60.0, 1e-6));
        check_interlacing(trace);
    }
    SECTION("rejects unsorted zeros") {
        const Expr e = parse("x^5");
        const Interval iv(0.0, 1.0);
        const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
        CHECK_THROWS_AS(rolle_cascade(phi, {0.0, 0.6, 0.5, 0.7, 1.0}), TraceError);
    }
}

TEST_CASE("run_trace end to end") {
    SECTION("x^4 on [0,1]") {
        const ProofTrace trace = run_trace(parse("x^4"), Interval(0.0, 1.0));
        CHECK_THAT(trace.k, WithinAbs(1.5, 1e-12));
        CHECK_THAT(trace.lambda, WithinAbs(1.0, 1e-12));
        for (double r : trace.vanishing) CHECK_THAT(r, WithinAbs(0.0, 1e-12));
        CHECK(trace.final_residual <= 1e-10);
        CHECK(trace.phi_identically_zero);
        CHECK_THAT(trace.error_E, WithinAbs(-1.0 / 120.0, 1e-15));
        check_interlacing(trace);
    }
    SECTION("x^3 on [0,1]: fully degenerate") {
        const ProofTrace trace = run_trace(parse("x^3"), Interval(0.0, 1.0));
        CHECK(trace.phi_identically_zero);
        CHECK(trace.zeros_degenerate);
        CHECK(trace.u == 0.25);
        CHECK(trace.v == 0.75);
        CHECK(trace.xi == 0.5);
        CHECK_THAT(trace.final_residual, WithinAbs(0.0, 1e-12));
    }
    SECTION("exp on [0,1]: full nondegenerate 4-3-2-1 cascade") {
        const ProofTrace trace = run_trace(parse("exp(x)"), Interval(0.0, 1.0));
        CHECK(!trace.phi_identically_zero);
        CHECK(!trace.zeros_degenerate);
        for (bool flag : trace.level_degenerate) CHECK(!flag);
        REQUIRE(trace.rolle_levels[0].size() == 4);
        REQUIRE(trace.rolle_levels[1].size() == 3);
        REQUIRE(trace.rolle_levels[2].size() == 2);
        REQUIRE(trace.rolle_levels[3].size() == 1);
        check_interlacing(trace);
        CHECK(trace.final_residual <= 1e-8);
        for (double r : trace.vanishing) CHECK_THAT(r, WithinAbs(0.0, 1e-10));
        // phi'''' = exp - 24 lambda is monotonic: the cascade's xi must be
        // the same point the certificate finds
        CHECK_THAT(trace.xi, WithinAbs(std::log(24.0 * trace.lambda), 1e-7));
    }
    SECTION("sin on [0,pi]: full cascade") {
        const ProofTrace trace = run_trace(parse("sin(x)"), Interval(0.0, std::numbers::pi));
        check_interlacing(trace);
        CHECK(trace.final_residual <= 1e-8);
        CHECK(Interval(0.0, std::numbers::pi).contains_strictly(trace.xi));
    }
    SECTION("trace/certificate agreement on the final identity") {
        const char* functions[] = {"exp(x)", "sin(x)", "x^5", "1/(1+x^2)"};
        for (const char* text : functions) {
            const Expr e = parse(text);
            const Interval iv(0.0, 1.5);
            const ProofTrace trace = run_trace(e, iv);
            const double target = xi_target(trace.error_E, iv);
            INFO(text);
            CHECK(std::abs(eval_jet4(e, trace.xi).v4 - target) <=
                  1e-8 * (1.0 + std::abs(target)));
        }
    }
    SECTION("closure under exactness: cubic expressions give phi == 0") {
        std::mt19937 gen(93);
        for (int i = 0; i < 10; ++i) {
            std::string text = detail::format_shortest(testutil::random_in(gen, -2, 2));
            for (int d = 1; d <= 3; ++d)
                text += " + " + detail::format_shortest(testutil::random_in(gen, -2, 2)) +
                        "*x^" + std::to_string(d);
            const Interval iv = testutil::random_interval(gen);
            const Expr e = parse(text);
            const PhiFunction phi = build_phi(e, iv, single_panel_error(e, iv));
            INFO(text);
            CHECK(phi.identically_zero);
            double max_abs = 0.0;
            for (int j = 0; j <= 1000; ++j) {
                const double x = iv.a() + iv.width() * static_cast<double>(j) / 1000.0;
                max_abs = std::max(max_abs, std::abs(phi.value(x)));
            }
            CHECK(max_abs <= 1e-11 * phi.node_scale);
        }
    }
    SECTION("stage labels on failures") {
        try {
            run_trace(parse("log(x)"), Interval(0.0, 1.0));
            FAIL("expected TraceError");
        } catch (const TraceError& err) {
            CHECK(err.stage() == "reference");
        }
    }
}
