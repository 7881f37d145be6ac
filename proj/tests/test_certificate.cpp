#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "simpcert/certificate.hpp"

#include "helpers.hpp"

using namespace simpcert;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Analytic single-panel error for exp on [0,1]: (e-1) - (1 + 4 sqrt(e) + e)/6.
double exp_error_01() {
    return (std::exp(1.0) - 1.0) -
           (1.0 + 4.0 * std::exp(0.5) + std::exp(1.0)) / 6.0;
}

} // namespace

TEST_CASE("xi_target") {
    SECTION("quartic case: E = -1/120 on [0,1] needs f'''' = 24") {
        CHECK_THAT(xi_target(-1.0 / 120.0, Interval(0.0, 1.0)), WithinRel(24.0, 1e-13));
    }
    SECTION("zero error needs zero fourth derivative") {
        CHECK(xi_target(0.0, Interval(0.0, 1.0)) == 0.0);
        CHECK(xi_target(0.0, Interval(-2.0, 3.0)) == 0.0);
    }
    SECTION("quintic case: E = -1/48 on [0,1] needs f'''' = 60") {
        CHECK_THAT(xi_target(-1.0 / 48.0, Interval(0.0, 1.0)), WithinRel(60.0, 1e-13));
    }
    SECTION("both routes agree to 1e-12 relative on random inputs") {
        std::mt19937 gen(81);
        for (int i = 0; i < 100; ++i) {
            const Interval iv = testutil::random_interval(gen);
            const double E = testutil::random_in(gen, -2.0, 2.0);
            const double w = iv.width();
            const double closed = -2880.0 * E / (w * w * w * w * w);
            // the internal cross-check at 1e-12 must not fire, and the
            // returned value must match the closed form
            CHECK_THAT(xi_target(E, iv), WithinAbs(closed, 1e-12 * (1.0 + std::abs(closed))));
        }
    }
}

TEST_CASE("find_xi") {
    SECTION("f = x^5: 120 xi = 60 puts xi at 1/2") {
        auto f4 = [](double x) { return 120.0 * x; };
        const ErrorCertificate cert = find_xi(f4, 60.0, Interval(0.0, 1.0), 1e-10);
        CHECK_THAT(cert.xi, WithinAbs(0.5, 1e-10));
        CHECK(!cert.degenerate);
        CHECK(cert.residual <= 1e-10 * 61.0);
    }
    SECTION("constant fourth derivative degenerates to the midpoint") {
        auto f4 = [](double) { return 24.0; };
        const ErrorCertificate cert = find_xi(f4, 24.0, Interval(0.0, 1.0), 1e-10);
        CHECK(cert.degenerate);
        CHECK(cert.xi == 0.5);
        CHECK(cert.residual == 0.0);
    }
    SECTION("exp: xi is the log of the target") {
        const double target = -2880.0 * exp_error_01();
        auto f4 = [](double x) { return std::exp(x); };
        const ErrorCertificate cert = find_xi(f4, target, Interval(0.0, 1.0), 1e-10);
        CHECK_THAT(cert.xi, WithinAbs(std::log(target), 1e-9));
        CHECK(cert.residual <= 1e-10 * (1.0 + target));
    }
    SECTION("unreachable target is an explicit failure with diagnostics") {
        auto f4 = [](double x) { return std::exp(x); };  // range (1, e) on (0,1)
        try {
            find_xi(f4, 999.0, Interval(0.0, 1.0), 1e-10);
            FAIL("expected NumericError");
        } catch (const NumericError& err) {
            const std::string what = err.what();
            CHECK(what.find("sampled f'''' range") != std::string::npos);
            CHECK(what.find("inconsistent") != std::string::npos);
        }
    }
    SECTION("leftmost root wins when several exist") {
        // f4 - target crosses zero at 0.25, 0.5, 0.75
        auto f4 = [](double x) {
            return std::sin(4.0 * std::numbers::pi * x);
        };
        const ErrorCertificate cert = find_xi(f4, 0.0, Interval(0.0, 1.0), 1e-12);
        CHECK(cert.xi < 0.3);
    }
}

TEST_CASE("certify_single") {
    SECTION("x^4 on [0,1]: degenerate certificate with target 24") {
        const auto out = certify_single(parse("x^4"), Interval(0.0, 1.0), 1e-10);
        CHECK(out.certificate.degenerate);
        CHECK_THAT(out.certificate.target, WithinRel(24.0, 1e-12));
        CHECK(out.certificate.xi == 0.5);
        CHECK_THAT(out.quadrature.error_E, WithinAbs(-1.0 / 120.0, 1e-15));
        CHECK(out.quadrature.reference == 0.2);  // exact polynomial path
    }
    SECTION("x^3 on [0,1]: zero error, zero target, degenerate") {
        const auto out = certify_single(parse("x^3"), Interval(0.0, 1.0), 1e-10);
        CHECK_THAT(out.quadrature.error_E, WithinAbs(0.0, 1e-15));
        CHECK_THAT(out.certificate.target, WithinAbs(0.0, 1e-12));
        CHECK(out.certificate.degenerate);
    }
    SECTION("sin on [0,pi]: E = 2 - 2pi/3 and an interior xi") {
        const double pi = std::numbers::pi;
        const auto out = certify_single(parse("sin(x)"), Interval(0.0, pi), 1e-10);
        const double expected_E = 2.0 - 2.0 * pi / 3.0;  // integral 2, rule (pi/6)(0+4+0)
        CHECK_THAT(out.quadrature.error_E, WithinAbs(expected_E, 1e-12));
        const double target = -2880.0 * expected_E / std::pow(pi, 5);
        CHECK_THAT(out.certificate.target, WithinAbs(target, 1e-10));
        // leftmost solution of sin(xi) = target
        CHECK_THAT(out.certificate.xi, WithinAbs(std::asin(target), 1e-7));
        CHECK(out.certificate.interval.contains_strictly(out.certificate.xi));
        CHECK(out.certificate.residual <= 1e-9 * (1.0 + std::abs(target)));
    }
    SECTION("exp on [0,1]: xi = ln(-2880 E)") {
        const auto out = certify_single(parse("exp(x)"), Interval(0.0, 1.0), 1e-10);
        CHECK_THAT(out.quadrature.error_E, WithinAbs(exp_error_01(), 1e-13));
        CHECK_THAT(out.certificate.xi, WithinAbs(std::log(-2880.0 * exp_error_01()), 1e-9));
        CHECK(out.certificate.residual <= 1e-9 * (1.0 + out.certificate.target));
        CHECK(!out.certificate.degenerate);
    }
    SECTION("stage-labeled failure propagation") {
        Config cfg;
        cfg.max_panel_exponent = 10;
        try {
            certify_single(parse("sqrt(sqrt(x^2))"), Interval(-1.0, 1.0), 1e-10, cfg);
            FAIL("expected NumericError");
        } catch (const NumericError& err) {
            CHECK(std::string(err.what()).rfind("reference:", 0) == 0);
        }
    }
}

TEST_CASE("certificate consistency identity") {
    // -f''''(xi) (b-a)^5 / 2880 reproduces E at the certified point
    struct Case {
        const char* text;
        Interval iv;
    };
    const Case cases[] = {
        {"x^5", Interval(0.0, 1.0)},
        {"exp(x)", Interval(0.0, 1.0)},
        {"sin(x)", Interval(0.0, std::numbers::pi)},
        {"1/(1+x^2)", Interval(-1.0, 2.0)},
        {"exp(x)*cos(x)", Interval(-0.5, 1.5)},
    };
    for (const Case& c : cases) {
        const Expr e = parse(c.text);
        const auto out = certify_single(e, c.iv, 1e-10);
        const double w = c.iv.width();
        const double w5 = w * w * w * w * w;
        const double reproduced = -eval_jet4(e, out.certificate.xi).v4 * w5 / 2880.0;
        INFO(c.text);
        CHECK_THAT(reproduced,
                   WithinAbs(out.quadrature.error_E,
                             1e-10 * (1.0 + std::abs(out.certificate.target)) * w5 / 2880.0 +
                                 1e-15));
        CHECK(c.iv.contains_strictly(out.certificate.xi));
    }
}

TEST_CASE("affine covariance") {
    // g(y) = f(2y - 1) maps [0,1] data onto [0.5,1]; the transformed
    // certificate must be valid in its own right and E scales by 1/s = 1/2.
    const auto base = certify_single(parse("exp(x)"), Interval(0.0, 1.0), 1e-10);
    const auto mapped = certify_single(parse("exp(2*x-1)"), Interval(0.5, 1.0), 1e-10);
    CHECK(mapped.certificate.interval.contains_strictly(mapped.certificate.xi));
    CHECK(mapped.certificate.residual <=
          1e-9 * (1.0 + std::abs(mapped.certificate.target)));
    CHECK_THAT(mapped.quadrature.error_E, WithinAbs(base.quadrature.error_E / 2.0, 1e-13));
}

TEST_CASE("certify_composite") {
    SECTION("x^4 with 2 panels: all targets 24, degenerate global certificate") {
        const auto out = certify_composite(parse("x^4"), Interval(0.0, 1.0), 2, 1e-10);
        REQUIRE(out.certificate.per_panel.size() == 2);
        for (const ErrorCertificate& cert : out.certificate.per_panel) {
            CHECK_THAT(cert.target, WithinRel(24.0, 1e-9));
            CHECK(cert.degenerate);
        }
        CHECK_THAT(out.certificate.mean_target(), WithinRel(24.0, 1e-9));
        CHECK(out.certificate.global.degenerate);
    }
    SECTION("x^5 with 2 panels: panel midpoints, global center") {
        const auto out = certify_composite(parse("x^5"), Interval(0.0, 1.0), 2, 1e-10);
        REQUIRE(out.certificate.per_panel.size() == 2);
        // f'''' = 120x is linear, so each panel's mean-value point is its
        // midpoint and the global one is the overall center
        CHECK_THAT(out.certificate.per_panel[0].xi, WithinAbs(0.25, 1e-9));
        CHECK_THAT(out.certificate.per_panel[1].xi, WithinAbs(0.75, 1e-9));
        CHECK_THAT(out.certificate.global_xi(), WithinAbs(0.5, 1e-9));
    }
    SECTION("exp with 4 panels: valid global certificate") {
        const auto out = certify_composite(parse("exp(x)"), Interval(0.0, 1.0), 4, 1e-10);
        const ErrorCertificate& g = out.certificate.global;
        CHECK(Interval(0.0, 1.0).contains_strictly(g.xi));
        CHECK(g.residual <= 1e-9 * (1.0 + std::abs(g.target)));
        CHECK(out.quadrature.panels == 4);

        // panel errors reconstructed from the targets sum to the total error
        const double h = 0.25;
        const double h5 = h * h * h * h * h;
        double sum = 0.0;
        for (const ErrorCertificate& cert : out.certificate.per_panel)
            sum += -cert.target * h5 / 2880.0;
        CHECK_THAT(sum, WithinAbs(out.quadrature.error_E, 1e-13));
    }
    SECTION("panels=1 composite matches certify_single") {
        const auto composite = certify_composite(parse("exp(x)"), Interval(0.0, 1.0), 1, 1e-10);
        const auto single = certify_single(parse("exp(x)"), Interval(0.0, 1.0), 1e-10);
        CHECK(composite.certificate.per_panel.size() == 1);
        CHECK_THAT(composite.certificate.per_panel[0].xi,
                   WithinAbs(single.certificate.xi, 1e-12));
        CHECK_THAT(composite.quadrature.error_E,
                   WithinAbs(single.quadrature.error_E, 1e-16));
    }
}

TEST_CASE("certificates across functions and intervals") {
    // the error identity promises an interior xi for every smooth f; exercise
    // a grid of functions and intervals and demand valid certificates
    const char* functions[] = {"x^5", "sin(x)", "exp(x)", "1/(1+x^2)"};
    const Interval intervals[] = {Interval(0.0, 1.0), Interval(-1.0, 1.5), Interval(0.3, 2.6)};
    for (const char* text : functions) {
        const Expr e = parse(text);
        for (const Interval& iv : intervals) {
            const auto out = certify_single(e, iv, 1e-10);
            INFO(text << " on [" << iv.a() << ", " << iv.b() << "]");
            CHECK(iv.contains_strictly(out.certificate.xi));
            CHECK(out.certificate.residual <=
                  1e-9 * (1.0 + std::abs(out.certificate.target)));
            // interior with at least one grid cell of margin
            const double cell = iv.width() / (Config{}.xi_grid_samples + 1.0);
            CHECK(out.certificate.xi >= iv.a() + cell * (1.0 - 1e-12));
            CHECK(out.certificate.xi <= iv.b() - cell * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("shared expressions evaluate safely from concurrent threads") {
    const Expr e = parse("exp(x)*sin(x)+1/(2+x)");
    double expected[4];
    for (int t = 0; t < 4; ++t) expected[t] = eval(e, 0.1 + 0.3 * t);
    std::array<std::atomic<bool>, 4> ok{};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            bool good = true;
            const double x = 0.1 + 0.3 * t;
            for (int i = 0; i < 2000; ++i) {
                if (eval(e, x) != expected[t]) good = false;
                if (eval_jet4(e, x).v0 != expected[t]) good = false;
            }
            ok[static_cast<std::size_t>(t)] = good;
        });
    }
    for (std::thread& th : threads) th.join();
    for (const auto& flag : ok) CHECK(flag.load());
}
