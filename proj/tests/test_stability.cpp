#include <doctest.h>

#include <cmath>
#include <random>

#include "cdde/presets.hpp"
#include "cdde/reduction.hpp"
#include "cdde/stability.hpp"
#include "oracles.hpp"

using namespace cdde;
using cplx = std::complex<double>;

TEST_CASE("stem-cell equilibrium closed form") {
    ParamMap p = preset_defaults("knauer");
    const double a1 = p.at("a1"), a2 = p.at("a2"), p1 = p.at("p1"), k = p.at("k"),
                 d3 = p.at("d3");
    const auto m = make_preset("knauer");
    const auto eq = find_equilibria(m, 1e-6, 100.0);
    const EquilibriumReport::Root* pos = nullptr;
    for (const auto& r : eq.roots)
        if (r.positive) pos = &r;
    REQUIRE(pos != nullptr);
    CHECK(std::abs(pos->x_star - (2.0 * a1 - 1.0) / k) < 1e-11);
    CHECK(pos->residual <= 1e-12);
    // back-substitution identity for the top compartment
    const double u1 = pos->stage_values[0];
    CHECK(std::abs(d3 * pos->x_star - p1 * (2.0 - a2 / a1) * u1 / (1.0 - a2 / a1)) < 1e-10);
}

TEST_CASE("no positive equilibrium when the downstream branch dominates") {
    const auto m = make_preset("knauer", {{"a2", 0.95}});  // a2 >= a1 = 0.9
    const auto eq = find_equilibria(m, 1e-6, 100.0);
    for (const auto& r : eq.roots) CHECK_FALSE(r.positive);
    CHECK_FALSE(eq.existence_flags.empty());
}

TEST_CASE("negative-feedback loop equilibrium") {
    const auto m = make_preset("goodwin");
    const auto eq = find_equilibria(m, 1e-6, 10.0);
    REQUIRE_FALSE(eq.roots.empty());
    const double xs = eq.roots.back().x_star;
    // x = 1 / (1 + x^2) at unit parameters
    CHECK(xs * (1.0 + xs * xs) == doctest::Approx(1.0).epsilon(1e-10));
    for (double v : eq.roots.back().stage_values) CHECK(v == doctest::Approx(xs));
}

TEST_CASE("equilibrium composition on randomized linear chains") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> par(0.3, 2.0);
    std::uniform_int_distribution<int> len(2, 5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = len(rng);
        std::vector<Stage> st(n);
        std::vector<double> alpha(n), mu(n);
        for (int i = 0; i < n; ++i) {
            alpha[i] = par(rng);
            mu[i] = par(rng);
            st[i].feedback = FeedbackFn::linear(alpha[i]);
            st[i].clearance = StateFn::constant(mu[i]);
        }
        const CyclicModel m{st};
        const double xs = par(rng);
        const auto sv = equilibrium_stage_values(m, xs);
        CHECK(sv[n - 1] == doctest::Approx(xs));
        double expect = xs;
        for (int i = 0; i + 1 < n; ++i) {
            expect = alpha[i] * expect / mu[i];
            CHECK(sv[i] == doctest::Approx(expect).epsilon(1e-12));
        }
        // quadrature of the same composition
        const auto psi = Trajectory::constant(-80.0, 0.0, 1e-3, {xs});
        CHECK(nested_G(m, static_cast<std::size_t>(n) - 1, psi, 0.0) ==
              doctest::Approx(expect).epsilon(1e-5));
    }
}

TEST_CASE("characteristic polynomial and hurwitz test") {
    const auto c = char_poly({{0.0, 1.0}, {-2.0, -3.0}});
    REQUIRE(c.size() == 3);
    CHECK(c[0] == doctest::Approx(2.0));
    CHECK(c[1] == doctest::Approx(3.0));
    CHECK(c[2] == doctest::Approx(1.0));

    CHECK(routh_hurwitz_stable(3.0, 3.0, 1.0));       // (l+1)^3
    CHECK_FALSE(routh_hurwitz_stable(1.0, 1.0, 2.0)); // a b < c
    CHECK_FALSE(routh_hurwitz_stable(1.0, 1.0, -1.0));
}

TEST_CASE("undelayed characteristic function equals the jacobian determinant") {
    const auto m = make_preset("goodwin");
    const auto eq = find_equilibria(m, 1e-6, 10.0);
    const double xs = eq.roots.back().x_star;
    const auto cf = build_characteristic(m, xs);
    const auto J = fd_jacobian(m, equilibrium_stage_values(m, xs));
    const auto poly = char_poly(J);
    for (const cplx l : {cplx(0.4, 1.1), cplx(-0.7, 0.3), cplx(1.3, -2.0)}) {
        cplx horner = 0.0;
        for (std::size_t k2 = poly.size(); k2-- > 0;) horner = horner * l + poly[k2];
        CHECK(std::abs(cf.cleared(l) - horner) < 1e-7 * std::abs(horner));
    }

    // roots match the eigenvalues
    const auto rr = find_roots(cf, {-5.0, 2.0, 20.0});
    const auto ev = oracle::poly_roots(poly);
    for (const auto& root : rr.roots) {
        double best = 1e9;
        for (const auto& e : ev) best = std::min(best, std::abs(root - e));
        CHECK(best < 1e-8);
    }
    CHECK(rr.rightmost_real_part < 0.0);
}

TEST_CASE("delayed characteristic oracle agreement") {
    const auto p = preset_defaults("yildirim");
    const auto m = make_preset("yildirim");
    const auto eq = find_equilibria(m, 1e-6, 100.0);
    double xs = -1.0;
    for (const auto& r : eq.roots)
        if (r.positive) xs = std::max(xs, r.x_star);
    REQUIRE(xs > 0.0);
    const auto sv = equilibrium_stage_values(m, xs);
    const auto cf = build_characteristic(m, xs);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> re(-1.5, 1.5), im(-3.0, 3.0);
    for (int i = 0; i < 12; ++i) {
        const cplx l(re(rng), im(rng));
        const cplx o = yildirim_char_oracle(p, xs, sv[1], l);
        CHECK(std::abs(cf.cleared(l) - o) <= 1e-10 * std::abs(o));
    }
    CHECK_THROWS_AS(yildirim_char_oracle(p, xs, sv[1] * 1.3, cplx(0.0, 0.0)), Error);
}

TEST_CASE("root reports come conjugate-folded with small residuals") {
    const auto m = make_preset("yildirim");
    const auto eq = find_equilibria(m, 1e-6, 100.0);
    double xs = -1.0;
    for (const auto& r : eq.roots)
        if (r.positive) xs = std::max(xs, r.x_star);
    const auto cf = build_characteristic(m, xs);
    const auto rr = find_roots(cf, {-3.0, 2.0, 15.0});
    REQUIRE_FALSE(rr.roots.empty());
    for (std::size_t i = 0; i < rr.roots.size(); ++i) {
        CHECK(rr.roots[i].imag() >= 0.0);
        CHECK(rr.residuals[i] < 1e-9);
        // the conjugate satisfies the equation to the same accuracy
        if (rr.roots[i].imag() > 0.0)
            CHECK(std::abs(cf.cleared(std::conj(rr.roots[i]))) < 1e-7);
    }
}

TEST_CASE("oscillation onset along the clearance sweep") {
    ParamMap base = preset_defaults("knauer");
    base["a2"] = 0.3;
    base["p2"] = 0.5;
    auto family = [&](double d3) {
        ParamMap p = base;
        p["d3"] = d3;
        return make_preset("knauer", p);
    };
    std::vector<double> pts;
    for (int i = 0; i <= 8; ++i) pts.push_back(0.2 + 0.05 * i);
    const auto rep = hopf_scan(family, pts, 1e-6, 100.0);
    REQUIRE(rep.crossings.size() == 1);
    CHECK(rep.crossings[0].param == doctest::Approx(0.34225019669).epsilon(1e-5));
    CHECK(rep.crossings[0].omega > 0.1);
}

TEST_CASE("pole handling in the uncleared form") {
    const auto m = make_preset("knauer");
    const auto eq = find_equilibria(m, 1e-6, 100.0);
    double xs = -1.0;
    for (const auto& r : eq.roots)
        if (r.positive) xs = std::max(xs, r.x_star);
    const auto cf = build_characteristic(m, xs);
    REQUIRE(cf.pole_clearances().size() == 1);
    const double mu = cf.pole_clearances()[0];
    CHECK_THROWS_AS(cf(cplx(-mu, 0.0)), PoleAtEvaluation);
    CHECK(std::isfinite(cf.cleared(cplx(-mu, 0.0)).real()));
    // away from the pole, cleared = uncleared * (lambda + mu)
    const cplx l(0.37, 0.81);
    CHECK(std::abs(cf.cleared(l) - cf(l) * (l + mu)) < 1e-12);
}
