#include <doctest.h>

#include <cmath>

#include "cdde/kernels.hpp"
#include "oracles.hpp"

using cdde::DelayKernel;
using cdde::KernelKind;

TEST_CASE("erlang tail probability") {
    CHECK(cdde::erlang_tail(1, 0.7) == doctest::Approx(std::exp(-0.7)).epsilon(1e-14));
    // Q(3, 2) = e^{-2} (1 + 2 + 2)
    CHECK(cdde::erlang_tail(3, 2.0) == doctest::Approx(5.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(cdde::erlang_tail(2, 0.0) == doctest::Approx(1.0));
    // cross-check against quadrature of the density
    const double q = oracle::simpson(
        [](double t) { return 0.5 * t * t * std::exp(-t); }, 3.0, 60.0, 4000);
    CHECK(cdde::erlang_tail(3, 3.0) == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("density evaluation") {
    const auto k = DelayKernel::erlang(2, 3.0);
    CHECK(k.pdf(0.5) == doctest::Approx(9.0 * 0.5 * std::exp(-1.5)).epsilon(1e-14));
    CHECK(k.pdf(0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(k.pdf(-0.1), cdde::NegativeTime);
    CHECK_THROWS_AS(DelayKernel::dirac(1.0).pdf(1.0), cdde::DiracDensityUndefined);
    CHECK_THROWS_AS(DelayKernel::dirac_at_zero().pdf(0.0), cdde::DiracDensityUndefined);

    const auto tab = DelayKernel::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    CHECK(tab.pdf(0.5) == doctest::Approx(0.5));
    CHECK(tab.pdf(1.5) == doctest::Approx(0.5));
    CHECK(tab.pdf(3.0) == doctest::Approx(0.0));
}

TEST_CASE("kernel invariants") {
    CHECK_THROWS_AS(DelayKernel::dirac(-1.0), cdde::KernelConstructionError);
    CHECK_THROWS_AS(DelayKernel::erlang(0, 1.0), cdde::KernelConstructionError);
    CHECK_THROWS_AS(DelayKernel::erlang(2, 0.0), cdde::KernelConstructionError);
    // mass off by more than 1e-3 is rejected, small deviations renormalized
    CHECK_THROWS_AS(DelayKernel::tabulated({0.0, 1.0}, {0.0, 2.5}),
                    cdde::KernelConstructionError);
    const auto tab = DelayKernel::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0005, 0.0});
    double mass = 0.0;
    for (std::size_t i = 1; i < tab.grid().size(); ++i)
        mass += 0.5 * (tab.density()[i] + tab.density()[i - 1]) *
                (tab.grid()[i] - tab.grid()[i - 1]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("laplace transform") {
    const std::complex<double> l(0.3, 1.2);
    CHECK(std::abs(DelayKernel::dirac_at_zero().laplace(l) - 1.0) < 1e-15);
    CHECK(std::abs(DelayKernel::dirac(0.7).laplace(l) - std::exp(-l * 0.7)) < 1e-14);
    const auto e = DelayKernel::erlang(3, 2.0);
    CHECK(std::abs(e.laplace(l) - std::pow(2.0 / (2.0 + l), 3)) < 1e-14);
    CHECK(std::abs(e.laplace(0.0) - 1.0) < 1e-14);
    CHECK_THROWS_AS(e.laplace(std::complex<double>(-2.5, 0.0)), cdde::LaplaceDiverges);

    // tabulated transform against Simpson quadrature of the same density
    const auto tab = cdde::tabulate_erlang(e, 1e-12);
    const auto direct = oracle::simpson(
        [&](double t) { return std::exp(-0.3 * t) * tab.pdf(t); }, 0.0,
        tab.grid().back(), 6000);
    CHECK(std::abs(tab.laplace(0.3).real() - direct) < 1e-7);
}

TEST_CASE("mean delay") {
    CHECK(DelayKernel::dirac_at_zero().mean() == doctest::Approx(0.0));
    CHECK(DelayKernel::dirac(2.5).mean() == doctest::Approx(2.5));
    CHECK(DelayKernel::erlang(4, 2.0).mean() == doctest::Approx(2.0));
    CHECK(cdde::tabulate_erlang(DelayKernel::erlang(4, 2.0)).mean() ==
          doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("horizon truncation") {
    CHECK(DelayKernel::dirac(1.5).horizon(1e-10) == doctest::Approx(1.5));
    CHECK(DelayKernel::dirac_at_zero().horizon(1e-10) == doctest::Approx(0.0));
    const auto e = DelayKernel::erlang(2, 1.0);
    const double T = e.horizon(1e-8);
    CHECK(cdde::erlang_tail(2, T) == doctest::Approx(1e-8).epsilon(1e-3));
    CHECK_THROWS_AS(e.horizon(0.0), cdde::InvalidTailMass);
    CHECK_THROWS_AS(e.horizon(1.0), cdde::InvalidTailMass);
}

TEST_CASE("closed-form convolutions") {
    const auto d = DelayKernel::convolve(DelayKernel::dirac(1.0), DelayKernel::dirac(2.0));
    CHECK(d.kind() == KernelKind::Dirac);
    CHECK(d.tau() == doctest::Approx(3.0));

    const auto e = DelayKernel::convolve(DelayKernel::erlang(2, 1.5), DelayKernel::erlang(3, 1.5));
    CHECK(e.kind() == KernelKind::Erlang);
    CHECK(e.shape() == 5);
    CHECK(e.rate() == doctest::Approx(1.5));

    const auto k = DelayKernel::erlang(2, 1.0);
    CHECK(DelayKernel::convolve(DelayKernel::dirac_at_zero(), k) == k);
    CHECK(DelayKernel::convolve(k, DelayKernel::dirac_at_zero()) == k);
}

TEST_CASE("numeric convolution: mass, mean additivity, transform factorization") {
    const auto a = DelayKernel::erlang(2, 1.0);
    const auto b = DelayKernel::erlang(1, 2.0);
    const auto c = DelayKernel::convolve(a, b);
    CHECK(c.kind() == KernelKind::Tabulated);
    CHECK(std::abs(c.laplace(0.0).real() - 1.0) < 1e-6);
    CHECK(c.mean() == doctest::Approx(a.mean() + b.mean()).epsilon(1e-6));
    for (const std::complex<double> l : {std::complex<double>(0.5, 0.0),
                                         std::complex<double>(0.2, 1.0)})
        CHECK(std::abs(c.laplace(l) - a.laplace(l) * b.laplace(l)) < 1e-6);
}

TEST_CASE("dirac shifted by a density") {
    const auto b = DelayKernel::erlang(2, 2.0);
    const auto c = DelayKernel::convolve(DelayKernel::dirac(1.0), b);
    CHECK(c.kind() == KernelKind::Tabulated);
    CHECK(c.mean() == doctest::Approx(1.0 + b.mean()).epsilon(1e-5));
    CHECK(std::abs(c.laplace(0.0).real() - 1.0) < 1e-6);
    CHECK(c.pdf(0.5) == doctest::Approx(0.0));  // no mass before the shift
    const std::complex<double> l(0.4, 0.3);
    CHECK(std::abs(c.laplace(l) - std::exp(-l) * b.laplace(l)) < 1e-5);
}

TEST_CASE("quadrature weights sum to the kernel mass") {
    for (int shape : {1, 2, 5}) {
        const auto k = DelayKernel::erlang(shape, 2.0);
        const auto w = cdde::trapezoid_weights(k, 1e-2, 1e-10);
        double s = 0.0;
        for (double v : w) s += v;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-4));
    }
}
