#pragma once

#include <complex>
#include <vector>

#include "cdde/errors.hpp"

namespace cdde {

enum class KernelKind { DiracAtZero, Dirac, Erlang, Tabulated };

/// A delay kernel: a probability density on [0, inf).
///
/// Dirac variants are point masses (discrete delays), Erlang is the gamma
/// density with integer shape, and Tabulated is a piecewise-linear density
/// on a finite ascending grid. Kernels are immutable after construction and
/// safe to share across threads.
class DelayKernel {
public:
    static DelayKernel dirac_at_zero();
    static DelayKernel dirac(double tau);
    static DelayKernel erlang(int shape, double rate);
    /// Tabulated density. The trapezoid mass must be within 1e-3 of 1;
    /// small deviations are silently renormalized, larger ones rejected.
    static DelayKernel tabulated(std::vector<double> grid, std::vector<double> density);

    KernelKind kind() const { return kind_; }
    bool is_dirac() const { return kind_ == KernelKind::DiracAtZero || kind_ == KernelKind::Dirac; }

    /// Delay of a Dirac kernel (0 for DiracAtZero).
    double tau() const;
    int shape() const;
    double rate() const;
    const std::vector<double>& grid() const;
    const std::vector<double>& density() const;

    /// Pointwise density K(t). Undefined (throws) for Dirac kinds.
    double pdf(double t) const;

    /// Laplace transform L[K](lambda) = int_0^inf e^{-lambda t} K(t) dt.
    std::complex<double> laplace(std::complex<double> lambda) const;

    /// Mean delay int t K(t) dt.
    double mean() const;

    /// Smallest T with int_T^inf K <= tail_mass.
    double horizon(double tail_mass) const;

    /// Density of the sum of two independent delays. Closed forms where they
    /// exist (Dirac + Dirac, equal-rate Erlangs); otherwise a tabulated
    /// numerical convolution on a common uniform grid.
    static DelayKernel convolve(const DelayKernel& a, const DelayKernel& b);

    bool operator==(const DelayKernel&) const = default;

private:
    DelayKernel() = default;

    KernelKind kind_ = KernelKind::DiracAtZero;
    double tau_ = 0.0;        // Dirac
    int shape_ = 0;           // Erlang
    double rate_ = 0.0;       // Erlang
    std::vector<double> grid_;
    std::vector<double> density_;
};

/// Regularized upper incomplete gamma Q(shape, x) for integer shape:
/// the Erlang tail probability P[T > x/rate].
double erlang_tail(int shape, double x);

/// Sample an Erlang kernel onto a uniform grid dense enough for quadrature,
/// covering its horizon at the given tail mass.
DelayKernel tabulate_erlang(const DelayKernel& k, double tail_mass = 1e-10);

/// Trapezoid weights w_l for int x(t-s) K(s) ds ~ sum_l w_l x(t - l*h),
/// l = 0..ceil(horizon/h). Only for kernels with a density.
std::vector<double> trapezoid_weights(const DelayKernel& k, double h, double tail_mass);

} // namespace cdde
