#include "cdde/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cdde {

namespace {

double trapezoid_mass(const std::vector<double>& grid, const std::vector<double>& density) {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        m += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
    return m;
}

double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

} // namespace

DelayKernel DelayKernel::dirac_at_zero() {
    DelayKernel k;
    k.kind_ = KernelKind::DiracAtZero;
    return k;
}

DelayKernel DelayKernel::dirac(double tau) {
    if (!(tau >= 0.0))
        throw KernelConstructionError("Dirac delay must be >= 0");
    if (tau == 0.0) return dirac_at_zero();
    DelayKernel k;
    k.kind_ = KernelKind::Dirac;
    k.tau_ = tau;
    return k;
}

DelayKernel DelayKernel::erlang(int shape, double rate) {
    if (shape < 1)
        throw KernelConstructionError("Erlang shape must be >= 1");
    if (!(rate > 0.0))
        throw KernelConstructionError("Erlang rate must be > 0");
    DelayKernel k;
    k.kind_ = KernelKind::Erlang;
    k.shape_ = shape;
    k.rate_ = rate;
    return k;
}

DelayKernel DelayKernel::tabulated(std::vector<double> grid, std::vector<double> density) {
    if (grid.size() < 2 || grid.size() != density.size())
        throw KernelConstructionError("tabulated kernel needs matching grid/density of size >= 2");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw KernelConstructionError("tabulated grid must be strictly ascending");
    if (grid.front() < 0.0)
        throw KernelConstructionError("tabulated grid must start at t >= 0");
    for (double d : density)
        if (!(d >= 0.0))
            throw KernelConstructionError("tabulated density must be nonnegative");
    const double mass = trapezoid_mass(grid, density);
    if (std::abs(mass - 1.0) > 1e-3)
        throw KernelConstructionError("tabulated kernel mass deviates from 1 by more than 1e-3");
    if (mass != 1.0)
        for (double& d : density) d /= mass;
    DelayKernel k;
    k.kind_ = KernelKind::Tabulated;
    k.grid_ = std::move(grid);
    k.density_ = std::move(density);
    return k;
}

double DelayKernel::tau() const {
    if (kind_ == KernelKind::DiracAtZero) return 0.0;
    if (kind_ == KernelKind::Dirac) return tau_;
    throw Error("tau() only defined for Dirac kernels");
}

int DelayKernel::shape() const {
    if (kind_ != KernelKind::Erlang) throw Error("shape() only defined for Erlang kernels");
    return shape_;
}

double DelayKernel::rate() const {
    if (kind_ != KernelKind::Erlang) throw Error("rate() only defined for Erlang kernels");
    return rate_;
}

const std::vector<double>& DelayKernel::grid() const {
    if (kind_ != KernelKind::Tabulated) throw Error("grid() only defined for tabulated kernels");
    return grid_;
}

const std::vector<double>& DelayKernel::density() const {
    if (kind_ != KernelKind::Tabulated) throw Error("density() only defined for tabulated kernels");
    return density_;
}

double DelayKernel::pdf(double t) const {
    if (t < 0.0) throw NegativeTime("pdf: t must be >= 0");
    switch (kind_) {
    case KernelKind::DiracAtZero:
    case KernelKind::Dirac:
        throw DiracDensityUndefined("Dirac kernels have no pointwise density");
    case KernelKind::Erlang: {
        if (t == 0.0) return shape_ == 1 ? rate_ : 0.0;
        // rate^j t^{j-1} e^{-rate t} / (j-1)!
        const double logp = shape_ * std::log(rate_) + (shape_ - 1) * std::log(t) - rate_ * t -
                            log_factorial(shape_ - 1);
        return std::exp(logp);
    }
    case KernelKind::Tabulated: {
        if (t < grid_.front() || t > grid_.back()) return 0.0;
        auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
        if (it == grid_.begin()) return density_.front();
        if (it == grid_.end()) return density_.back();
        const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
        const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
        return (1.0 - w) * density_[i] + w * density_[i + 1];
    }
    }
    return 0.0;
}

std::complex<double> DelayKernel::laplace(std::complex<double> lambda) const {
    switch (kind_) {
    case KernelKind::DiracAtZero:
        return {1.0, 0.0};
    case KernelKind::Dirac:
        return std::exp(-lambda * tau_);
    case KernelKind::Erlang: {
        if (lambda.real() <= -rate_)
            throw LaplaceDiverges("Erlang Laplace transform requires Re(lambda) > -rate");
        return std::pow(rate_ / (rate_ + lambda), shape_);
    }
    case KernelKind::Tabulated: {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
            const double dt = grid_[i + 1] - grid_[i];
            acc += 0.5 * dt * (std::exp(-lambda * grid_[i]) * density_[i] +
                               std::exp(-lambda * grid_[i + 1]) * density_[i + 1]);
        }
        return acc;
    }
    }
    return {0.0, 0.0};
}

double DelayKernel::mean() const {
    switch (kind_) {
    case KernelKind::DiracAtZero:
        return 0.0;
    case KernelKind::Dirac:
        return tau_;
    case KernelKind::Erlang:
        return static_cast<double>(shape_) / rate_;
    case KernelKind::Tabulated: {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
            const double dt = grid_[i + 1] - grid_[i];
            m += 0.5 * dt * (grid_[i] * density_[i] + grid_[i + 1] * density_[i + 1]);
        }
        return m;
    }
    }
    return 0.0;
}

double erlang_tail(int shape, double x) {
    if (x <= 0.0) return 1.0;
    // Q(shape, x) = e^{-x} sum_{i<shape} x^i / i!
    double term = 1.0, sum = 1.0;
    for (int i = 1; i < shape; ++i) {
        term *= x / i;
        sum += term;
    }
    return std::exp(-x + std::log(sum));
}

double DelayKernel::horizon(double tail_mass) const {
    if (!(tail_mass > 0.0 && tail_mass < 1.0))
        throw InvalidTailMass("tail_mass must be in (0, 1)");
    switch (kind_) {
    case KernelKind::DiracAtZero:
        return 0.0;
    case KernelKind::Dirac:
        return tau_;
    case KernelKind::Erlang: {
        double lo = 0.0, hi = mean() + 1.0 / rate_;
        while (erlang_tail(shape_, rate_ * hi) > tail_mass) hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (erlang_tail(shape_, rate_ * mid) > tail_mass ? lo : hi) = mid;
        }
        return hi;
    }
    case KernelKind::Tabulated:
        return grid_.back();
    }
    return 0.0;
}

DelayKernel tabulate_erlang(const DelayKernel& k, double tail_mass) {
    const double T = k.horizon(tail_mass);
    const double step = std::min(T / 4096.0, 2e-3);
    const std::size_t n = static_cast<std::size_t>(std::ceil(T / step)) + 1;
    std::vector<double> grid(n), density(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = static_cast<double>(i) * step;
        density[i] = k.pdf(grid[i]);
    }
    return DelayKernel::tabulated(std::move(grid), std::move(density));
}

std::vector<double> trapezoid_weights(const DelayKernel& k, double h, double tail_mass) {
    const double T = k.horizon(tail_mass);
    const auto L = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
    std::vector<double> w(L + 1);
    for (std::size_t l = 0; l <= L; ++l) w[l] = h * k.pdf(static_cast<double>(l) * h);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

namespace {

// Resample a tabulated density onto a uniform grid with the given step.
std::vector<double> resample_uniform(const DelayKernel& k, double step, std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * step;
        if (t <= k.grid().back()) out[i] = k.pdf(t);
    }
    return out;
}

double min_spacing(const DelayKernel& k) {
    double s = std::numeric_limits<double>::infinity();
    const auto& g = k.grid();
    for (std::size_t i = 0; i + 1 < g.size(); ++i) s = std::min(s, g[i + 1] - g[i]);
    return s;
}

DelayKernel shift_tabulated(const DelayKernel& k, double tau) {
    std::vector<double> grid = k.grid(), density = k.density();
    for (double& t : grid) t += tau;
    if (grid.front() > 0.0) {
        // density is zero before the shift; a near-vertical ramp keeps the
        // jump from smearing mass into [0, tau)
        const double delta = grid.front() * 1e-9;
        grid.insert(grid.begin(), {0.0, grid.front() - delta});
        density.insert(density.begin(), {0.0, 0.0});
    }
    return DelayKernel::tabulated(std::move(grid), std::move(density));
}

DelayKernel numeric_convolve(const DelayKernel& a, const DelayKernel& b) {
    const double step = std::min(min_spacing(a), min_spacing(b));
    const double support = a.grid().back() + b.grid().back();
    const std::size_t n = static_cast<std::size_t>(std::ceil(support / step)) + 1;
    const std::vector<double> fa = resample_uniform(a, step, n);
    const std::vector<double> fb = resample_uniform(b, step, n);
    std::vector<double> grid(n), density(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        grid[k] = static_cast<double>(k) * step;
        double acc = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            double w = (j == 0 || j == k) ? 0.5 : 1.0;
            acc += w * fa[j] * fb[k - j];
        }
        density[k] = acc * step;
    }
    // the discrete convolution loses a little tail mass; fold it back
    const double mass = trapezoid_mass(grid, density);
    if (std::abs(mass - 1.0) > 1e-3)
        for (double& d : density) d /= mass;
    return DelayKernel::tabulated(std::move(grid), std::move(density));
}

} // namespace

DelayKernel DelayKernel::convolve(const DelayKernel& a, const DelayKernel& b) {
    if (a.kind_ == KernelKind::DiracAtZero) return b;
    if (b.kind_ == KernelKind::DiracAtZero) return a;
    if (a.is_dirac() && b.is_dirac()) return dirac(a.tau() + b.tau());
    if (a.kind_ == KernelKind::Erlang && b.kind_ == KernelKind::Erlang &&
        a.rate_ == b.rate_)
        return erlang(a.shape_ + b.shape_, a.rate_);
    if (a.is_dirac()) return convolve(b, a);
    if (b.is_dirac()) {
        const DelayKernel ta = a.kind_ == KernelKind::Erlang ? tabulate_erlang(a) : a;
        return shift_tabulated(ta, b.tau());
    }
    const DelayKernel ta = a.kind_ == KernelKind::Erlang ? tabulate_erlang(a) : a;
    const DelayKernel tb = b.kind_ == KernelKind::Erlang ? tabulate_erlang(b) : b;
    return numeric_convolve(ta, tb);
}

} // namespace cdde
