#pragma once

#include <array>
#include <complex>
#include <functional>
#include <limits>

#include "cdde/model.hpp"
#include "cdde/presets.hpp"

namespace cdde {

struct EquilibriumReport {
    struct Root {
        double x_star = 0.0;       // last-compartment equilibrium value
        double residual = 0.0;     // last-stage balance residual
        std::vector<double> stage_values;  // all compartments at equilibrium
        double mu_star = 0.0;      // last-stage clearance at x_star
        bool positive = true;      // every compartment > 0
    };
    std::vector<Root> roots;
    double scan_lo = 0.0, scan_hi = 0.0;
    std::vector<std::string> existence_flags;
};

/// Scan [lo, hi] with n_brackets uniform sub-intervals for sign changes of
/// the scalar equilibrium residual (built from the closed-form stage
/// composition G_i(x) = g_i(x) f_i(G_{i-1}(x)) / mu_i(x)) and bisect each
/// bracket to 1e-12. A stage with Zero feedback switches the scan to its
/// clearance's root (its own level is then recovered from the last-stage
/// balance). The trivial equilibrium is reported when the origin balances.
EquilibriumReport find_equilibria(const CyclicModel& m, double lo, double hi,
                                  std::size_t n_brackets = 200);

/// All compartment values at an equilibrium of the last compartment.
std::vector<double> equilibrium_stage_values(const CyclicModel& m, double x_star);

/// The characteristic function of the linearization about an equilibrium.
/// Stages without their own retained variable are folded into rational
/// factors of lambda, so the uncleared form has removable poles at
/// lambda = -mu_e for each folded stage e; cleared() multiplies them out.
class CharacteristicFn {
public:
    CharacteristicFn(const CyclicModel& m, std::vector<double> stage_values);

    /// Delta(lambda); throws PoleAtEvaluation within 1e-12 of a pole.
    std::complex<double> operator()(std::complex<double> lambda) const;
    /// Delta(lambda) * prod_e (lambda + mu_e) — entire, same zeros apart
    /// from the cleared pole locations.
    std::complex<double> cleared(std::complex<double> lambda) const;
    /// Clearance values mu_e of the folded stages (poles sit at -mu_e).
    const std::vector<double>& pole_clearances() const { return pole_mu_; }
    std::size_t retained_count() const { return retained_.size(); }

private:
    CyclicModel model_;
    std::vector<double> x_;              // equilibrium per stage
    std::vector<std::size_t> retained_;  // Zero-feedback stages + the last
    std::vector<double> pole_mu_;
};

/// Build and verify the characteristic function at x_star: the equilibrium
/// residual must be <= 1e-8, and for undelayed models the result is
/// cross-checked against a finite-difference Jacobian before returning.
CharacteristicFn build_characteristic(const CyclicModel& m, double x_star);

/// Finite-difference Jacobian of the undelayed right-hand side.
std::vector<std::vector<double>> fd_jacobian(const CyclicModel& m,
                                             const std::vector<double>& state);

/// Characteristic polynomial coefficients of a (small) real matrix,
/// leading coefficient 1: returns c with det(lambda I - J) = sum c_k lambda^k,
/// c.size() = n+1, c[n] = 1.
std::vector<double> char_poly(const std::vector<std::vector<double>>& J);

/// Hurwitz stability of lambda^3 + a lambda^2 + b lambda + c.
bool routh_hurwitz_stable(double a, double b, double c);

/// Literal transcription of the published transcendental characteristic
/// equation for the operon model, evaluated at lambda. params are the
/// yildirim preset parameters; E_star/Ebar_star the equilibrium pair
/// (Ebar = e^{-nu_E tau_M} E).
std::complex<double> yildirim_char_oracle(const ParamMap& params, double E_star,
                                          double Ebar_star, std::complex<double> lambda);

/// Literal transcription of the published cubic for the stem-cell model
/// (time rescaled by p1).
std::complex<double> knauer_char_oracle(const ParamMap& params, std::complex<double> lambda);

/// det[lambda I - A(lambda)] with the published 2x2 linearization matrix
/// (same rescaling).
std::complex<double> knauer_matrix_char(const ParamMap& params, std::complex<double> lambda);

struct RootRegion {
    double re_min = -5.0;
    double re_max = 2.0;
    double im_max = 20.0;
};

struct RootReport {
    std::vector<std::complex<double>> roots;  // Im >= 0; conjugates implied
    std::vector<double> residuals;
    double rightmost_real_part = -std::numeric_limits<double>::infinity();
    std::size_t grid = 0;
    std::size_t newton_failures = 0;
};

/// Grid-seeded Newton iteration on the cleared characteristic function.
/// Roots are deduplicated within 1e-6 and spurious zeros introduced by
/// denominator clearing are filtered by the uncleared residual.
RootReport find_roots(const CharacteristicFn& cf, const RootRegion& region = {},
                      std::size_t grid = 24);

struct ScanReport {
    struct Point {
        double param;
        double rightmost_re;
        double rightmost_im;
        std::size_t n_roots;
    };
    struct Crossing {
        double param;
        double omega;  // |Im| of the crossing pair
    };
    std::vector<Point> points;
    std::vector<Crossing> crossings;
};

/// Sweep a one-parameter model family: per point, equilibrium -> rightmost
/// characteristic root; sign changes of the rightmost real part are
/// bisected to 1e-6 in the parameter.
ScanReport hopf_scan(const std::function<CyclicModel(double)>& family,
                     const std::vector<double>& params, double eq_lo, double eq_hi,
                     const RootRegion& region = {}, std::size_t grid = 24);

} // namespace cdde
