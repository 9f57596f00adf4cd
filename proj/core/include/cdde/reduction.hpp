#pragma once

#include <limits>

#include "cdde/model.hpp"
#include "cdde/simulate.hpp"
#include "cdde/trajectory.hpp"

namespace cdde {

/// Quadrature settings for stage-integral evaluation.
struct QuadSettings {
    double tail_mass = 1e-10;
    /// Cut the outer integral once the survival factor exp(-int mu) falls
    /// below this.
    double survival_cutoff = 1e-12;
    /// Optional user-declared lower bound on a sign-indefinite clearance;
    /// NaN means "derive from the clearance on x >= 0". Without a positive
    /// bound the outer horizon falls back to the available history depth
    /// and the evaluation is flagged.
    double mu_min = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluates the integral-form solution of one stage:
///   x_i(t) = int_0^inf g_i(x_n(t-s)) f_i(conv_i(t-s))
///            exp(-int_{t-s}^t mu_i(x_n(u)) du) ds
/// with conv_i(u) = int x_{i-1}(u - phi) K_i(phi) dphi. Queries before the
/// trajectory start use constant pre-extension (flagged via
/// used_fallback_horizon when no positive clearance bound exists).
class StageIntegralEvaluator {
public:
    StageIntegralEvaluator(const CyclicModel& m, std::size_t stage, QuadSettings qs = {});

    /// Pointwise quadrature at time t; tr must contain the upstream and
    /// last compartments on its grid.
    double eval(const Trajectory& tr, double t) const;

    /// Positive lower clearance bound used for truncation, or NaN.
    double clearance_bound() const { return mu_lo_; }
    bool used_fallback_horizon() const { return fallback_horizon_; }

private:
    const CyclicModel* model_;
    std::size_t stage_;
    QuadSettings qs_;
    double mu_lo_;
    mutable bool fallback_horizon_ = false;
};

/// Reconstruct compartments 1..up_to (1-based) from the last compartment's
/// history by stage-by-stage grid sweeps and return the value of
/// compartment up_to at time t; up_to = 0 returns the raw history value.
double nested_G(const CyclicModel& m, std::size_t up_to, const Trajectory& xn_history,
                double t, QuadSettings qs = {});

struct MappedHistory {
    Trajectory traj;        // all compartments on psi's grid
    double valid_from;      // compounded horizon past the grid start
    bool used_fallback_horizon = false;
};

/// Initial data for the full system from scalar history psi of the last
/// compartment: compartment i is filled with G_i(psi) on psi's span.
MappedHistory map_history(const CyclicModel& m, const Trajectory& psi, QuadSettings qs = {});

struct ConsistencyReport {
    struct Entry {
        std::size_t stage;
        double deviation;  // kernel-weighted relative deviation
        double tolerance;
        bool pass;
    };
    std::vector<Entry> entries;
    bool pass = true;
};

/// Check that each compartment satisfies its own integral identity at the
/// end of the trajectory, weighting deviations by the kernel through which
/// the compartment is consumed downstream (pointwise at the delayed
/// instants for Dirac kernels).
ConsistencyReport check_consistency(const CyclicModel& m, const Trajectory& full_history,
                                    double tol, QuadSettings qs = {});

/// A cyclic model with a contiguous block of stages eliminated; retained
/// stages keep their differential form, eliminated ones are advanced by
/// the exact exponential recurrence of their integral solution.
struct ReducedSystem {
    CyclicModel model;
    std::vector<std::size_t> eliminated;  // ascending, contiguous
    std::vector<std::size_t> retained;    // ascending, complement
    QuadSettings qs;
};

ReducedSystem partial_reduce(const CyclicModel& m, const std::vector<std::size_t>& eliminate,
                             QuadSettings qs = {});

/// Integrate the reduced system: RK4 on retained compartments, exponential
/// recurrence on eliminated ones (substep values from a linear predictor).
/// history must cover every compartment.
Trajectory integrate_reduced(const ReducedSystem& rs, const Trajectory& history,
                             const SimConfig& cfg);

struct EquivalenceReport {
    struct Entry {
        std::string label;
        double deviation;   // relative L-infinity vs the full simulation
        bool reconstructed; // true: stage-integral sweep; false: reduced integration
    };
    std::vector<Entry> entries;
    double tol = 1e-3;
    bool pass = true;
};

/// Dual-evaluation check of the reduction: simulate the full system, then
/// (a) rebuild each eliminated compartment from its integral solution and
/// (b) re-integrate the retained compartments through the reduced system,
/// reporting per-compartment relative L-infinity deviations.
EquivalenceReport check_equivalence(const CyclicModel& m, const Trajectory& history,
                                    const SimConfig& cfg,
                                    const std::vector<std::size_t>& eliminate, double tol = 1e-3,
                                    QuadSettings qs = {});

} // namespace cdde
