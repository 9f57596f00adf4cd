#pragma once

#include "cdde/model.hpp"
#include "cdde/trajectory.hpp"

namespace cdde {

struct SimConfig {
    double h = 1e-3;
    double t_end = 50.0;
    double tail_mass = 1e-10;  // kernel truncation probability
    enum class Method { rk4 } method = Method::rk4;
};

/// Integrate the cyclic system forward from the end of `history` to
/// cfg.t_end with fixed-step RK4. Dirac kernels are handled by the method
/// of steps (interpolated lookup at t - tau, requiring h <= tau); Erlang
/// and tabulated kernels by trapezoid quadrature over the truncated
/// history window with precomputed weights. The returned trajectory
/// includes the (resampled) history span.
Trajectory integrate_cyclic(const CyclicModel& m, const Trajectory& history,
                            const SimConfig& cfg);

/// Result of replacing every Erlang kernel edge by a chain of linear
/// transit compartments. index_map[i] is the position of original
/// compartment i in the expanded model; aux describes each inserted
/// compartment (its position, the original compartment feeding the chain,
/// and the cumulative Erlang kernel it represents).
struct LctExpansion {
    CyclicModel model;
    std::vector<std::size_t> index_map;
    struct AuxInfo {
        std::size_t index;   // position in the expanded model
        std::size_t source;  // original compartment feeding the chain
        DelayKernel kernel;  // Erlang(k, rate): distribution of this link's lag
    };
    std::vector<AuxInfo> aux;
};

/// Classical chain expansion: each Erlang(shape j, rate V) kernel becomes
/// j auxiliary compartments with transit rate V and an undelayed kernel.
/// Tabulated kernels have no finite chain and are rejected.
LctExpansion expand_erlang_lct(const CyclicModel& m);

/// History for the expanded model: original compartments are copied, each
/// auxiliary compartment is seeded with the quadrature of its source
/// against its cumulative kernel (constant pre-extension before the span).
Trajectory expand_lct_history(const LctExpansion& ex, const Trajectory& history,
                              double tail_mass = 1e-10);

} // namespace cdde
