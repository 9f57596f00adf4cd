#pragma once

#include <functional>
#include <vector>

#include "cdde/errors.hpp"

namespace cdde {

/// Uniform-grid samples of one or more compartments, serving both as history
/// (the grid may start at negative time) and as simulation output. Linear
/// interpolation between nodes, exact at nodes.
class Trajectory {
public:
    Trajectory(double t_begin, double h, std::size_t n_compartments);

    /// Constant history x(t) = values[c] on [t_begin, t_end].
    static Trajectory constant(double t_begin, double t_end, double h,
                               const std::vector<double>& values);
    /// Sampled history x_c(t) = fns[c](t) on [t_begin, t_end].
    static Trajectory sampled(double t_begin, double t_end, double h,
                              const std::vector<std::function<double(double)>>& fns);

    std::size_t n_compartments() const { return values_.size(); }
    std::size_t size() const { return values_.empty() ? 0 : values_[0].size(); }
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_begin_ + h_ * static_cast<double>(size() - 1); }
    double h() const { return h_; }
    double time(std::size_t j) const { return t_begin_ + h_ * static_cast<double>(j); }

    double value(std::size_t c, std::size_t j) const { return values_[c][j]; }
    const std::vector<double>& samples(std::size_t c) const { return values_[c]; }

    /// Append one grid point (one value per compartment).
    void append(const std::vector<double>& state);

    /// Latest stored state across compartments.
    std::vector<double> back() const;

    /// Linear interpolation; throws OutOfSpan outside [t_begin, t_end].
    double interpolate(std::size_t c, double t) const;

    /// Like interpolate, but clamps queries before t_begin to the first
    /// sample (constant pre-history extension). Still throws past t_end.
    double value_extended(std::size_t c, double t) const;

    /// New trajectory with only the given compartment.
    Trajectory extract(std::size_t c) const;

private:
    double t_begin_;
    double h_;
    std::vector<std::vector<double>> values_;
};

} // namespace cdde
