#include "cdde/trajectory.hpp"

#include <cmath>
#include <string>

namespace cdde {

Trajectory::Trajectory(double t_begin, double h, std::size_t n_compartments)
    : t_begin_(t_begin), h_(h), values_(n_compartments) {
    if (!(h > 0.0)) throw Error("trajectory step must be > 0");
    if (n_compartments == 0) throw Error("trajectory needs at least one compartment");
}

Trajectory Trajectory::constant(double t_begin, double t_end, double h,
                                const std::vector<double>& values) {
    Trajectory tr(t_begin, h, values.size());
    const auto n = static_cast<std::size_t>(std::llround((t_end - t_begin) / h)) + 1;
    for (std::size_t c = 0; c < values.size(); ++c)
        tr.values_[c].assign(n, values[c]);
    return tr;
}

Trajectory Trajectory::sampled(double t_begin, double t_end, double h,
                               const std::vector<std::function<double(double)>>& fns) {
    Trajectory tr(t_begin, h, fns.size());
    const auto n = static_cast<std::size_t>(std::llround((t_end - t_begin) / h)) + 1;
    for (std::size_t c = 0; c < fns.size(); ++c) {
        tr.values_[c].resize(n);
        for (std::size_t j = 0; j < n; ++j) tr.values_[c][j] = fns[c](tr.time(j));
    }
    return tr;
}

void Trajectory::append(const std::vector<double>& state) {
    if (state.size() != values_.size()) throw Error("state size mismatch in append");
    for (std::size_t c = 0; c < values_.size(); ++c) values_[c].push_back(state[c]);
}

std::vector<double> Trajectory::back() const {
    std::vector<double> out(values_.size());
    for (std::size_t c = 0; c < values_.size(); ++c) out[c] = values_[c].back();
    return out;
}

double Trajectory::interpolate(std::size_t c, double t) const {
    const double slack = h_ * 1e-9;
    if (t < t_begin_ - slack || t > t_end() + slack)
        throw OutOfSpan("t = " + std::to_string(t) + " outside [" + std::to_string(t_begin_) +
                        ", " + std::to_string(t_end()) + "]");
    return value_extended(c, t);
}

double Trajectory::value_extended(std::size_t c, double t) const {
    const double slack = h_ * 1e-9;
    if (t > t_end() + slack)
        throw OutOfSpan("t = " + std::to_string(t) + " past trajectory end " +
                        std::to_string(t_end()));
    const std::vector<double>& v = values_[c];
    double u = (t - t_begin_) / h_;
    if (u <= 0.0) return v.front();
    if (u >= static_cast<double>(v.size() - 1)) return v.back();
    const auto j = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(j);
    if (w == 0.0) return v[j];
    return (1.0 - w) * v[j] + w * v[j + 1];
}

Trajectory Trajectory::extract(std::size_t c) const {
    Trajectory out(t_begin_, h_, 1);
    out.values_[0] = values_[c];
    return out;
}

} // namespace cdde
