#pragma once

#include <string>
#include <vector>

#include "cdde/functions.hpp"
#include "cdde/kernels.hpp"

namespace cdde {

/// One compartment of a cyclic system:
///   dx_i/dt = gate(x_n) * feedback(conv_i) - clearance(x_n) * x_i
/// where conv_i = int x_{i-1}(t - phi) kernel(phi) dphi and the upstream
/// index wraps (stage 0 is driven by the last stage).
struct Stage {
    FeedbackFn feedback = FeedbackFn::zero();
    DelayKernel kernel = DelayKernel::dirac_at_zero();
    StateFn gate = StateFn::constant(1.0);
    StateFn clearance = StateFn::constant(0.0);

    bool operator==(const Stage&) const = default;
};

class CyclicModel {
public:
    explicit CyclicModel(std::vector<Stage> stages, std::vector<std::string> labels = {});

    std::size_t size() const { return stages_.size(); }
    const std::vector<Stage>& stages() const { return stages_; }
    const Stage& stage(std::size_t i) const { return stages_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_[i]; }

    /// Index of the compartment feeding stage i.
    std::size_t upstream(std::size_t i) const {
        return (i + stages_.size() - 1) % stages_.size();
    }

    /// Right-hand side given the current state and the per-stage delayed
    /// convolution values conv[i] (for DiracAtZero kernels conv[i] is just
    /// the current upstream value).
    std::vector<double> rhs(const std::vector<double>& x, const std::vector<double>& conv) const;

    /// Largest kernel horizon over all stages at the given tail mass.
    double max_horizon(double tail_mass) const;

    bool operator==(const CyclicModel&) const = default;

private:
    std::vector<Stage> stages_;
    std::vector<std::string> labels_;
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> flags;
    bool nonneg_hypotheses = false;  // positive-preserving feedbacks, bounded clearances
    bool uniform_clearance = false;  // single constant clearance shared by all stages

    bool ok() const { return errors.empty(); }
};

/// Structural and hypothesis checks; report-carrying, never throws.
ValidationReport validate(const CyclicModel& m);

} // namespace cdde
