#include "cdde/model.hpp"

#include <algorithm>

namespace cdde {

CyclicModel::CyclicModel(std::vector<Stage> stages, std::vector<std::string> labels)
    : stages_(std::move(stages)), labels_(std::move(labels)) {
    if (stages_.empty()) throw ModelError("cyclic model needs at least one stage");
    if (labels_.empty()) {
        labels_.reserve(stages_.size());
        for (std::size_t i = 0; i < stages_.size(); ++i)
            labels_.push_back("x" + std::to_string(i + 1));
    } else if (labels_.size() != stages_.size()) {
        throw ModelError("label count does not match stage count");
    }
}

std::vector<double> CyclicModel::rhs(const std::vector<double>& x,
                                     const std::vector<double>& conv) const {
    const double xn = x.back();
    std::vector<double> dx(stages_.size());
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        const Stage& s = stages_[i];
        dx[i] = s.gate.eval(xn) * s.feedback.eval(conv[i]) - s.clearance.eval(xn) * x[i];
    }
    return dx;
}

double CyclicModel::max_horizon(double tail_mass) const {
    double h = 0.0;
    for (const Stage& s : stages_) h = std::max(h, s.kernel.horizon(tail_mass));
    return h;
}

ValidationReport validate(const CyclicModel& m) {
    ValidationReport r;
    if (m.size() < 2) r.errors.push_back("n >= 2 required");

    bool positive_preserving = true;
    bool clearances_bounded = true;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const Stage& s = m.stage(i);
        if (s.feedback.kind() == FeedbackKind::Zero)
            r.flags.push_back("stage-" + std::to_string(i + 1) +
                              " feedback is Zero: self-renewal-only first stage");
        if (!s.feedback.positive_preserving() && s.feedback.kind() != FeedbackKind::Zero)
            positive_preserving = false;
        if (!std::isfinite(s.clearance.sup_on_nonneg())) clearances_bounded = false;
        if (s.clearance.inf_on_nonneg() < 0.0)
            r.flags.push_back("stage-" + std::to_string(i + 1) +
                              " clearance can go negative (net self-renewal)");
        if (s.gate.inf_on_nonneg() < 0.0)
            r.flags.push_back("stage-" + std::to_string(i + 1) + " gate can go negative");
    }
    // The non-negativity result needs positivity-preserving production and a
    // bounded clearance; HillDown production stays positive at 0 so it keeps
    // trajectories nonnegative too, but it violates f(0)=0 and is flagged.
    r.nonneg_hypotheses = clearances_bounded;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.stage(i).feedback.kind() == FeedbackKind::HillDown)
            r.flags.push_back("stage-" + std::to_string(i + 1) +
                              " feedback violates f(0)=0 (HillDown)");
    if (!positive_preserving)
        r.flags.push_back("some feedbacks are not positivity-preserving");

    r.uniform_clearance = true;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m.stage(i).clearance.is_constant() ||
            (i > 0 && !(m.stage(i).clearance == m.stage(0).clearance)))
            r.uniform_clearance = false;
    }
    return r;
}

} // namespace cdde
