#include "cdde/presets.hpp"

#include <cmath>

namespace cdde {

namespace {

double get(const ParamMap& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw MissingParameter("missing parameter: " + key);
    return it->second;
}

void require_positive(const ParamMap& p, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (!(get(p, k) > 0.0))
            throw InfeasibleParameters(std::string("parameter must be > 0: ") + k);
}

// Three linear-chain stages I -> E with repressive production of M;
// stage order puts the reduced-to compartment (M) last so reduction
// eliminates I and E.
CyclicModel build_goodwin(const ParamMap& p) {
    require_positive(p, {"gamma_M", "gamma_I", "gamma_E", "F_vmax", "F_K", "F_n"});
    std::vector<Stage> stages(3);
    stages[0].feedback = FeedbackFn::linear(get(p, "alpha_I"));
    stages[0].clearance = StateFn::constant(get(p, "gamma_I"));
    stages[1].feedback = FeedbackFn::linear(get(p, "alpha_E"));
    stages[1].clearance = StateFn::constant(get(p, "gamma_E"));
    stages[2].feedback = FeedbackFn::hill_down(get(p, "F_vmax"), get(p, "F_K"), get(p, "F_n"));
    stages[2].clearance = StateFn::constant(get(p, "gamma_M"));
    return CyclicModel(std::move(stages), {"I", "E", "M"});
}

// Discrete-delay operon model. The survival factor e^{-nu_E*tau_M} inside
// the repression term is absorbed into the Hill threshold
// (F(c*x) = HillDown(vmax, K/c, n)); the factor e^{-nu_M*tau_I} rides in a
// ScaledLinear feedback. E is last: its equation has the saturating gate.
CyclicModel build_yildirim(const ParamMap& p) {
    require_positive(p, {"gamma_M", "gamma_I", "gamma_E", "F_vmax", "F_K", "F_n", "K_E"});
    for (const char* k : {"tau_M", "tau_I", "nu_M", "nu_E", "alpha_I", "alpha_E", "beta_E"})
        if (get(p, k) < 0.0)
            throw InfeasibleParameters(std::string("parameter must be >= 0: ") + k);
    const double c = std::exp(-get(p, "nu_E") * get(p, "tau_M"));
    std::vector<Stage> stages(3);
    stages[0].feedback = FeedbackFn::hill_down(get(p, "F_vmax"), get(p, "F_K") / c, get(p, "F_n"));
    stages[0].kernel = DelayKernel::dirac(get(p, "tau_M"));
    stages[0].clearance = StateFn::constant(get(p, "gamma_M"));
    stages[1].feedback =
        FeedbackFn::scaled_linear(get(p, "alpha_I"), std::exp(-get(p, "nu_M") * get(p, "tau_I")));
    stages[1].kernel = DelayKernel::dirac(get(p, "tau_I"));
    stages[1].clearance = StateFn::constant(get(p, "gamma_I"));
    stages[2].feedback = FeedbackFn::linear(1.0);
    stages[2].gate = StateFn::saturating_loss(get(p, "alpha_E"), get(p, "beta_E"), get(p, "K_E"));
    stages[2].clearance = StateFn::constant(get(p, "gamma_E"));
    return CyclicModel(std::move(stages), {"M", "I", "E"});
}

// Stem-cell model: u1 renews without upstream input (Zero feedback, net
// clearance p1*(1 - 2a1/(1+k*u3))), division output feeds the next stage
// through state-dependent gates 2p*(1 - a/(1+k*u3)).
CyclicModel build_knauer(const ParamMap& p) {
    require_positive(p, {"a1", "a2", "p1", "p2", "k", "d3"});
    const double a1 = get(p, "a1"), a2 = get(p, "a2");
    const double p1 = get(p, "p1"), p2 = get(p, "p2");
    const double k = get(p, "k"), d3 = get(p, "d3");
    std::vector<Stage> stages(3);
    stages[0].feedback = FeedbackFn::zero();
    stages[0].clearance = StateFn::hill_gate(-2.0 * a1 * p1, k, p1);
    stages[1].feedback = FeedbackFn::linear(1.0);
    stages[1].gate = StateFn::hill_gate(-2.0 * p1 * a1, k, 2.0 * p1);
    stages[1].clearance = StateFn::hill_gate(-2.0 * a2 * p2, k, p2);
    stages[2].feedback = FeedbackFn::linear(1.0);
    stages[2].gate = StateFn::hill_gate(-2.0 * p2 * a2, k, 2.0 * p2);
    stages[2].clearance = StateFn::constant(d3);
    return CyclicModel(std::move(stages), {"u1", "u2", "u3"});
}

// Two-stage limit of the model above when the first compartment is empty.
CyclicModel build_knauer_singular(const ParamMap& p) {
    require_positive(p, {"a2", "p2", "k", "d3"});
    const double a2 = get(p, "a2"), p2 = get(p, "p2");
    const double k = get(p, "k"), d3 = get(p, "d3");
    std::vector<Stage> stages(2);
    stages[0].feedback = FeedbackFn::zero();
    stages[0].clearance = StateFn::hill_gate(-2.0 * a2 * p2, k, p2);
    stages[1].feedback = FeedbackFn::linear(1.0);
    stages[1].gate = StateFn::hill_gate(-2.0 * p2 * a2, k, 2.0 * p2);
    stages[1].clearance = StateFn::constant(d3);
    return CyclicModel(std::move(stages), {"u2", "u3"});
}

} // namespace

std::vector<std::string> preset_names() {
    return {"goodwin", "yildirim", "knauer", "knauer_singular"};
}

ParamMap preset_defaults(const std::string& name) {
    if (name == "goodwin")
        return {{"gamma_M", 1.0}, {"gamma_I", 1.0}, {"gamma_E", 1.0},
                {"alpha_I", 1.0}, {"alpha_E", 1.0},
                {"F_vmax", 1.0},  {"F_K", 1.0},     {"F_n", 2.0}};
    if (name == "yildirim")
        return {{"gamma_M", 0.4}, {"gamma_I", 0.5}, {"gamma_E", 0.6},
                {"alpha_I", 1.0}, {"alpha_E", 1.5}, {"beta_E", 0.4},
                {"K_E", 1.0},     {"nu_M", 0.2},    {"nu_E", 0.1},
                {"tau_M", 0.8},   {"tau_I", 0.6},
                {"F_vmax", 1.5},  {"F_K", 1.0},     {"F_n", 2.0}};
    if (name == "knauer")
        return {{"a1", 0.9}, {"a2", 0.5}, {"p1", 1.0},
                {"p2", 1.0}, {"k", 1.0},  {"d3", 1.0}};
    if (name == "knauer_singular")
        return {{"a2", 0.9}, {"p2", 1.0}, {"k", 1.0}, {"d3", 1.0}};
    throw ModelError("unknown preset: " + name);
}

CyclicModel make_preset(const std::string& name, const ParamMap& overrides) {
    ParamMap p = preset_defaults(name);
    for (const auto& [key, value] : overrides) {
        auto it = p.find(key);
        if (it == p.end())
            throw UnknownParameter("preset '" + name + "' has no parameter '" + key + "'");
        it->second = value;
    }
    if (name == "goodwin") return build_goodwin(p);
    if (name == "yildirim") return build_yildirim(p);
    if (name == "knauer") return build_knauer(p);
    return build_knauer_singular(p);
}

} // namespace cdde
