#include "cdde/config.hpp"

#include <json.hpp>

namespace cdde {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

double num(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path, std::string("missing field '") + key + "'");
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

std::string kind_of(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    if (!j.contains("kind") || !j["kind"].is_string()) fail(path, "missing string field 'kind'");
    return j["kind"].get<std::string>();
}

FeedbackFn parse_feedback(const json& j, const std::string& path) {
    const std::string kind = kind_of(j, path);
    try {
        if (kind == "zero") return FeedbackFn::zero();
        if (kind == "linear") return FeedbackFn::linear(num(j, path, "alpha"));
        if (kind == "hill_up")
            return FeedbackFn::hill_up(num(j, path, "vmax"), num(j, path, "K"), num(j, path, "n"));
        if (kind == "hill_down")
            return FeedbackFn::hill_down(num(j, path, "vmax"), num(j, path, "K"),
                                         num(j, path, "n"));
        if (kind == "scaled_linear")
            return FeedbackFn::scaled_linear(num(j, path, "alpha"), num(j, path, "exp_factor"));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
    fail(path, "unknown feedback kind '" + kind + "'");
}

StateFn parse_statefn(const json& j, const std::string& path) {
    const std::string kind = kind_of(j, path);
    try {
        if (kind == "constant") return StateFn::constant(num(j, path, "c"));
        if (kind == "hill_gate")
            return StateFn::hill_gate(num(j, path, "a"), num(j, path, "k"),
                                      j.contains("offset") ? num(j, path, "offset") : 0.0);
        if (kind == "saturating_loss")
            return StateFn::saturating_loss(num(j, path, "alpha"), num(j, path, "beta"),
                                            num(j, path, "K"),
                                            j.contains("offset") ? num(j, path, "offset") : 0.0);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
    fail(path, "unknown state function kind '" + kind + "'");
}

DelayKernel parse_kernel(const json& j, const std::string& path) {
    const std::string kind = kind_of(j, path);
    try {
        if (kind == "none") return DelayKernel::dirac_at_zero();
        if (kind == "dirac") return DelayKernel::dirac(num(j, path, "tau"));
        if (kind == "erlang") {
            const double shape = num(j, path, "shape");
            if (shape != static_cast<int>(shape)) fail(path + ".shape", "expected an integer");
            return DelayKernel::erlang(static_cast<int>(shape), num(j, path, "rate"));
        }
        if (kind == "tabulated") {
            for (const char* key : {"grid", "density"})
                if (!j.contains(key) || !j[key].is_array())
                    fail(path, std::string("missing array field '") + key + "'");
            return DelayKernel::tabulated(j["grid"].get<std::vector<double>>(),
                                          j["density"].get<std::vector<double>>());
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
    fail(path, "unknown kernel kind '" + kind + "'");
}

json dump_feedback(const FeedbackFn& f) {
    switch (f.kind()) {
    case FeedbackKind::Zero:
        return {{"kind", "zero"}};
    case FeedbackKind::Linear:
        return {{"kind", "linear"}, {"alpha", f.alpha()}};
    case FeedbackKind::ScaledLinear:
        return {{"kind", "scaled_linear"}, {"alpha", f.alpha()}, {"exp_factor", f.exp_factor()}};
    case FeedbackKind::HillUp:
        return {{"kind", "hill_up"}, {"vmax", f.vmax()}, {"K", f.K()}, {"n", f.n()}};
    case FeedbackKind::HillDown:
        return {{"kind", "hill_down"}, {"vmax", f.vmax()}, {"K", f.K()}, {"n", f.n()}};
    }
    return {};
}

json dump_statefn(const StateFn& s) {
    switch (s.kind()) {
    case StateKind::Constant:
        return {{"kind", "constant"}, {"c", s.c()}};
    case StateKind::HillGate:
        return {{"kind", "hill_gate"}, {"a", s.a()}, {"k", s.k()}, {"offset", s.offset()}};
    case StateKind::SaturatingLoss:
        return {{"kind", "saturating_loss"},
                {"alpha", s.alpha()},
                {"beta", s.beta()},
                {"K", s.K()},
                {"offset", s.offset()}};
    }
    return {};
}

json dump_kernel(const DelayKernel& k) {
    switch (k.kind()) {
    case KernelKind::DiracAtZero:
        return {{"kind", "none"}};
    case KernelKind::Dirac:
        return {{"kind", "dirac"}, {"tau", k.tau()}};
    case KernelKind::Erlang:
        return {{"kind", "erlang"}, {"shape", k.shape()}, {"rate", k.rate()}};
    case KernelKind::Tabulated:
        return {{"kind", "tabulated"}, {"grid", k.grid()}, {"density", k.density()}};
    }
    return {};
}

} // namespace

CyclicModel parse_model_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("stages") || !doc["stages"].is_array())
        fail("$", "expected an object with a 'stages' array");

    std::vector<Stage> stages;
    for (std::size_t i = 0; i < doc["stages"].size(); ++i) {
        const json& js = doc["stages"][i];
        const std::string path = "stages[" + std::to_string(i) + "]";
        if (!js.is_object()) fail(path, "expected an object");
        Stage s;
        if (!js.contains("feedback")) fail(path, "missing field 'feedback'");
        s.feedback = parse_feedback(js["feedback"], path + ".feedback");
        if (js.contains("kernel")) s.kernel = parse_kernel(js["kernel"], path + ".kernel");
        if (js.contains("gate")) s.gate = parse_statefn(js["gate"], path + ".gate");
        if (!js.contains("clearance")) fail(path, "missing field 'clearance'");
        s.clearance = parse_statefn(js["clearance"], path + ".clearance");
        stages.push_back(std::move(s));
    }

    std::vector<std::string> labels;
    if (doc.contains("labels")) {
        if (!doc["labels"].is_array()) fail("labels", "expected an array of strings");
        for (const json& l : doc["labels"]) {
            if (!l.is_string()) fail("labels", "expected an array of strings");
            labels.push_back(l.get<std::string>());
        }
    }
    try {
        return CyclicModel(std::move(stages), std::move(labels));
    } catch (const Error& e) {
        fail("$", e.what());
    }
}

std::string serialize_model(const CyclicModel& m) {
    json doc;
    doc["stages"] = json::array();
    for (const Stage& s : m.stages()) {
        json js;
        js["feedback"] = dump_feedback(s.feedback);
        js["kernel"] = dump_kernel(s.kernel);
        js["gate"] = dump_statefn(s.gate);
        js["clearance"] = dump_statefn(s.clearance);
        doc["stages"].push_back(std::move(js));
    }
    doc["labels"] = m.labels();
    return doc.dump(2);
}

} // namespace cdde
