#include <doctest.h>

#include <cmath>

#include "cdde/config.hpp"
#include "cdde/model.hpp"
#include "cdde/presets.hpp"

using namespace cdde;

TEST_CASE("stage wiring and labels") {
    const auto m = make_preset("goodwin");
    REQUIRE(m.size() == 3);
    CHECK(m.labels() == std::vector<std::string>{"I", "E", "M"});
    CHECK(m.upstream(0) == 2);
    CHECK(m.upstream(1) == 0);
    CHECK(m.upstream(2) == 1);
    CHECK(m.max_horizon(1e-10) == doctest::Approx(0.0));
}

TEST_CASE("negative-feedback loop right-hand side") {
    ParamMap p{{"alpha_I", 1.3}, {"alpha_E", 0.7}, {"gamma_I", 0.4}, {"gamma_E", 0.5},
               {"gamma_M", 0.6}, {"F_vmax", 2.0}, {"F_K", 1.5}, {"F_n", 3.0}};
    const auto m = make_preset("goodwin", p);
    const std::vector<double> x{0.3, 0.8, 1.1};
    const std::vector<double> conv{x[2], x[0], x[1]};
    const auto dx = m.rhs(x, conv);
    CHECK(dx[0] == doctest::Approx(1.3 * x[2] - 0.4 * x[0]).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(0.7 * x[0] - 0.5 * x[1]).epsilon(1e-12));
    const double F = 2.0 / (1.0 + std::pow(x[1] / 1.5, 3.0));
    CHECK(dx[2] == doctest::Approx(F - 0.6 * x[2]).epsilon(1e-12));
}

TEST_CASE("operon right-hand side with delayed inputs") {
    const auto p = preset_defaults("yildirim");
    const auto m = make_preset("yildirim");
    REQUIRE(m.labels() == std::vector<std::string>{"M", "I", "E"});
    CHECK(m.stage(0).kernel == DelayKernel::dirac(p.at("tau_M")));
    CHECK(m.stage(1).kernel == DelayKernel::dirac(p.at("tau_I")));

    const std::vector<double> x{0.6, 0.9, 1.2};
    const double E_lag = 0.8, M_lag = 0.5;  // delayed upstream values
    const auto dx = m.rhs(x, {E_lag, M_lag, x[1]});

    const double c = std::exp(-p.at("nu_E") * p.at("tau_M"));
    const double F = p.at("F_vmax") /
                     (1.0 + std::pow(c * E_lag / p.at("F_K"), p.at("F_n")));
    CHECK(dx[0] == doctest::Approx(F - p.at("gamma_M") * x[0]).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(p.at("alpha_I") * std::exp(-p.at("nu_M") * p.at("tau_I")) *
                                       M_lag - p.at("gamma_I") * x[1]).epsilon(1e-12));
    const double gate = p.at("alpha_E") - p.at("beta_E") * x[2] / (p.at("K_E") + x[2]);
    CHECK(dx[2] == doctest::Approx(gate * x[1] - p.at("gamma_E") * x[2]).epsilon(1e-12));
}

TEST_CASE("stem-cell hierarchy right-hand side") {
    const auto p = preset_defaults("knauer");
    const double a1 = p.at("a1"), a2 = p.at("a2"), p1 = p.at("p1"), p2 = p.at("p2"),
                 k = p.at("k"), d3 = p.at("d3");
    const auto m = make_preset("knauer");
    const std::vector<double> x{0.4, 0.7, 1.1};
    const auto dx = m.rhs(x, {x[2], x[0], x[1]});
    const double s = 1.0 / (1.0 + k * x[2]);
    CHECK(dx[0] == doctest::Approx((2.0 * a1 * s - 1.0) * p1 * x[0]).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(2.0 * (1.0 - a1 * s) * p1 * x[0] +
                                   (2.0 * a2 * s - 1.0) * p2 * x[1]).epsilon(1e-12));
    CHECK(dx[2] == doctest::Approx(2.0 * (1.0 - a2 * s) * p2 * x[1] - d3 * x[2]).epsilon(1e-12));
}

TEST_CASE("two-stage variant drops the top compartment") {
    const auto p = preset_defaults("knauer_singular");
    const double a2 = p.at("a2"), p2 = p.at("p2"), k = p.at("k"), d3 = p.at("d3");
    const auto m = make_preset("knauer_singular");
    REQUIRE(m.size() == 2);
    const std::vector<double> x{0.9, 0.5};
    const auto dx = m.rhs(x, {x[1], x[0]});
    const double s = 1.0 / (1.0 + k * x[1]);
    CHECK(dx[0] == doctest::Approx((2.0 * a2 * s - 1.0) * p2 * x[0]).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(2.0 * (1.0 - a2 * s) * p2 * x[0] - d3 * x[1]).epsilon(1e-12));
}

TEST_CASE("preset parameter handling") {
    CHECK(preset_names().size() == 4);
    CHECK_THROWS_AS(make_preset("goodwin", {{"bogus", 1.0}}), UnknownParameter);
    CHECK_THROWS_AS(make_preset("nope"), ModelError);
    CHECK_THROWS_AS(make_preset("goodwin", {{"gamma_I", -1.0}}), InfeasibleParameters);
}

TEST_CASE("structural validation") {
    const auto good = validate(make_preset("goodwin"));
    CHECK(good.ok());
    CHECK(good.nonneg_hypotheses);
    CHECK(good.uniform_clearance);

    const auto kn = validate(make_preset("knauer"));
    CHECK(kn.ok());
    CHECK_FALSE(kn.uniform_clearance);
    bool flagged = false;
    for (const auto& f : kn.flags)
        flagged = flagged || f.find("feedback") != std::string::npos;
    CHECK(flagged);

    CHECK_THROWS_AS(CyclicModel({}), ModelError);
    Stage s;
    s.feedback = FeedbackFn::linear(1.0);
    const auto single = validate(CyclicModel({s}));
    CHECK_FALSE(single.ok());
}

TEST_CASE("config round-trip") {
    for (const auto& name : preset_names()) {
        const auto m = make_preset(name);
        CHECK(parse_model_config(serialize_model(m)) == m);
    }
}

TEST_CASE("config parse diagnostics") {
    CHECK_THROWS_AS(parse_model_config("not json"), ParseError);
    CHECK_THROWS_AS(parse_model_config(R"({"stages": []})"), ParseError);
    CHECK_THROWS_AS(parse_model_config(
                        R"({"stages": [{"feedback": {"kind": "warp"}}]})"),
                    ParseError);
    try {
        parse_model_config(
            R"({"stages": [{"feedback": {"kind": "linear"}},
                           {"feedback": {"kind": "linear", "alpha": 1.0}}]})");
        FAIL("missing field not reported");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("stages[0]") != std::string::npos);
    }
    // invariant violations surface as parse errors too
    CHECK_THROWS_AS(parse_model_config(
                        R"({"stages": [{"feedback": {"kind": "linear", "alpha": -2.0}},
                                       {"feedback": {"kind": "linear", "alpha": 1.0}}]})"),
                    ParseError);
}

TEST_CASE("hand-written config with kernels") {
    const char* doc = R"({
      "stages": [
        {"feedback": {"kind": "linear", "alpha": 2.0},
         "kernel": {"kind": "erlang", "shape": 3, "rate": 1.5},
         "clearance": {"kind": "constant", "c": 0.4}},
        {"feedback": {"kind": "hill_down", "vmax": 1.0, "K": 2.0, "n": 4.0},
         "kernel": {"kind": "dirac", "tau": 0.25},
         "gate": {"kind": "hill_gate", "a": -1.0, "k": 2.0, "offset": 2.0},
         "clearance": {"kind": "constant", "c": 0.7}}
      ],
      "labels": ["u", "v"]})";
    const auto m = parse_model_config(doc);
    REQUIRE(m.size() == 2);
    CHECK(m.stage(0).kernel == DelayKernel::erlang(3, 1.5));
    CHECK(m.stage(1).kernel == DelayKernel::dirac(0.25));
    CHECK(m.label(1) == "v");
    CHECK(m.max_horizon(1e-10) == doctest::Approx(DelayKernel::erlang(3, 1.5).horizon(1e-10)));
    CHECK(parse_model_config(serialize_model(m)) == m);
}
