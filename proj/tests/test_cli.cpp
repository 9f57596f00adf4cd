#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string tmp = "cli_out.txt";
    const std::string cmd = std::string(CDDE_CLI_PATH) + " " + args + " > " + tmp + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(tmp.c_str());
    return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("exit codes") {
    CHECK(run("validate --preset goodwin").code == 0);
    CHECK(run("simulate --preset goodwin --t-end 1").code == 0);
    CHECK(run("simulate").code == 2);                       // missing model source
    CHECK(run("simulate --preset goodwin --bogus 1").code == 2);
    CHECK(run("simulate --preset goodwin --gamma_I nope").code == 2);
    CHECK(run("frobnicate").code != 0);
    CHECK(run("simulate --model does_not_exist.json --t-end 1").code == 1);
    CHECK(run("equilibria --preset knauer --a2 0.95 --lo 1e-6 --hi 0.0001").code == 1);
}

TEST_CASE("parameter overrides reach the model") {
    auto first_root = [](const std::string& text) {
        const auto pos = text.find("x* = ");
        REQUIRE(pos != std::string::npos);
        return std::stod(text.substr(pos + 5));
    };
    const auto a = run("equilibria --preset knauer");
    const auto b = run("equilibria --preset knauer --a1 0.75");
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    CHECK(first_root(a.out) == doctest::Approx(0.8).epsilon(1e-9));   // (2*0.9 - 1)/1
    CHECK(first_root(b.out) == doctest::Approx(0.5).epsilon(1e-9));   // (2*0.75 - 1)/1
}

TEST_CASE("csv output, manifest, and determinism") {
    const std::string out = "cli_traj.csv";
    const std::string cmd = "simulate --preset goodwin --t-end 2 --h 0.01 -o " + out;
    REQUIRE(run(cmd).code == 0);
    const std::string first = slurp(out);
    CHECK(first.rfind("t,I,E,M\n", 0) == 0);
    const std::string manifest = slurp(out + ".manifest.json");
    CHECK(manifest.find("\"model_source\"") != std::string::npos);
    CHECK(manifest.find("preset://goodwin") != std::string::npos);

    REQUIRE(run(cmd).code == 0);
    CHECK(slurp(out) == first);  // byte-identical reruns

    std::remove(out.c_str());
    std::remove((out + ".manifest.json").c_str());
}

TEST_CASE("plot data companion file") {
    const std::string out = "cli_plot.csv";
    REQUIRE(run("simulate --preset knauer --t-end 1 --h 0.01 --plot-data -o " + out).code == 0);
    const std::string plot = slurp(out + ".plot.csv");
    CHECK(plot.rfind("t,compartment,value\n", 0) == 0);
    CHECK(plot.find(",u2,") != std::string::npos);
    std::remove(out.c_str());
    std::remove((out + ".plot.csv").c_str());
    std::remove((out + ".manifest.json").c_str());
}

TEST_CASE("equivalence and analysis subcommands") {
    const auto eqv = run("check-equivalence --preset goodwin --t-end 10 --h 0.01");
    CHECK(eqv.code == 0);
    CHECK(eqv.out.find("pass") != std::string::npos);

    const auto ch = run("char --preset goodwin --lambda 0.5+1.2i");
    CHECK(ch.code == 0);
    CHECK(ch.out.find("Delta(") != std::string::npos);

    const auto rt = run("roots --preset goodwin");
    CHECK(rt.code == 0);
    CHECK(rt.out.find("rightmost real part") != std::string::npos);

    const auto sc = run("scan --preset knauer --a2 0.3 --p2 0.5 "
                        "--scan-param d3 --scan-from 0.3 --scan-to 0.4 --scan-points 5");
    CHECK(sc.code == 0);
    CHECK(sc.out.find("crossing at d3") != std::string::npos);
}

TEST_CASE("check-equivalence --lct compares against the transit chain") {
    const std::string doc = R"({"stages": [
        {"feedback": {"kind": "linear", "alpha": 1.2},
         "kernel": {"kind": "erlang", "shape": 3, "rate": 1.5},
         "clearance": {"kind": "constant", "c": 0.7}},
        {"feedback": {"kind": "hill_down", "vmax": 2.0, "K": 1.0, "n": 2.0},
         "clearance": {"kind": "constant", "c": 0.5}}],
        "labels": ["u", "v"]})";
    std::ofstream("cli_erlang.json") << doc;
    const auto r = run("check-equivalence --model cli_erlang.json --lct --h 0.005 --t-end 30");
    CHECK(r.code == 0);
    CHECK(r.out.find("transit chain") != std::string::npos);
    CHECK(r.out.find("pass") != std::string::npos);
    std::remove("cli_erlang.json");
}

TEST_CASE("model file round-trips through the cli") {
    const auto eq = run("equilibria --preset goodwin");
    // serialize a preset, feed the file back in
    const std::string doc = R"({"stages": [
        {"feedback": {"kind": "linear", "alpha": 1.0},
         "clearance": {"kind": "constant", "c": 1.0}},
        {"feedback": {"kind": "linear", "alpha": 1.0},
         "clearance": {"kind": "constant", "c": 1.0}},
        {"feedback": {"kind": "hill_down", "vmax": 1.0, "K": 1.0, "n": 2.0},
         "clearance": {"kind": "constant", "c": 1.0}}],
        "labels": ["I", "E", "M"]})";
    std::ofstream("cli_model.json") << doc;
    const auto eq2 = run("equilibria --model cli_model.json");
    CHECK(eq2.code == 0);
    CHECK(eq.out == eq2.out);
    std::remove("cli_model.json");
}
