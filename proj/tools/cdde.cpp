#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cdde/config.hpp"
#include "cdde/presets.hpp"
#include "cdde/reduction.hpp"
#include "cdde/simulate.hpp"
#include "cdde/stability.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

struct ModelSource {
    cdde::CyclicModel model;
    std::string source;       // file path or preset://name
    json resolved_params;     // preset parameters after overrides
};

// leftover "--name value" tokens become preset parameter overrides
cdde::ParamMap collect_overrides(const std::vector<std::string>& extras) {
    cdde::ParamMap out;
    for (std::size_t i = 0; i + 1 < extras.size(); i += 2) {
        std::string key = extras[i];
        if (key.rfind("--", 0) != 0)
            throw CLI::ParseError("unexpected argument: " + key, 2);
        key = key.substr(2);
        std::size_t pos = 0;
        double value;
        try {
            value = std::stod(extras[i + 1], &pos);
        } catch (const std::exception&) {
            throw CLI::ParseError("expected a numeric value for --" + key, 2);
        }
        if (pos != extras[i + 1].size())
            throw CLI::ParseError("expected a numeric value for --" + key, 2);
        out[key] = value;
    }
    if (extras.size() % 2 != 0)
        throw CLI::ParseError("dangling argument: " + extras.back(), 2);
    return out;
}

ModelSource load_model(const std::string& model_file, const std::string& preset,
                       const cdde::ParamMap& overrides) {
    if (!model_file.empty() && !preset.empty())
        throw CLI::ParseError("--model and --preset are mutually exclusive", 2);
    if (!model_file.empty()) {
        if (!overrides.empty())
            throw CLI::ParseError("parameter overrides need --preset", 2);
        std::ifstream in(model_file);
        if (!in) throw cdde::Error("cannot open model file: " + model_file);
        std::stringstream ss;
        ss << in.rdbuf();
        return {cdde::parse_model_config(ss.str()), model_file, json::object()};
    }
    if (preset.empty()) throw CLI::ParseError("one of --model or --preset is required", 2);
    cdde::ParamMap params = cdde::preset_defaults(preset);
    for (const auto& [k, v] : overrides) {
        if (!params.count(k))
            throw CLI::ParseError("preset '" + preset + "' has no parameter '" + k + "'", 2);
        params[k] = v;
    }
    json resolved = json::object();
    for (const auto& [k, v] : params) resolved[k] = v;
    return {cdde::make_preset(preset, params), "preset://" + preset, resolved};
}

std::vector<double> parse_init(const std::string& init, std::size_t n) {
    if (init.empty()) return std::vector<double>(n, 1.0);
    std::vector<double> vals;
    std::stringstream ss(init);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() == 1) vals.assign(n, vals[0]);
    if (vals.size() != n)
        throw CLI::ParseError("--init needs 1 or " + std::to_string(n) + " values", 2);
    return vals;
}

std::complex<double> parse_complex(std::string s) {
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) throw CLI::ParseError("empty complex literal", 2);
    // forms: a, bi, a+bi, a-bi
    double re = 0.0, im = 0.0;
    if (s.back() == 'i' || s.back() == 'j') {
        s.pop_back();
        std::size_t split = s.npos;
        for (std::size_t i = 1; i < s.size(); ++i)
            if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;
        if (split == s.npos) {
            im = s.empty() || s == "+" ? 1.0 : (s == "-" ? -1.0 : std::stod(s));
        } else {
            re = std::stod(s.substr(0, split));
            const std::string rest = s.substr(split);
            im = rest == "+" ? 1.0 : (rest == "-" ? -1.0 : std::stod(rest));
        }
    } else {
        re = std::stod(s);
    }
    return {re, im};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_manifest(const std::string& command, const ModelSource& ms, const json& settings,
                    long seed, const std::vector<std::string>& outputs) {
    if (outputs.empty()) return;
    json m;
    m["command"] = command;
    m["model_source"] = ms.source;
    m["resolved_parameters"] = ms.resolved_params;
    m["settings"] = settings;
    m["seed"] = seed;
    m["tool_version"] = kVersion;
    m["outputs"] = outputs;
    std::ofstream out(outputs.front() + ".manifest.json");
    out << m.dump(2) << "\n";
}

void write_trajectory_csv(const std::string& path, const cdde::CyclicModel& m,
                          const cdde::Trajectory& tr, bool plot_data) {
    std::ofstream out(path);
    out << "t";
    for (const auto& l : m.labels()) out << "," << l;
    out << "\n";
    for (std::size_t j = 0; j < tr.size(); ++j) {
        out << fmt(tr.time(j));
        for (std::size_t c = 0; c < tr.n_compartments(); ++c) out << "," << fmt(tr.value(c, j));
        out << "\n";
    }
    if (plot_data) {
        std::ofstream p(path + ".plot.csv");
        p << "t,compartment,value\n";
        for (std::size_t c = 0; c < tr.n_compartments(); ++c)
            for (std::size_t j = 0; j < tr.size(); ++j)
                p << fmt(tr.time(j)) << "," << m.label(c) << "," << fmt(tr.value(c, j)) << "\n";
    }
}

cdde::Trajectory make_history(const cdde::CyclicModel& m, const std::string& init, double h,
                              double tail_mass) {
    const std::vector<double> vals = parse_init(init, m.size());
    const double span = std::max(std::ceil(m.max_horizon(tail_mass) / h) * h, h);
    return cdde::Trajectory::constant(-span, 0.0, h, vals);
}

std::vector<std::size_t> parse_eliminate(const std::string& s, std::size_t n) {
    std::vector<std::size_t> out;
    if (s.empty()) {
        for (std::size_t i = 0; i + 1 < n; ++i) out.push_back(i);
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const long v = std::stol(tok);
        if (v < 1 || static_cast<std::size_t>(v) > n)
            throw CLI::ParseError("--eliminate indices are 1-based stage numbers", 2);
        out.push_back(static_cast<std::size_t>(v) - 1);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cyclic delay systems: simulation, reduction and stability"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string model_file, preset, out_path, init, lambda_str, eliminate_str, scan_param;
    double h = 1e-3, t_end = 50.0, tail_mass = 1e-10;
    double eq_lo = 1e-9, eq_hi = 100.0;
    double tol = 1e-3;
    double re_min = -5.0, re_max = 2.0, im_max = 20.0;
    double scan_from = 0.0, scan_to = 1.0, x_star = std::numeric_limits<double>::quiet_NaN();
    std::size_t brackets = 200, grid = 24, scan_points = 20;
    long seed = 0;
    bool plot_data = false, lct_mode = false;

    auto add_common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print help");  // frees -h / --h for the step size
        sub->add_option("--model", model_file, "model config file (JSON)");
        sub->add_option("--preset", preset, "preset name: goodwin|yildirim|knauer|knauer_singular");
        sub->add_option("--h", h, "integration / quadrature step");
        sub->add_option("--t-end", t_end, "final time");
        sub->add_option("--tail-mass", tail_mass, "kernel truncation probability");
        sub->add_option("--out,-o", out_path, "output file");
        sub->add_option("--seed", seed, "seed recorded in the run manifest");
        sub->allow_extras();
    };

    CLI::App* sim = app.add_subcommand("simulate", "integrate the full system");
    add_common(sim);
    sim->add_option("--init", init, "constant history values (comma list or single value)");
    sim->add_flag("--plot-data", plot_data, "also write a long-format CSV for plotting");

    CLI::App* chk = app.add_subcommand("check-equivalence",
                                       "compare the full and reduced formulations");
    add_common(chk);
    chk->add_option("--init", init, "constant history values");
    chk->add_option("--eliminate", eliminate_str, "1-based stages to eliminate (default: all but last)");
    chk->add_option("--tol", tol, "pass/fail tolerance");
    chk->add_flag("--lct", lct_mode,
                  "compare against the erlang transit-chain expansion instead of the "
                  "stage-integral reduction");

    CLI::App* eq = app.add_subcommand("equilibria", "find equilibria of the reduced scalar form");
    add_common(eq);
    eq->add_option("--lo", eq_lo, "scan interval lower end");
    eq->add_option("--hi", eq_hi, "scan interval upper end");
    eq->add_option("--brackets", brackets, "number of scan sub-intervals");

    CLI::App* ch = app.add_subcommand("char", "evaluate the characteristic function");
    add_common(ch);
    ch->add_option("--lambda", lambda_str, "complex evaluation point, e.g. 1+2i")->required();
    ch->add_option("--x-star", x_star, "equilibrium (default: largest positive)");
    ch->add_option("--lo", eq_lo, "equilibrium scan lower end");
    ch->add_option("--hi", eq_hi, "equilibrium scan upper end");

    CLI::App* rt = app.add_subcommand("roots", "characteristic roots in a region");
    add_common(rt);
    rt->add_option("--x-star", x_star, "equilibrium (default: largest positive)");
    rt->add_option("--lo", eq_lo, "equilibrium scan lower end");
    rt->add_option("--hi", eq_hi, "equilibrium scan upper end");
    rt->add_option("--re-min", re_min, "region: min real part");
    rt->add_option("--re-max", re_max, "region: max real part");
    rt->add_option("--im-max", im_max, "region: max imaginary part");
    rt->add_option("--grid", grid, "Newton seed grid resolution");

    CLI::App* sc = app.add_subcommand("scan", "sweep a parameter and track the rightmost root");
    add_common(sc);
    sc->add_option("--scan-param", scan_param, "preset parameter to sweep")->required();
    sc->add_option("--scan-from", scan_from, "sweep start")->required();
    sc->add_option("--scan-to", scan_to, "sweep end")->required();
    sc->add_option("--scan-points", scan_points, "number of sweep points");
    sc->add_option("--lo", eq_lo, "equilibrium scan lower end");
    sc->add_option("--hi", eq_hi, "equilibrium scan upper end");
    sc->add_option("--re-min", re_min, "region: min real part");
    sc->add_option("--re-max", re_max, "region: max real part");
    sc->add_option("--im-max", im_max, "region: max imaginary part");
    sc->add_option("--grid", grid, "Newton seed grid resolution");

    CLI::App* val = app.add_subcommand("validate", "structural and hypothesis checks");
    add_common(val);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        const std::string cmd = active->get_name();
        const cdde::ParamMap overrides = collect_overrides(active->remaining());
        const ModelSource ms = load_model(model_file, preset, overrides);
        const cdde::CyclicModel& m = ms.model;

        cdde::SimConfig cfg;
        cfg.h = h;
        cfg.t_end = t_end;
        cfg.tail_mass = tail_mass;
        json settings{{"h", h}, {"t_end", t_end}, {"tail_mass", tail_mass}};

        if (cmd == "simulate") {
            const auto tr = cdde::integrate_cyclic(m, make_history(m, init, h, tail_mass), cfg);
            if (out_path.empty()) {
                std::cout << "final state at t = " << fmt(t_end) << ":\n";
                const auto y = tr.back();
                for (std::size_t c = 0; c < m.size(); ++c)
                    std::cout << "  " << m.label(c) << " = " << fmt(y[c]) << "\n";
            } else {
                write_trajectory_csv(out_path, m, tr, plot_data);
                std::vector<std::string> outs{out_path};
                if (plot_data) outs.push_back(out_path + ".plot.csv");
                settings["init"] = init;
                write_manifest(cmd, ms, settings, seed, outs);
            }
            return 0;
        }

        if (cmd == "check-equivalence" && lct_mode) {
            const auto hist = make_history(m, init, h, tail_mass);
            const auto full = cdde::integrate_cyclic(m, hist, cfg);
            const auto ex = cdde::expand_erlang_lct(m);
            const auto chain = cdde::integrate_cyclic(
                ex.model, cdde::expand_lct_history(ex, hist, tail_mass), cfg);
            bool pass = true;
            for (std::size_t c = 0; c < m.size(); ++c) {
                double scale = 1e-12, dev = 0.0;
                for (std::size_t j = 0; j < full.size(); ++j)
                    if (full.time(j) >= 0.0) scale = std::max(scale, std::abs(full.value(c, j)));
                for (std::size_t j = 0; j < full.size(); ++j) {
                    const double t = full.time(j);
                    if (t < 0.0) continue;
                    dev = std::max(dev, std::abs(full.value(c, j) -
                                                 chain.interpolate(ex.index_map[c], t)) / scale);
                }
                std::cout << m.label(c) << " (transit chain) deviation = " << fmt(dev) << "\n";
                pass = pass && dev <= tol;
            }
            std::cout << (pass ? "pass" : "fail") << " (tol " << fmt(tol) << ")\n";
            return 0;
        }

        if (cmd == "check-equivalence") {
            const auto elim = parse_eliminate(eliminate_str, m.size());
            const auto rep = cdde::check_equivalence(m, make_history(m, init, h, tail_mass), cfg,
                                                     elim, tol);
            for (const auto& e : rep.entries)
                std::cout << e.label << (e.reconstructed ? " (stage integral)" : " (reduced run)")
                          << " deviation = " << fmt(e.deviation) << "\n";
            std::cout << (rep.pass ? "pass" : "fail") << " (tol " << fmt(rep.tol) << ")\n";
            if (!out_path.empty()) {
                std::ofstream o(out_path);
                o << "compartment,deviation,mode\n";
                for (const auto& e : rep.entries)
                    o << e.label << "," << fmt(e.deviation) << ","
                      << (e.reconstructed ? "stage_integral" : "reduced_run") << "\n";
                settings["eliminate"] = eliminate_str;
                settings["tol"] = tol;
                write_manifest(cmd, ms, settings, seed, {out_path});
            }
            return 0;
        }

        if (cmd == "equilibria") {
            const auto rep = cdde::find_equilibria(m, eq_lo, eq_hi, brackets);
            if (rep.roots.empty()) {
                std::cerr << "no equilibrium found in [" << eq_lo << ", " << eq_hi << "]\n";
                return 1;
            }
            for (const auto& r : rep.roots) {
                std::cout << "x* = " << fmt(r.x_star) << "  residual = " << fmt(r.residual)
                          << "  mu* = " << fmt(r.mu_star)
                          << (r.positive ? "  (positive)" : "  (not positive)") << "\n";
                for (std::size_t c = 0; c < m.size(); ++c)
                    std::cout << "  " << m.label(c) << "* = " << fmt(r.stage_values[c]) << "\n";
            }
            for (const auto& f : rep.existence_flags) std::cout << "note: " << f << "\n";
            if (!out_path.empty()) {
                std::ofstream o(out_path);
                o << "x_star,residual,mu_star,positive\n";
                for (const auto& r : rep.roots)
                    o << fmt(r.x_star) << "," << fmt(r.residual) << "," << fmt(r.mu_star) << ","
                      << (r.positive ? 1 : 0) << "\n";
                settings["lo"] = eq_lo;
                settings["hi"] = eq_hi;
                settings["brackets"] = brackets;
                write_manifest(cmd, ms, settings, seed, {out_path});
            }
            return 0;
        }

        auto pick_equilibrium = [&]() -> double {
            if (!std::isnan(x_star)) return x_star;
            const auto rep = cdde::find_equilibria(m, eq_lo, eq_hi, brackets);
            const cdde::EquilibriumReport::Root* best = nullptr;
            for (const auto& r : rep.roots)
                if (r.positive && (!best || r.x_star > best->x_star)) best = &r;
            if (!best) throw cdde::Error("no positive equilibrium; pass --x-star explicitly");
            return best->x_star;
        };

        if (cmd == "char") {
            const auto cf = cdde::build_characteristic(m, pick_equilibrium());
            const auto l = parse_complex(lambda_str);
            const auto v = cf(l);
            const auto cv = cf.cleared(l);
            std::cout << "Delta(" << fmt(l.real()) << (l.imag() >= 0 ? "+" : "") << fmt(l.imag())
                      << "i) = " << fmt(v.real()) << (v.imag() >= 0 ? "+" : "") << fmt(v.imag())
                      << "i\n";
            std::cout << "cleared = " << fmt(cv.real()) << (cv.imag() >= 0 ? "+" : "")
                      << fmt(cv.imag()) << "i\n";
            return 0;
        }

        if (cmd == "roots") {
            const auto cf = cdde::build_characteristic(m, pick_equilibrium());
            const auto rep = cdde::find_roots(cf, {re_min, re_max, im_max}, grid);
            for (std::size_t i = 0; i < rep.roots.size(); ++i)
                std::cout << fmt(rep.roots[i].real()) << " + " << fmt(rep.roots[i].imag())
                          << "i  (residual " << fmt(rep.residuals[i]) << ")\n";
            std::cout << "rightmost real part: " << fmt(rep.rightmost_real_part) << "\n";
            if (!out_path.empty()) {
                std::ofstream o(out_path);
                o << "re,im,residual\n";
                for (std::size_t i = 0; i < rep.roots.size(); ++i)
                    o << fmt(rep.roots[i].real()) << "," << fmt(rep.roots[i].imag()) << ","
                      << fmt(rep.residuals[i]) << "\n";
                settings["region"] = {{"re_min", re_min}, {"re_max", re_max}, {"im_max", im_max}};
                settings["grid"] = grid;
                write_manifest(cmd, ms, settings, seed, {out_path});
            }
            return 0;
        }

        if (cmd == "scan") {
            if (preset.empty())
                throw CLI::ParseError("scan sweeps a preset parameter; --preset is required", 2);
            cdde::ParamMap base = cdde::preset_defaults(preset);
            for (const auto& [k, v] : overrides) base[k] = v;
            if (!base.count(scan_param))
                throw CLI::ParseError("unknown scan parameter: " + scan_param, 2);
            auto family = [&](double v) {
                cdde::ParamMap p = base;
                p[scan_param] = v;
                return cdde::make_preset(preset, p);
            };
            std::vector<double> pts;
            for (std::size_t i = 0; i < scan_points; ++i)
                pts.push_back(scan_from + (scan_to - scan_from) * static_cast<double>(i) /
                                              static_cast<double>(scan_points - 1));
            const auto rep = cdde::hopf_scan(family, pts, eq_lo, eq_hi,
                                             {re_min, re_max, im_max}, grid);
            for (const auto& p : rep.points)
                std::cout << scan_param << " = " << fmt(p.param)
                          << "  rightmost = " << fmt(p.rightmost_re) << " + "
                          << fmt(p.rightmost_im) << "i  (" << p.n_roots << " roots)\n";
            for (const auto& c : rep.crossings)
                std::cout << "crossing at " << scan_param << " = " << fmt(c.param)
                          << ", omega = " << fmt(c.omega) << "\n";
            if (!out_path.empty()) {
                std::ofstream o(out_path);
                o << "param,rightmost_re,rightmost_im,n_roots_in_region\n";
                for (const auto& p : rep.points)
                    o << fmt(p.param) << "," << fmt(p.rightmost_re) << "," << fmt(p.rightmost_im)
                      << "," << p.n_roots << "\n";
                settings["scan_param"] = scan_param;
                settings["scan_from"] = scan_from;
                settings["scan_to"] = scan_to;
                settings["scan_points"] = scan_points;
                write_manifest(cmd, ms, settings, seed, {out_path});
            }
            return 0;
        }

        if (cmd == "validate") {
            const auto rep = cdde::validate(m);
            for (const auto& e : rep.errors) std::cout << "error: " << e << "\n";
            for (const auto& f : rep.flags) std::cout << "flag: " << f << "\n";
            std::cout << "non-negativity hypotheses: " << (rep.nonneg_hypotheses ? "hold" : "violated")
                      << "\n";
            std::cout << "uniform clearance: " << (rep.uniform_clearance ? "yes" : "no") << "\n";
            std::cout << (rep.ok() ? "valid" : "invalid") << "\n";
            return rep.ok() ? 0 : 1;
        }

        std::cerr << "unknown command\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const cdde::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
