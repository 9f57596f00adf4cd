#include "cdde/simulate.hpp"

#include <cmath>
#include <string>

namespace cdde {

Trajectory integrate_cyclic(const CyclicModel& m, const Trajectory& history,
                            const SimConfig& cfg) {
    const std::size_t n = m.size();
    const double h = cfg.h;
    if (!(h > 0.0)) throw Error("step size must be > 0");
    if (history.n_compartments() != n)
        throw InsufficientHistory("history has " + std::to_string(history.n_compartments()) +
                                  " compartments, model has " + std::to_string(n));

    const double H = m.max_horizon(cfg.tail_mass);
    const double span = history.t_end() - history.t_begin();
    if (span + h * 1e-9 < H)
        throw InsufficientHistory("history span " + std::to_string(span) +
                                  " shorter than kernel horizon " + std::to_string(H));
    for (const Stage& s : m.stages())
        if (s.kernel.kind() == KernelKind::Dirac && h > s.kernel.tau() * (1.0 + 1e-12))
            throw StepTooLarge("h = " + std::to_string(h) + " exceeds discrete delay " +
                               std::to_string(s.kernel.tau()));

    const double t_start = history.t_end();
    if (!(cfg.t_end > t_start)) throw Error("t_end must exceed the history end");

    // resample the history onto the output grid, covering the horizon
    const auto m_hist = static_cast<std::size_t>(std::ceil(H / h - 1e-9));
    Trajectory tr(t_start - static_cast<double>(m_hist) * h, h, n);
    {
        std::vector<double> state(n);
        for (std::size_t j = 0; j <= m_hist; ++j) {
            const double t = tr.t_begin() + static_cast<double>(j) * h;
            for (std::size_t c = 0; c < n; ++c) state[c] = history.value_extended(c, t);
            tr.append(state);
        }
    }

    std::vector<std::vector<double>> weights(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!m.stage(i).kernel.is_dirac())
            weights[i] = trapezoid_weights(m.stage(i).kernel, h, cfg.tail_mass);

    // Delayed inputs at a (sub)step time. Values not yet on the grid (the
    // current substep state) come from the explicit RK stage state.
    auto conv_at = [&](double t_base, const std::vector<double>& stage_state,
                       std::vector<double>& conv) {
        const double t_last = tr.t_end();
        for (std::size_t i = 0; i < n; ++i) {
            const Stage& s = m.stage(i);
            const std::size_t up = m.upstream(i);
            if (s.kernel.kind() == KernelKind::DiracAtZero) {
                conv[i] = stage_state[up];
            } else if (s.kernel.kind() == KernelKind::Dirac) {
                conv[i] = tr.value_extended(up, t_base - s.kernel.tau());
            } else {
                double acc = 0.0;
                const std::vector<double>& w = weights[i];
                for (std::size_t l = 0; l < w.size(); ++l) {
                    const double tq = t_base - static_cast<double>(l) * h;
                    const double x = tq > t_last + h * 1e-9 ? stage_state[up]
                                                           : tr.value_extended(up, tq);
                    acc += w[l] * x;
                }
                conv[i] = acc;
            }
        }
    };

    const auto n_steps = static_cast<std::size_t>(std::llround((cfg.t_end - t_start) / h));
    std::vector<double> conv(n), k1(n), k2(n), k3(n), k4(n), y2(n), y3(n), y4(n), ynew(n);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = tr.t_end();
        const std::vector<double> y = tr.back();
        conv_at(t, y, conv);
        k1 = m.rhs(y, conv);
        for (std::size_t c = 0; c < n; ++c) y2[c] = y[c] + 0.5 * h * k1[c];
        conv_at(t + 0.5 * h, y2, conv);
        k2 = m.rhs(y2, conv);
        for (std::size_t c = 0; c < n; ++c) y3[c] = y[c] + 0.5 * h * k2[c];
        conv_at(t + 0.5 * h, y3, conv);
        k3 = m.rhs(y3, conv);
        for (std::size_t c = 0; c < n; ++c) y4[c] = y[c] + h * k3[c];
        conv_at(t + h, y4, conv);
        k4 = m.rhs(y4, conv);
        for (std::size_t c = 0; c < n; ++c)
            ynew[c] = y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        tr.append(ynew);
    }
    return tr;
}

LctExpansion expand_erlang_lct(const CyclicModel& m) {
    std::vector<Stage> stages;
    std::vector<std::string> labels;
    std::vector<std::size_t> index_map(m.size());
    std::vector<LctExpansion::AuxInfo> aux;

    for (std::size_t i = 0; i < m.size(); ++i) {
        const Stage& s = m.stage(i);
        if (s.kernel.kind() == KernelKind::Tabulated)
            throw UnsupportedKernel("no finite chain represents a tabulated kernel");
        if (s.kernel.kind() == KernelKind::Erlang) {
            const int shape = s.kernel.shape();
            const double V = s.kernel.rate();
            for (int k = 1; k <= shape; ++k) {
                Stage a;
                a.feedback = FeedbackFn::linear(V);
                a.clearance = StateFn::constant(V);
                stages.push_back(a);
                labels.push_back(m.label(i) + "_lag" + std::to_string(k));
                aux.push_back({stages.size() - 1, m.upstream(i), DelayKernel::erlang(k, V)});
            }
            Stage direct = s;
            direct.kernel = DelayKernel::dirac_at_zero();
            stages.push_back(direct);
        } else {
            stages.push_back(s);
        }
        labels.push_back(m.label(i));
        index_map[i] = stages.size() - 1;
    }
    return {CyclicModel(std::move(stages), std::move(labels)), std::move(index_map),
            std::move(aux)};
}

Trajectory expand_lct_history(const LctExpansion& ex, const Trajectory& history,
                              double tail_mass) {
    const std::size_t n_new = ex.model.size();
    const double h = history.h();
    Trajectory out(history.t_begin(), h, n_new);

    std::vector<std::vector<double>> weights(ex.aux.size());
    for (std::size_t a = 0; a < ex.aux.size(); ++a)
        weights[a] = trapezoid_weights(ex.aux[a].kernel, h, tail_mass);

    std::vector<double> state(n_new);
    for (std::size_t j = 0; j < history.size(); ++j) {
        const double t = history.time(j);
        for (std::size_t i = 0; i < ex.index_map.size(); ++i)
            state[ex.index_map[i]] = history.value(i, j);
        for (std::size_t a = 0; a < ex.aux.size(); ++a) {
            double acc = 0.0;
            for (std::size_t l = 0; l < weights[a].size(); ++l)
                acc += weights[a][l] *
                       history.value_extended(ex.aux[a].source, t - static_cast<double>(l) * h);
            state[ex.aux[a].index] = acc;
        }
        out.append(state);
    }
    return out;
}

} // namespace cdde
