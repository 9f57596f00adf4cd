#include "cdde/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cdde {

namespace {

// Front-clamped linear interpolation on a raw column (constant
// pre-extension before the grid start; queries never pass the end here).
double col_value(const std::vector<double>& col, double t_begin, double h, double t) {
    double u = (t - t_begin) / h;
    if (u <= 0.0) return col.front();
    if (u >= static_cast<double>(col.size() - 1)) return col.back();
    const auto j = static_cast<std::size_t>(u);
    const double w = u - static_cast<double>(j);
    return (1.0 - w) * col[j] + w * col[j + 1];
}

// Delayed convolution of a column against a stage kernel at time t.
double conv_value(const Stage& s, const std::vector<double>& col, double t_begin, double h,
                  const std::vector<double>& weights, double t) {
    if (s.kernel.kind() == KernelKind::DiracAtZero) return col_value(col, t_begin, h, t);
    if (s.kernel.kind() == KernelKind::Dirac)
        return col_value(col, t_begin, h, t - s.kernel.tau());
    double acc = 0.0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        acc += weights[l] * col_value(col, t_begin, h, t - static_cast<double>(l) * h);
    return acc;
}

double positive_clearance_bound(const Stage& s, const QuadSettings& qs) {
    return std::isnan(qs.mu_min) ? s.clearance.inf_on_nonneg() : qs.mu_min;
}

// Advance x' = r(t) - m(t) x across one step by the exponential trapezoid
// recurrence (exact integrating factor, trapezoid on the source).
double recurrence_step(double x, double r0, double m0, double r1, double m1, double h) {
    const double E = std::exp(-0.5 * h * (m0 + m1));
    return x * E + 0.5 * h * (r0 * E + r1);
}

// Fill `out` with stage i's integral-form values on the whole grid, given
// upstream and last-compartment columns. The first node is seeded by
// pointwise quadrature (exact for constant pre-history), the rest by the
// exponential recurrence.
struct SweepInputs {
    const std::vector<double>* upstream;
    const std::vector<double>* xn;
    double t_begin;
    double h;
};

void stage_sweep(const CyclicModel& m, std::size_t i, const SweepInputs& in,
                 const QuadSettings& qs, std::vector<double>& out, bool* fallback,
                 std::size_t seed_index = 0, bool seed_pinned = false) {
    const Stage& s = m.stage(i);
    const std::size_t M = in.xn->size();
    std::vector<double> weights;
    if (!s.kernel.is_dirac()) weights = trapezoid_weights(s.kernel, in.h, qs.tail_mass);

    std::vector<double> r(M), mu(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double t = in.t_begin + in.h * static_cast<double>(j);
        const double xn = (*in.xn)[j];
        r[j] = s.gate.eval(xn) *
               s.feedback.eval(conv_value(s, *in.upstream, in.t_begin, in.h, weights, t));
        mu[j] = s.clearance.eval(xn);
    }

    out.resize(M);
    // seed: the integral from -inf to the seed node under constant
    // pre-extension; with mu > 0 this is r/mu plus the decaying memory of
    // the (constant) pre-history, which is exactly r/mu.
    const double mu_lo = positive_clearance_bound(s, qs);
    if (seed_pinned || seed_index > 0) {
        // caller pinned earlier nodes already
    } else if (mu_lo > 0.0 || mu[0] > 0.0) {
        out[0] = r[0] / (mu[0] > 0.0 ? mu[0] : mu_lo);
    } else {
        out[0] = 0.0;
        if (fallback) *fallback = true;
    }
    for (std::size_t j = seed_index + 1; j < M; ++j)
        out[j] = recurrence_step(out[j - 1], r[j - 1], mu[j - 1], r[j], mu[j], in.h);
}

// Sequentially reconstruct compartments 1..count from the scalar history of
// the last compartment.
std::vector<std::vector<double>> sweep_chain(const CyclicModel& m, const Trajectory& psi,
                                             std::size_t count, const QuadSettings& qs,
                                             bool* fallback) {
    std::vector<double> xn(psi.samples(0));
    std::vector<std::vector<double>> cols(count);
    for (std::size_t i = 0; i < count; ++i) {
        SweepInputs in{i == 0 ? &xn : &cols[i - 1], &xn, psi.t_begin(), psi.h()};
        stage_sweep(m, i, in, qs, cols[i], fallback);
    }
    return cols;
}

} // namespace

StageIntegralEvaluator::StageIntegralEvaluator(const CyclicModel& m, std::size_t stage,
                                               QuadSettings qs)
    : model_(&m), stage_(stage), qs_(qs),
      mu_lo_(positive_clearance_bound(m.stage(stage), qs)) {}

double StageIntegralEvaluator::eval(const Trajectory& tr, double t) const {
    const double h = tr.h();
    if (t > tr.t_end() + h * 1e-9 || t < tr.t_begin() - h * 1e-9)
        throw InsufficientHistory("evaluation time outside the trajectory span");

    const Stage& s = model_->stage(stage_);
    const std::size_t up = model_->upstream(stage_);
    const std::size_t last = model_->size() - 1;
    std::vector<double> weights;
    if (!s.kernel.is_dirac()) weights = trapezoid_weights(s.kernel, h, qs_.tail_mass);

    const double depth = t - tr.t_begin();
    double s_max;
    if (mu_lo_ > 0.0) {
        s_max = std::min(-std::log(qs_.survival_cutoff) / mu_lo_, depth);
    } else {
        s_max = depth;
        fallback_horizon_ = true;
    }
    const auto L = static_cast<std::size_t>(std::ceil(std::max(s_max, h) / h - 1e-9));

    const std::vector<double>& upcol = tr.samples(up);
    const std::vector<double>& xncol = tr.samples(last);

    double acc = 0.0, I = 0.0;  // I = int_{t-s}^t mu
    double prev_a = 0.0, prev_mu = 0.0;
    for (std::size_t j = 0; j <= L; ++j) {
        const double tq = t - static_cast<double>(j) * h;
        const double xn = col_value(xncol, tr.t_begin(), h, tq);
        const double mu = s.clearance.eval(xn);
        if (j > 0) I += 0.5 * h * (prev_mu + mu);
        const double surv = std::exp(-I);
        const double a = s.gate.eval(xn) *
                         s.feedback.eval(conv_value(s, upcol, tr.t_begin(), h, weights, tq)) *
                         surv;
        if (j > 0) acc += 0.5 * h * (prev_a + a);
        prev_a = a;
        prev_mu = mu;
        if (surv < qs_.survival_cutoff) return acc;
    }
    // analytic tail over the constant pre-extension
    const double xn0 = xncol.front();
    const double mu0 = s.clearance.eval(xn0);
    if (mu0 > 0.0) {
        const double r0 = s.gate.eval(xn0) * s.feedback.eval(upcol.front());
        acc += std::exp(-I) * r0 / mu0;
    } else if (std::exp(-I) > qs_.survival_cutoff) {
        fallback_horizon_ = true;
    }
    return acc;
}

double nested_G(const CyclicModel& m, std::size_t up_to, const Trajectory& xn_history,
                double t, QuadSettings qs) {
    if (up_to == 0) return xn_history.interpolate(0, t);
    if (up_to >= m.size()) throw Error("nested_G: stage index out of range");
    bool fallback = false;
    const auto cols = sweep_chain(m, xn_history, up_to, qs, &fallback);
    return col_value(cols[up_to - 1], xn_history.t_begin(), xn_history.h(), t);
}

MappedHistory map_history(const CyclicModel& m, const Trajectory& psi, QuadSettings qs) {
    const std::size_t n = m.size();
    bool fallback = false;
    const auto cols = sweep_chain(m, psi, n - 1, qs, &fallback);

    Trajectory out(psi.t_begin(), psi.h(), n);
    std::vector<double> state(n);
    for (std::size_t j = 0; j < psi.size(); ++j) {
        for (std::size_t i = 0; i + 1 < n; ++i) state[i] = cols[i][j];
        state[n - 1] = psi.value(0, j);
        out.append(state);
    }

    double compounded = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Stage& s = m.stage(i);
        const double mu_lo = positive_clearance_bound(s, qs);
        compounded += s.kernel.horizon(qs.tail_mass) +
                      (mu_lo > 0.0 ? -std::log(qs.survival_cutoff) / mu_lo
                                   : psi.t_end() - psi.t_begin());
    }
    const double valid_from = std::min(psi.t_begin() + compounded, psi.t_end());
    return {std::move(out), valid_from, fallback};
}

ConsistencyReport check_consistency(const CyclicModel& m, const Trajectory& tr, double tol,
                                    QuadSettings qs) {
    ConsistencyReport rep;
    const double t_ref = tr.t_end();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const StageIntegralEvaluator ev(m, i, qs);
        const Stage& consumer = m.stage((i + 1) % m.size());

        double scale = 1e-30;
        for (double v : tr.samples(i)) scale = std::max(scale, std::abs(v));

        double dev = 0.0;
        if (consumer.kernel.is_dirac()) {
            const double t = t_ref - consumer.kernel.tau();
            dev = std::abs(tr.interpolate(i, t) - ev.eval(tr, t)) / scale;
        } else {
            // sample the consumer kernel at a few dozen points and take the
            // weight-normalized mean absolute deviation
            const double T = consumer.kernel.horizon(qs.tail_mass);
            const std::size_t pts = 33;
            double wsum = 0.0, acc = 0.0;
            for (std::size_t j = 0; j < pts; ++j) {
                const double s = T * static_cast<double>(j) / static_cast<double>(pts - 1);
                const double w = consumer.kernel.pdf(s);
                const double t = t_ref - s;
                acc += w * std::abs(tr.interpolate(i, t) - ev.eval(tr, t));
                wsum += w;
            }
            dev = wsum > 0.0 ? acc / (wsum * scale) : 0.0;
        }
        const bool pass = dev <= tol;
        rep.entries.push_back({i, dev, tol, pass});
        rep.pass = rep.pass && pass;
    }
    return rep;
}

ReducedSystem partial_reduce(const CyclicModel& m, const std::vector<std::size_t>& eliminate,
                             QuadSettings qs) {
    std::vector<std::size_t> elim(eliminate);
    std::sort(elim.begin(), elim.end());
    elim.erase(std::unique(elim.begin(), elim.end()), elim.end());
    for (std::size_t j = 0; j + 1 < elim.size(); ++j)
        if (elim[j + 1] != elim[j] + 1)
            throw NonContiguousElimination("eliminated stages must form a contiguous run");
    if (!elim.empty()) {
        if (elim.back() >= m.size())
            throw NonContiguousElimination("eliminated stage index out of range");
        if (elim.back() == m.size() - 1)
            throw NonContiguousElimination("the last compartment cannot be eliminated");
    }
    std::vector<std::size_t> retained;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!std::binary_search(elim.begin(), elim.end(), i)) retained.push_back(i);
    return {m, std::move(elim), std::move(retained), qs};
}

Trajectory integrate_reduced(const ReducedSystem& rs, const Trajectory& history,
                             const SimConfig& cfg) {
    const CyclicModel& m = rs.model;
    const std::size_t n = m.size();
    const double h = cfg.h;
    if (history.n_compartments() != n)
        throw InsufficientHistory("history must cover every compartment");

    const double H = m.max_horizon(cfg.tail_mass);
    const double span = history.t_end() - history.t_begin();
    if (span + h * 1e-9 < H)
        throw InsufficientHistory("history span shorter than kernel horizon");
    for (const Stage& s : m.stages())
        if (s.kernel.kind() == KernelKind::Dirac && h > s.kernel.tau() * (1.0 + 1e-12))
            throw StepTooLarge("h exceeds a discrete delay");

    const double t_start = history.t_end();
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

    std::vector<bool> is_elim(n, false);
    for (std::size_t e : rs.eliminated) is_elim[e] = true;

    // delayed input of stage i at time t_base; values newer than the grid
    // come from `fresh` (the RK stage state or the in-progress new node)
    auto conv_at = [&](std::size_t i, double t_base, const std::vector<double>& fresh) {
        const Stage& s = m.stage(i);
        const std::size_t up = m.upstream(i);
        const double t_last = tr.t_end();
        if (s.kernel.kind() == KernelKind::DiracAtZero)
            return t_base > t_last + h * 1e-9 ? fresh[up] : tr.value_extended(up, t_base);
        if (s.kernel.kind() == KernelKind::Dirac)
            return tr.value_extended(up, t_base - s.kernel.tau());
        double acc = 0.0;
        for (std::size_t l = 0; l < weights[i].size(); ++l) {
            const double tq = t_base - static_cast<double>(l) * h;
            acc += weights[i][l] *
                   (tq > t_last + h * 1e-9 ? fresh[up] : tr.value_extended(up, tq));
        }
        return acc;
    };

    const auto n_steps = static_cast<std::size_t>(std::llround((cfg.t_end - t_start) / h));
    std::vector<double> r_now(n), mu_now(n), k1(n), k2(n), k3(n), k4(n), ynew(n);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = tr.t_end();
        const std::vector<double> y = tr.back();
        const double xn_now = y[n - 1];
        for (std::size_t e : rs.eliminated) {
            const Stage& s = m.stage(e);
            r_now[e] = s.gate.eval(xn_now) * s.feedback.eval(conv_at(e, t, y));
            mu_now[e] = s.clearance.eval(xn_now);
        }

        // RK4 on retained compartments; eliminated ones enter substeps via
        // the linear predictor x_e + s*(r_e - mu_e*x_e)
        auto rhs_retained = [&](double offset, const std::vector<double>& kprev,
                                std::vector<double>& kout) {
            std::vector<double> stage_state(n);
            for (std::size_t c = 0; c < n; ++c) {
                if (is_elim[c])
                    stage_state[c] = y[c] + offset * (r_now[c] - mu_now[c] * y[c]);
                else
                    stage_state[c] = kprev.empty() ? y[c] : y[c] + offset * kprev[c];
            }
            const double xn = stage_state[n - 1];
            for (std::size_t rI : rs.retained) {
                const Stage& s = m.stage(rI);
                kout[rI] = s.gate.eval(xn) * s.feedback.eval(conv_at(rI, t + offset, stage_state)) -
                           s.clearance.eval(xn) * stage_state[rI];
            }
        };
        rhs_retained(0.0, {}, k1);
        rhs_retained(0.5 * h, k1, k2);
        rhs_retained(0.5 * h, k2, k3);
        rhs_retained(h, k3, k4);

        for (std::size_t rI : rs.retained)
            ynew[rI] = y[rI] + h / 6.0 * (k1[rI] + 2.0 * k2[rI] + 2.0 * k3[rI] + k4[rI]);
        // advance eliminated compartments along the chain, upstream first
        const double xn_new = ynew[n - 1];
        for (std::size_t e : rs.eliminated) {
            const Stage& s = m.stage(e);
            const double r_new = s.gate.eval(xn_new) * s.feedback.eval(conv_at(e, t + h, ynew));
            const double mu_new = s.clearance.eval(xn_new);
            ynew[e] = recurrence_step(y[e], r_now[e], mu_now[e], r_new, mu_new, h);
        }
        tr.append(ynew);
    }
    return tr;
}

EquivalenceReport check_equivalence(const CyclicModel& m, const Trajectory& history,
                                    const SimConfig& cfg,
                                    const std::vector<std::size_t>& eliminate, double tol,
                                    QuadSettings qs) {
    const ReducedSystem rs = partial_reduce(m, eliminate, qs);
    const Trajectory full = integrate_cyclic(m, history, cfg);
    const Trajectory red = integrate_reduced(rs, history, cfg);

    const double t_start = history.t_end();
    const auto j_start =
        static_cast<std::size_t>(std::llround((t_start - full.t_begin()) / full.h()));

    EquivalenceReport rep;
    rep.tol = tol;

    auto scale_of = [&](std::size_t c) {
        double s = 1e-12;
        for (std::size_t j = j_start; j < full.size(); ++j)
            s = std::max(s, std::abs(full.value(c, j)));
        return s;
    };

    // (a) eliminated compartments: re-solve the stage integral along the
    // full run's inputs, seeded with the given history value at t_start
    std::vector<std::vector<double>> recon(m.size());
    for (std::size_t e : rs.eliminated) {
        const std::vector<double>& upcol = full.samples(m.upstream(e));
        SweepInputs in{&upcol, &full.samples(m.size() - 1), full.t_begin(), full.h()};
        recon[e].assign(full.samples(e).begin(), full.samples(e).begin() + j_start + 1);
        recon[e].resize(full.size());
        bool fb = false;
        stage_sweep(m, e, in, qs, recon[e], &fb, j_start, /*seed_pinned=*/true);

        double dev = 0.0;
        const double scale = scale_of(e);
        for (std::size_t j = j_start; j < full.size(); ++j)
            dev = std::max(dev, std::abs(recon[e][j] - full.value(e, j)) / scale);
        rep.entries.push_back({m.label(e), dev, true});
        rep.pass = rep.pass && dev <= tol;
    }

    // (b) retained compartments: reduced integration vs the full run
    for (std::size_t c : rs.retained) {
        double dev = 0.0;
        const double scale = scale_of(c);
        for (std::size_t j = j_start; j < full.size(); ++j)
            dev = std::max(dev, std::abs(red.value(c, j) - full.value(c, j)) / scale);
        rep.entries.push_back({m.label(c), dev, false});
        rep.pass = rep.pass && dev <= tol;
    }
    return rep;
}

} // namespace cdde
