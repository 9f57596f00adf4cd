#include "cdde/stability.hpp"

#include <algorithm>
#include <cmath>

namespace cdde {

namespace {

using cplx = std::complex<double>;

// determinant by Gaussian elimination with partial pivoting
cplx det(std::vector<std::vector<cplx>> a) {
    const std::size_t n = a.size();
    cplx d = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            d = -d;
        }
        if (a[col][col] == cplx(0.0)) return 0.0;
        d *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return d;
}

std::vector<std::size_t> zero_feedback_stages(const CyclicModel& m) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < m.size(); ++i)
        if (m.stage(i).feedback.kind() == FeedbackKind::Zero) out.push_back(i);
    return out;
}

// last-stage balance g_n(x) f_n(x_{n-2}) - mu_n(x) x at given stage values
double last_stage_residual(const CyclicModel& m, const std::vector<double>& vals) {
    const std::size_t n = m.size();
    const double x = vals[n - 1];
    const Stage& s = m.stage(n - 1);
    return s.gate.eval(x) * s.feedback.eval(vals[m.upstream(n - 1)]) - s.clearance.eval(x) * x;
}

} // namespace

std::vector<double> equilibrium_stage_values(const CyclicModel& m, double x_star) {
    const std::size_t n = m.size();
    std::vector<double> vals(n, 0.0);
    vals[n - 1] = x_star;
    const auto heads = zero_feedback_stages(m);
    if (heads.size() > 1)
        throw ModelError("at most one stage without upstream feedback is supported");

    auto compose = [&](std::size_t i, double input) {
        const Stage& s = m.stage(i);
        const double mu = s.clearance.eval(x_star);
        if (std::abs(mu) < 1e-14)
            throw ZeroClearanceAtCandidate("clearance vanishes at stage " +
                                           std::to_string(i + 1));
        return s.gate.eval(x_star) * s.feedback.eval(input) / mu;
    };

    if (heads.empty()) {
        double prev = x_star;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            vals[i] = compose(i, prev);
            prev = vals[i];
        }
        return vals;
    }

    const std::size_t hz = heads[0];
    double prev = x_star;
    for (std::size_t i = 0; i < hz; ++i) {
        vals[i] = compose(i, prev);
        prev = vals[i];
    }

    const double mu_head = m.stage(hz).clearance.eval(x_star);
    auto residual_for_head = [&](double u) {
        double v = u;
        for (std::size_t i = hz + 1; i + 1 < n; ++i) v = compose(i, v);
        const Stage& s = m.stage(n - 1);
        return s.gate.eval(x_star) * s.feedback.eval(v) - s.clearance.eval(x_star) * x_star;
    };

    double head = 0.0;
    if (std::abs(mu_head) <= 1e-8) {
        // head level is free at this x_star; pin it by the last-stage balance
        const double f0 = residual_for_head(0.0);
        const double f1 = residual_for_head(1.0);
        const double f2 = residual_for_head(2.0);
        const double scale = std::abs(f0) + std::abs(f1) + std::abs(f2) + 1e-30;
        if (std::abs(f2 - 2.0 * f1 + f0) <= 1e-9 * scale && f1 != f0) {
            head = -f0 / (f1 - f0);
        } else {
            double lo = 0.0, hi = 1.0;
            while (residual_for_head(lo) * residual_for_head(hi) > 0.0 && hi < 1e12) hi *= 2.0;
            if (hi >= 1e12) {
                head = 0.0;
            } else {
                for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (residual_for_head(lo) * residual_for_head(mid) <= 0.0 ? hi : lo) = mid;
                }
                head = 0.5 * (lo + hi);
            }
        }
    }
    vals[hz] = head;
    double v = head;
    for (std::size_t i = hz + 1; i + 1 < n; ++i) {
        vals[i] = compose(i, v);
        v = vals[i];
    }
    return vals;
}

EquilibriumReport find_equilibria(const CyclicModel& m, double lo, double hi,
                                  std::size_t n_brackets) {
    if (!(lo < hi)) throw Error("find_equilibria: lo must be < hi");
    EquilibriumReport rep;
    rep.scan_lo = lo;
    rep.scan_hi = hi;
    const auto heads = zero_feedback_stages(m);

    // head present: nontrivial equilibria demand a vanishing head clearance,
    // which fixes the scan target; otherwise scan the composed balance
    auto target = [&](double x) -> double {
        if (!heads.empty()) return m.stage(heads[0]).clearance.eval(x);
        return last_stage_residual(m, equilibrium_stage_values(m, x));
    };

    auto push_root = [&](double x) {
        for (const auto& r : rep.roots)
            if (std::abs(r.x_star - x) <= 1e-9 * (1.0 + std::abs(x))) return;
        EquilibriumReport::Root root;
        root.x_star = x;
        root.stage_values = equilibrium_stage_values(m, x);
        root.residual = std::abs(last_stage_residual(m, root.stage_values));
        root.mu_star = m.stage(m.size() - 1).clearance.eval(x);
        root.positive = true;
        for (double v : root.stage_values) root.positive = root.positive && v > 0.0;
        rep.roots.push_back(std::move(root));
    };

    // trivial equilibrium at the origin
    try {
        const auto vals0 = equilibrium_stage_values(m, 0.0);
        bool all_zero_ok = std::abs(last_stage_residual(m, vals0)) <= 1e-12;
        if (all_zero_ok && 0.0 >= lo && 0.0 <= hi) push_root(0.0);
    } catch (const Error&) {
    }

    for (std::size_t b = 0; b < n_brackets; ++b) {
        const double a = lo + (hi - lo) * static_cast<double>(b) / n_brackets;
        const double c = lo + (hi - lo) * static_cast<double>(b + 1) / n_brackets;
        double fa, fc;
        try {
            fa = target(a);
            fc = target(c);
        } catch (const Error&) {
            continue;
        }
        if (fa == 0.0) {
            push_root(a);
            continue;
        }
        if (fa * fc > 0.0) continue;
        double x0 = a, x1 = c;
        for (int it = 0; it < 200 && x1 - x0 > 1e-13 * (1.0 + std::abs(x1)); ++it) {
            const double mid = 0.5 * (x0 + x1);
            double fm;
            try {
                fm = target(mid);
            } catch (const Error&) {
                break;
            }
            if (fa * fm <= 0.0)
                x1 = mid;
            else {
                x0 = mid;
                fa = fm;
            }
        }
        push_root(0.5 * (x0 + x1));
    }

    bool has_positive = false;
    for (const auto& r : rep.roots) has_positive = has_positive || r.positive;
    if (!has_positive) rep.existence_flags.push_back("no positive equilibrium in scan interval");
    if (!heads.empty())
        rep.existence_flags.push_back("stage without upstream feedback: nontrivial equilibria "
                                      "require its net clearance to vanish");
    return rep;
}

CharacteristicFn::CharacteristicFn(const CyclicModel& m, std::vector<double> stage_values)
    : model_(m), x_(std::move(stage_values)) {
    const std::size_t n = model_.size();
    if (x_.size() != n) throw Error("stage value count mismatch");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (model_.stage(i).feedback.kind() == FeedbackKind::Zero) retained_.push_back(i);
    retained_.push_back(n - 1);
    const double xn = x_[n - 1];
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (model_.stage(i).feedback.kind() != FeedbackKind::Zero)
            pole_mu_.push_back(model_.stage(i).clearance.eval(xn));
}

std::complex<double> CharacteristicFn::operator()(std::complex<double> lambda) const {
    for (double mu : pole_mu_)
        if (std::abs(lambda + mu) < 1e-12)
            throw PoleAtEvaluation("lambda hits a folded-stage pole");

    const std::size_t n = model_.size();
    const double xn = x_[n - 1];
    const std::size_t R = retained_.size();
    std::vector<std::size_t> pos(n, n);
    for (std::size_t r = 0; r < R; ++r) pos[retained_[r]] = r;

    std::vector<std::vector<cplx>> M(R, std::vector<cplx>(R, 0.0));
    for (std::size_t r = 0; r < R; ++r) {
        const std::size_t i = retained_[r];
        const Stage& s = model_.stage(i);
        const double mu_i = s.clearance.eval(xn);
        M[r][r] -= mu_i;
        M[r][R - 1] += s.gate.derivative(xn) * s.feedback.eval(x_[model_.upstream(i)]) -
                       s.clearance.derivative(xn) * x_[i];
        if (s.feedback.kind() == FeedbackKind::Zero) continue;

        const cplx coefA =
            s.gate.eval(xn) * s.feedback.derivative(x_[model_.upstream(i)]) *
            s.kernel.laplace(lambda);

        // fold the eliminated stages between the previous retained variable
        // and this one into a transfer product and feedback correction
        cplx chain = 1.0, sumB = 0.0;
        std::size_t j = model_.upstream(i);
        while (pos[j] == n) {
            const Stage& e = model_.stage(j);
            const double mu_e = e.clearance.eval(xn);
            const cplx den = lambda + mu_e;
            const cplx A = e.gate.eval(xn) * e.feedback.derivative(x_[model_.upstream(j)]) *
                           e.kernel.laplace(lambda) / den;
            const cplx B = (e.gate.derivative(xn) * e.feedback.eval(x_[model_.upstream(j)]) -
                            e.clearance.derivative(xn) * x_[j]) /
                           den;
            sumB += chain * B;
            chain *= A;
            j = model_.upstream(j);
        }
        M[r][pos[j]] += coefA * chain;
        M[r][R - 1] += coefA * sumB;
    }

    std::vector<std::vector<cplx>> a(R, std::vector<cplx>(R));
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < R; ++c) a[r][c] = (r == c ? lambda : cplx(0.0)) - M[r][c];
    return det(std::move(a));
}

std::complex<double> CharacteristicFn::cleared(std::complex<double> lambda) const {
    double min_gap = std::numeric_limits<double>::infinity();
    for (double mu : pole_mu_) min_gap = std::min(min_gap, std::abs(lambda + mu));
    auto eval = [&](cplx l) {
        cplx v = (*this)(l);
        for (double mu : pole_mu_) v *= l + mu;
        return v;
    };
    if (min_gap > 1e-9) return eval(lambda);
    // the cleared function is entire; step around the removable singularity
    const cplx d(1e-6, 1e-6);
    return 0.5 * (eval(lambda + d) + eval(lambda - d));
}

std::vector<std::vector<double>> fd_jacobian(const CyclicModel& m,
                                             const std::vector<double>& state) {
    const std::size_t n = m.size();
    for (const Stage& s : m.stages())
        if (s.kernel.kind() != KernelKind::DiracAtZero)
            throw UnsupportedKernel("finite-difference Jacobian needs an undelayed model");
    auto rhs = [&](const std::vector<double>& x) {
        std::vector<double> conv(n);
        for (std::size_t i = 0; i < n; ++i) conv[i] = x[m.upstream(i)];
        return m.rhs(x, conv);
    };
    std::vector<std::vector<double>> J(n, std::vector<double>(n));
    for (std::size_t c = 0; c < n; ++c) {
        const double h = 1e-6 * (1.0 + std::abs(state[c]));
        std::vector<double> xp = state, xm = state;
        xp[c] += h;
        xm[c] -= h;
        const auto fp = rhs(xp), fm = rhs(xm);
        for (std::size_t r = 0; r < n; ++r) J[r][c] = (fp[r] - fm[r]) / (2.0 * h);
    }
    return J;
}

std::vector<double> char_poly(const std::vector<std::vector<double>>& J) {
    // Faddeev-LeVerrier
    const std::size_t n = J.size();
    std::vector<double> c(n + 1, 0.0);
    c[n] = 1.0;
    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) M[i][i] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        // M <- J*M
        std::vector<std::vector<double>> JM(n, std::vector<double>(n, 0.0));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t col = 0; col < n; ++col) JM[r][col] += J[r][j] * M[j][col];
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += JM[i][i];
        c[n - k] = -tr / static_cast<double>(k);
        M = JM;
        for (std::size_t i = 0; i < n; ++i) M[i][i] += c[n - k];
    }
    return c;
}

bool routh_hurwitz_stable(double a, double b, double c) {
    return a > 0.0 && c > 0.0 && a * b > c;
}

std::complex<double> yildirim_char_oracle(const ParamMap& p, double E_star, double Ebar_star,
                                          std::complex<double> lambda) {
    auto at = [&](const char* k) {
        auto it = p.find(k);
        if (it == p.end()) throw MissingParameter(std::string("missing parameter: ") + k);
        return it->second;
    };
    const double gamma_M = at("gamma_M"), gamma_I = at("gamma_I"), gamma_E = at("gamma_E");
    const double alpha_I = at("alpha_I"), alpha_E = at("alpha_E"), beta_E = at("beta_E");
    const double K_E = at("K_E"), nu_M = at("nu_M"), nu_E = at("nu_E");
    const double tau_M = at("tau_M"), tau_I = at("tau_I");
    const double vmax = at("F_vmax"), K = at("F_K"), nH = at("F_n");

    const double c = std::exp(-nu_E * tau_M);
    auto F = [&](double x) {
        const double xn = std::pow(x, nH), Kn = std::pow(K, nH);
        return vmax * Kn / (Kn + xn);
    };
    auto dF = [&](double x) {
        const double xn = std::pow(x, nH), Kn = std::pow(K, nH);
        return -vmax * nH * Kn * std::pow(x, nH - 1.0) / ((Kn + xn) * (Kn + xn));
    };

    // validate the equilibrium pair
    const double gate = alpha_E - beta_E * E_star / (K_E + E_star);
    const double ebar_expected =
        (alpha_I / gamma_I) * F(c * E_star) / gamma_M * std::exp(-nu_M * tau_I);
    if (std::abs(Ebar_star - ebar_expected) > 1e-8 * (1.0 + std::abs(ebar_expected)) ||
        std::abs(gate * Ebar_star - gamma_E * E_star) > 1e-8 * (1.0 + std::abs(gamma_E * E_star)))
        throw Error("E_star/Ebar_star do not satisfy the equilibrium relation");

    // derivative of the delayed production E -> F(e^{-nu_E tau_M} E)
    const double dxF = c * dF(c * E_star);
    return (lambda + beta_E * Ebar_star * K_E / ((K_E + E_star) * (K_E + E_star)) + gamma_E) *
               (lambda + gamma_I) * (lambda + gamma_M) -
           gate * alpha_I * dxF * std::exp(-nu_M * tau_I) *
               std::exp(-lambda * (tau_I + tau_M));
}

namespace {

void knauer_feasible(double a1, double a2) {
    if (!(a2 < a1)) throw InfeasibleParameters("positive equilibrium needs a2 < a1");
    if (!(2.0 * a1 > 1.0)) throw InfeasibleParameters("positive equilibrium needs 2*a1 > 1");
}

double knauer_param(const ParamMap& p, const char* k) {
    auto it = p.find(k);
    if (it == p.end()) throw MissingParameter(std::string("missing parameter: ") + k);
    return it->second;
}

} // namespace

std::complex<double> knauer_char_oracle(const ParamMap& p, std::complex<double> lambda) {
    const double a1 = knauer_param(p, "a1"), a2 = knauer_param(p, "a2");
    const double p2 = knauer_param(p, "p2"), d3 = knauer_param(p, "d3");
    knauer_feasible(a1, a2);
    const double r = a2 / a1;
    const double w = 1.0 - 1.0 / (2.0 * a1);
    const double c2 = (1.0 - r) * p2 + (1.0 - r) * w / (2.0 - r);
    const double c1 = ((1.0 - r) * (1.0 - r) * w / (2.0 - r) - w * (1.0 - 2.0 * r)) * d3 * p2;
    const double c0 = w * (1.0 - 2.0 * r) * d3 * p2;
    return ((lambda + c2) * lambda + c1) * lambda + c0;
}

std::complex<double> knauer_matrix_char(const ParamMap& p, std::complex<double> lambda) {
    const double a1 = knauer_param(p, "a1"), a2 = knauer_param(p, "a2");
    const double p2 = knauer_param(p, "p2"), d3 = knauer_param(p, "d3");
    knauer_feasible(a1, a2);
    const double r = a2 / a1;
    const double w = 1.0 - 1.0 / (2.0 * a1);
    const cplx A11 = 0.0;
    const cplx A12 = w * d3 / (2.0 - r) * (1.0 - r);
    // time rescaled by p1, so h1(u3*) = 1 and its transform is 1/(lambda + p2(1-r))
    const cplx A21 = p2 * (2.0 - r) / (lambda + p2 * (1.0 - r));
    const cplx A22 = d3 * (w * r / (2.0 - r) - 1.0) + p2 * d3 * (1.0 - 2.0 * r) * w;
    return (lambda - A11) * (lambda - A22) - A12 * A21;
}

RootReport find_roots(const CharacteristicFn& cf, const RootRegion& region, std::size_t grid) {
    RootReport rep;
    rep.grid = grid;
    auto F = [&](cplx l) { return cf.cleared(l); };
    auto dF = [&](cplx l) {
        const double d = 1e-7 * (1.0 + std::abs(l));
        return (F(l + d) - F(l - d)) / (2.0 * d);
    };

    const double margin = 1e-6 * (1.0 + std::abs(region.re_max) + region.im_max);
    std::size_t rightmost_idx = 0;
    for (std::size_t gi = 0; gi < grid; ++gi) {
        for (std::size_t gj = 0; gj < grid; ++gj) {
            cplx l(region.re_min +
                       (region.re_max - region.re_min) * (gi + 0.5) / static_cast<double>(grid),
                   region.im_max * (gj + 0.5) / static_cast<double>(grid));
            bool converged = false;
            double last_step = 0.0;
            for (int it = 0; it < 60; ++it) {
                const cplx f = F(l);
                const cplx fp = dF(l);
                if (fp == cplx(0.0) || !std::isfinite(std::abs(f))) break;
                const cplx step = f / fp;
                l -= step;
                last_step = std::abs(step);
                if (!std::isfinite(std::abs(l)) || std::abs(l) > 1e8) break;
                if (last_step < 1e-11 * (1.0 + std::abs(l))) {
                    converged = true;
                    break;
                }
            }
            if (!converged) {
                ++rep.newton_failures;
                continue;
            }
            if (std::abs(l.imag()) < 1e-8) l = cplx(l.real(), 0.0);
            if (l.imag() < 0.0) l = std::conj(l);
            if (l.real() < region.re_min - margin || l.real() > region.re_max + margin ||
                l.imag() > region.im_max + margin)
                continue;
            // roots introduced by the denominator clearing sit at the poles
            bool spurious = false;
            for (double mu : cf.pole_clearances())
                if (std::abs(l + mu) < 1e-6) spurious = true;
            if (spurious) continue;
            bool dup = false;
            for (const auto& r : rep.roots)
                if (std::abs(r - l) < 1e-6) dup = true;
            if (dup) continue;
            rep.roots.push_back(l);
            rep.residuals.push_back(last_step);
            if (l.real() > rep.rightmost_real_part) {
                rep.rightmost_real_part = l.real();
                rightmost_idx = rep.roots.size() - 1;
            }
        }
    }
    (void)rightmost_idx;
    return rep;
}

namespace {

// rightmost root data for one parameter value
struct SweepEval {
    double re;
    double im;
    std::size_t n_roots;
};

SweepEval eval_sweep_point(const std::function<CyclicModel(double)>& family, double p,
                           double eq_lo, double eq_hi, const RootRegion& region,
                           std::size_t grid) {
    const CyclicModel m = family(p);
    const EquilibriumReport eq = find_equilibria(m, eq_lo, eq_hi);
    const EquilibriumReport::Root* best = nullptr;
    for (const auto& r : eq.roots)
        if (r.positive && (!best || r.x_star > best->x_star)) best = &r;
    if (!best)
        for (const auto& r : eq.roots)
            if (std::abs(r.x_star) > 1e-12 && (!best || std::abs(r.x_star) > std::abs(best->x_star)))
                best = &r;
    if (!best)
        throw EquilibriumLostDuringSweep("no usable equilibrium at parameter " +
                                         std::to_string(p));
    const CharacteristicFn cf = build_characteristic(m, best->x_star);
    const RootReport rr = find_roots(cf, region, grid);
    if (rr.roots.empty())
        throw EquilibriumLostDuringSweep("no characteristic roots found in region at parameter " +
                                         std::to_string(p));
    double im = 0.0;
    for (std::size_t i = 0; i < rr.roots.size(); ++i)
        if (rr.roots[i].real() == rr.rightmost_real_part) im = rr.roots[i].imag();
    return {rr.rightmost_real_part, im, rr.roots.size()};
}

} // namespace

ScanReport hopf_scan(const std::function<CyclicModel(double)>& family,
                     const std::vector<double>& params, double eq_lo, double eq_hi,
                     const RootRegion& region, std::size_t grid) {
    ScanReport rep;
    for (double p : params) {
        const SweepEval e = eval_sweep_point(family, p, eq_lo, eq_hi, region, grid);
        rep.points.push_back({p, e.re, e.im, e.n_roots});
    }
    for (std::size_t i = 0; i + 1 < rep.points.size(); ++i) {
        const auto& a = rep.points[i];
        const auto& b = rep.points[i + 1];
        if (a.rightmost_re == 0.0 || a.rightmost_re * b.rightmost_re >= 0.0) continue;
        double lo = a.param, hi = b.param;
        double flo = a.rightmost_re;
        SweepEval mid_eval{0.0, 0.0, 0};
        while (std::abs(hi - lo) > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            mid_eval = eval_sweep_point(family, mid, eq_lo, eq_hi, region, grid);
            if (flo * mid_eval.re <= 0.0)
                hi = mid;
            else {
                lo = mid;
                flo = mid_eval.re;
            }
        }
        rep.crossings.push_back({0.5 * (lo + hi), std::abs(mid_eval.im)});
    }
    return rep;
}

CharacteristicFn build_characteristic(const CyclicModel& m, double x_star) {
    const std::vector<double> vals = equilibrium_stage_values(m, x_star);
    const double resid = std::abs(last_stage_residual(m, vals));
    if (resid > 1e-8 * (1.0 + std::abs(x_star)))
        throw Error("x_star is not an equilibrium (residual " + std::to_string(resid) + ")");
    CharacteristicFn cf(m, vals);

    // for undelayed models, verify against a finite-difference Jacobian
    bool undelayed = true;
    for (const Stage& s : m.stages())
        undelayed = undelayed && s.kernel.kind() == KernelKind::DiracAtZero;
    if (undelayed) {
        const auto J = fd_jacobian(m, vals);
        for (const cplx l : {cplx(0.31, 0.77), cplx(-0.23, 1.41)}) {
            std::vector<std::vector<cplx>> a(m.size(), std::vector<cplx>(m.size()));
            for (std::size_t r = 0; r < m.size(); ++r)
                for (std::size_t c = 0; c < m.size(); ++c)
                    a[r][c] = (r == c ? l : cplx(0.0)) - J[r][c];
            const cplx dj = det(std::move(a));
            const cplx dc = cf.cleared(l);
            if (std::abs(dj - dc) > 1e-5 * (1.0 + std::abs(dj)))
                throw Error("characteristic function disagrees with the numerical Jacobian");
        }
    }
    return cf;
}

} // namespace cdde
