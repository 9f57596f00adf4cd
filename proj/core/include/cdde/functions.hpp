#pragma once

#include "cdde/errors.hpp"

namespace cdde {

enum class FeedbackKind { Zero, Linear, HillUp, HillDown, ScaledLinear };

/// Per-stage production term f_i acting on the (delayed) upstream compartment.
/// Each variant carries an analytic first derivative.
class FeedbackFn {
public:
    static FeedbackFn zero();
    static FeedbackFn linear(double alpha);
    static FeedbackFn hill_up(double vmax, double K, double n);
    static FeedbackFn hill_down(double vmax, double K, double n);
    /// alpha * exp_factor * x — linear production attenuated by a survival
    /// probability (exp_factor is typically e^{-nu*tau}).
    static FeedbackFn scaled_linear(double alpha, double exp_factor);

    FeedbackKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double exp_factor() const { return exp_factor_; }
    double vmax() const { return vmax_; }
    double K() const { return K_; }
    double n() const { return n_; }

    double eval(double x) const;
    double derivative(double x) const;

    /// True when f(x) > 0 for x > 0 and f(0) = 0 (the positivity-preserving
    /// hypothesis). HillDown and Zero fail it.
    bool positive_preserving() const;

    bool operator==(const FeedbackFn&) const = default;

private:
    FeedbackFn() = default;
    FeedbackKind kind_ = FeedbackKind::Zero;
    double alpha_ = 0.0, exp_factor_ = 1.0;
    double vmax_ = 0.0, K_ = 1.0, n_ = 1.0;
};

enum class StateKind { Constant, HillGate, SaturatingLoss };

/// State-dependent rate evaluated at the last compartment: clearances mu_i(x_n)
/// and gate multipliers g_i(x_n). An additive offset widens HillGate and
/// SaturatingLoss to cover net self-renewal rates like p*(1 - 2a/(1+k*x)).
class StateFn {
public:
    static StateFn constant(double c);
    /// offset + a/(1 + k*x)
    static StateFn hill_gate(double a, double k, double offset = 0.0);
    /// offset + alpha - beta*x/(K + x)
    static StateFn saturating_loss(double alpha, double beta, double K, double offset = 0.0);

    StateKind kind() const { return kind_; }
    double c() const { return c_; }
    double a() const { return a_; }
    double k() const { return k_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double K() const { return K_; }
    double offset() const { return offset_; }

    double eval(double x) const;
    double derivative(double x) const;

    bool is_constant() const { return kind_ == StateKind::Constant; }

    /// Least upper bound of the rate on x >= 0, used by the non-negativity
    /// check ("mu bounded above") and survival-factor truncation.
    double sup_on_nonneg() const;
    /// Greatest lower bound on x >= 0.
    double inf_on_nonneg() const;

    bool operator==(const StateFn&) const = default;

private:
    StateFn() = default;
    StateKind kind_ = StateKind::Constant;
    double c_ = 0.0;
    double a_ = 0.0, k_ = 0.0;
    double alpha_ = 0.0, beta_ = 0.0, K_ = 1.0;
    double offset_ = 0.0;
};

} // namespace cdde
