#include "cdde/functions.hpp"

#include <algorithm>
#include <cmath>

namespace cdde {

FeedbackFn FeedbackFn::zero() {
    return FeedbackFn{};
}

FeedbackFn FeedbackFn::linear(double alpha) {
    if (!(alpha >= 0.0)) throw ModelError("linear feedback needs alpha >= 0");
    FeedbackFn f;
    f.kind_ = FeedbackKind::Linear;
    f.alpha_ = alpha;
    return f;
}

FeedbackFn FeedbackFn::scaled_linear(double alpha, double exp_factor) {
    if (!(alpha >= 0.0)) throw ModelError("scaled_linear feedback needs alpha >= 0");
    if (!(exp_factor > 0.0)) throw ModelError("scaled_linear feedback needs exp_factor > 0");
    FeedbackFn f;
    f.kind_ = FeedbackKind::ScaledLinear;
    f.alpha_ = alpha;
    f.exp_factor_ = exp_factor;
    return f;
}

namespace {
FeedbackFn make_hill(FeedbackKind kind, double vmax, double K, double n, FeedbackFn f) {
    if (!(vmax > 0.0)) throw ModelError("Hill feedback needs vmax > 0");
    if (!(K > 0.0)) throw ModelError("Hill feedback needs K > 0");
    if (!(n >= 1.0)) throw ModelError("Hill feedback needs n >= 1");
    return f;
}
} // namespace

FeedbackFn FeedbackFn::hill_up(double vmax, double K, double n) {
    FeedbackFn f;
    f.kind_ = FeedbackKind::HillUp;
    f.vmax_ = vmax;
    f.K_ = K;
    f.n_ = n;
    return make_hill(f.kind_, vmax, K, n, f);
}

FeedbackFn FeedbackFn::hill_down(double vmax, double K, double n) {
    FeedbackFn f;
    f.kind_ = FeedbackKind::HillDown;
    f.vmax_ = vmax;
    f.K_ = K;
    f.n_ = n;
    return make_hill(f.kind_, vmax, K, n, f);
}

double FeedbackFn::eval(double x) const {
    switch (kind_) {
    case FeedbackKind::Zero:
        return 0.0;
    case FeedbackKind::Linear:
        return alpha_ * x;
    case FeedbackKind::ScaledLinear:
        return alpha_ * exp_factor_ * x;
    case FeedbackKind::HillUp: {
        const double xn = std::pow(x, n_), Kn = std::pow(K_, n_);
        return vmax_ * xn / (Kn + xn);
    }
    case FeedbackKind::HillDown: {
        const double xn = std::pow(x, n_), Kn = std::pow(K_, n_);
        return vmax_ * Kn / (Kn + xn);
    }
    }
    return 0.0;
}

double FeedbackFn::derivative(double x) const {
    switch (kind_) {
    case FeedbackKind::Zero:
        return 0.0;
    case FeedbackKind::Linear:
        return alpha_;
    case FeedbackKind::ScaledLinear:
        return alpha_ * exp_factor_;
    case FeedbackKind::HillUp: {
        const double xn = std::pow(x, n_), Kn = std::pow(K_, n_);
        const double denom = (Kn + xn) * (Kn + xn);
        return vmax_ * n_ * Kn * std::pow(x, n_ - 1.0) / denom;
    }
    case FeedbackKind::HillDown: {
        const double xn = std::pow(x, n_), Kn = std::pow(K_, n_);
        const double denom = (Kn + xn) * (Kn + xn);
        return -vmax_ * n_ * Kn * std::pow(x, n_ - 1.0) / denom;
    }
    }
    return 0.0;
}

bool FeedbackFn::positive_preserving() const {
    switch (kind_) {
    case FeedbackKind::Zero:
    case FeedbackKind::HillDown:
        return false;
    case FeedbackKind::Linear:
    case FeedbackKind::ScaledLinear:
        return alpha_ > 0.0;
    case FeedbackKind::HillUp:
        return true;
    }
    return false;
}

StateFn StateFn::constant(double c) {
    StateFn s;
    s.c_ = c;
    return s;
}

StateFn StateFn::hill_gate(double a, double k, double offset) {
    if (!(k >= 0.0)) throw ModelError("hill_gate needs k >= 0");
    StateFn s;
    s.kind_ = StateKind::HillGate;
    s.a_ = a;
    s.k_ = k;
    s.offset_ = offset;
    return s;
}

StateFn StateFn::saturating_loss(double alpha, double beta, double K, double offset) {
    if (!(alpha >= 0.0)) throw ModelError("saturating_loss needs alpha >= 0");
    if (!(beta >= 0.0)) throw ModelError("saturating_loss needs beta >= 0");
    if (!(K > 0.0)) throw ModelError("saturating_loss needs K > 0");
    StateFn s;
    s.kind_ = StateKind::SaturatingLoss;
    s.alpha_ = alpha;
    s.beta_ = beta;
    s.K_ = K;
    s.offset_ = offset;
    return s;
}

double StateFn::eval(double x) const {
    switch (kind_) {
    case StateKind::Constant:
        return c_;
    case StateKind::HillGate:
        return offset_ + a_ / (1.0 + k_ * x);
    case StateKind::SaturatingLoss:
        return offset_ + alpha_ - beta_ * x / (K_ + x);
    }
    return 0.0;
}

double StateFn::derivative(double x) const {
    switch (kind_) {
    case StateKind::Constant:
        return 0.0;
    case StateKind::HillGate: {
        const double d = 1.0 + k_ * x;
        return -a_ * k_ / (d * d);
    }
    case StateKind::SaturatingLoss: {
        const double d = K_ + x;
        return -beta_ * K_ / (d * d);
    }
    }
    return 0.0;
}

double StateFn::sup_on_nonneg() const {
    switch (kind_) {
    case StateKind::Constant:
        return c_;
    case StateKind::HillGate:
        // monotone between offset + a (x=0) and offset (x -> inf)
        return std::max(offset_ + a_, k_ > 0.0 ? offset_ : offset_ + a_);
    case StateKind::SaturatingLoss:
        return offset_ + alpha_;
    }
    return 0.0;
}

double StateFn::inf_on_nonneg() const {
    switch (kind_) {
    case StateKind::Constant:
        return c_;
    case StateKind::HillGate:
        return std::min(offset_ + a_, k_ > 0.0 ? offset_ : offset_ + a_);
    case StateKind::SaturatingLoss:
        return offset_ + alpha_ - beta_;
    }
    return 0.0;
}

} // namespace cdde
