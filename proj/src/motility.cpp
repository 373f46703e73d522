#include "ksm/motility.hpp"

#include "ksm/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ksm {

MotilitySpec MotilitySpec::power(double a, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("motility: alpha must be positive");
    if (a == 0.0) throw ValidationError("degenerate motility: power kind needs a > 0 so that phi(0) is finite and positive");
    if (!(a > 0.0)) throw ValidationError("motility: a must be positive");
    MotilitySpec s;
    s.kind_ = MotilityKind::power;
    s.a_ = a;
    s.alpha_ = alpha;
    s.name_ = "power";
    return s;
}

MotilitySpec MotilitySpec::exponential(double beta) {
    if (!(beta > 0.0)) throw ValidationError("motility: beta must be positive");
    MotilitySpec s;
    s.kind_ = MotilityKind::exponential;
    s.beta_ = beta;
    s.name_ = "exponential";
    return s;
}

MotilitySpec MotilitySpec::constant(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ValidationError("motility: constant value must be positive");
    MotilitySpec s;
    s.kind_ = MotilityKind::constant;
    s.value_ = value;
    s.name_ = "constant";
    return s;
}

MotilitySpec MotilitySpec::custom(Evaluator value, Evaluator derivative, std::string name) {
    if (!value || !derivative) throw ValidationError("motility: custom kind needs value and derivative evaluators");
    constexpr double step = 1e-5;
    constexpr double tol = 1e-6;
    for (int i = 0; i <= 1000; ++i) {
        const double xi = 10.0 * i / 1000.0;
        const double v = value(xi);
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream msg;
            msg << "degenerate motility: custom phi(" << xi << ") = " << v << " is not positive";
            throw ValidationError(msg.str());
        }
        // Second-order one-sided stencil at the left end; phi lives on [0, inf).
        const double fd = xi < step
            ? (-3.0 * v + 4.0 * value(xi + step) - value(xi + 2.0 * step)) / (2.0 * step)
            : (value(xi + step) - value(xi - step)) / (2.0 * step);
        const double d = derivative(xi);
        const double slack = tol * std::max(1.0, std::abs(d));
        if (!(std::abs(d - fd) <= slack)) {
            std::ostringstream msg;
            msg << "motility: custom derivative inconsistent with value at xi=" << xi << " (analytic " << d
                << ", finite difference " << fd << ")";
            throw ValidationError(msg.str());
        }
    }
    MotilitySpec s;
    s.kind_ = MotilityKind::custom;
    s.custom_value_ = std::move(value);
    s.custom_derivative_ = std::move(derivative);
    s.name_ = std::move(name);
    return s;
}

PhiValue MotilitySpec::eval(double xi) const {
    switch (kind_) {
        case MotilityKind::power: {
            const double base = xi + a_;
            const double value = std::pow(base, -alpha_);
            return {value, -alpha_ * value / base};
        }
        case MotilityKind::exponential: {
            const double value = std::exp(-beta_ * xi);
            return {value, -beta_ * value};
        }
        case MotilityKind::constant:
            return {value_, 0.0};
        case MotilityKind::custom:
            return {custom_value_(xi), custom_derivative_(xi)};
    }
    return {};
}

PhiValue eval_phi(const MotilitySpec& spec, double xi) {
    if (!(xi >= 0.0)) throw ValidationError("eval_phi: argument must be nonnegative");
    return spec.eval(xi);
}

RegularizedMotility::RegularizedMotility(MotilitySpec base, double eps) : base_(std::move(base)), eps_(eps) {}

PhiValue RegularizedMotility::eval(double xi) const {
    PhiValue p = base_.eval(xi);
    if (eps_ != 0.0) {
        const double bump = eps_ * std::exp(-xi);
        p.value += bump;
        p.derivative -= bump;
    }
    return p;
}

RegularizedMotility regularize(const MotilitySpec& spec, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("regularize: eps must lie in (0, 1)");
    return RegularizedMotility(spec, eps);
}

RegularizedMotility limit_motility(const MotilitySpec& spec) { return RegularizedMotility(spec, 0.0); }

}  // namespace ksm
