#pragma once

/// @file motility.hpp
/// @brief Signal-dependent motility functions phi(v) and their regularized
/// family phi_eps(v) = phi(v) + eps * exp(-v).

#include <functional>
#include <string>

namespace ksm {

enum class MotilityKind { power, exponential, constant, custom };

struct PhiValue {
    double value = 0.0;
    double derivative = 0.0;
};

/// phi(xi) = 1/(xi+a)^alpha, e^{-beta xi}, a positive constant, or a
/// user-supplied pair (value, derivative). Degenerate choices with
/// phi(0) = 0 are rejected at construction.
class MotilitySpec {
public:
    using Evaluator = std::function<double(double)>;

    /// phi = 1.
    MotilitySpec() = default;

    static MotilitySpec power(double a, double alpha);
    static MotilitySpec exponential(double beta);
    static MotilitySpec constant(double value);
    /// The derivative must agree with central differences (step 1e-5) to 1e-6 on [0, 10].
    static MotilitySpec custom(Evaluator value, Evaluator derivative, std::string name = "custom");

    MotilityKind kind() const { return kind_; }
    double a() const { return a_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double constant_value() const { return value_; }
    const std::string& name() const { return name_; }

    PhiValue eval(double xi) const;

private:
    MotilityKind kind_ = MotilityKind::constant;
    double a_ = 0.0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double value_ = 1.0;
    Evaluator custom_value_;
    Evaluator custom_derivative_;
    std::string name_ = "constant";
};

/// Returns (phi(xi), phi'(xi)); rejects xi < 0.
PhiValue eval_phi(const MotilitySpec& spec, double xi);

/// phi_eps = phi + eps e^{-xi}. Satisfies phi_eps >= phi, |phi_eps'| <= |phi'| + 1
/// uniformly in eps, and sup |phi_eps - phi| = eps.
class RegularizedMotility {
public:
    RegularizedMotility(MotilitySpec base, double eps);

    const MotilitySpec& base() const { return base_; }
    double eps() const { return eps_; }

    PhiValue eval(double xi) const;
    double value(double xi) const { return eval(xi).value; }

private:
    MotilitySpec base_;
    double eps_;
};

/// Rejects eps outside (0, 1).
RegularizedMotility regularize(const MotilitySpec& spec, double eps);

/// The unregularized motility viewed as the eps = 0 member of the family.
RegularizedMotility limit_motility(const MotilitySpec& spec);

}  // namespace ksm
