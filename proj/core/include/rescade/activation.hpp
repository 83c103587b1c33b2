#pragma once

#include <string>

namespace rescade {

enum class ActivationKind { logistic, tanh, softplus };

// Smooth scalar nonlinearities used by the shallow units and the layer maps.
// All three are strictly monotone; logistic and tanh are additionally bounded,
// which is what the invertible layer maps require (softplus has an inverse on
// (0, inf) but no bounded range, so layer construction rejects it).
class Activation {
 public:
  Activation() = default;
  explicit Activation(ActivationKind kind) : kind_(kind) {}

  ActivationKind kind() const { return kind_; }

  double value(double x) const;
  double derivative(double x) const;

  // Inverse of value(); the argument must lie strictly inside the range
  // (checked, throws InvalidArgumentError otherwise).
  double inverse(double y) const;

  // True for activations with a bounded range and a stable inverse on it
  // (logistic, tanh). Layer maps require this.
  bool bounded_invertible() const { return kind_ != ActivationKind::softplus; }

  // Open range (lo, hi) of value(); softplus reports (0, inf).
  void range(double* lo, double* hi) const;

  const char* name() const;
  static Activation parse(const std::string& name);

  friend bool operator==(Activation a, Activation b) {
    return a.kind_ == b.kind_;
  }

 private:
  ActivationKind kind_ = ActivationKind::tanh;
};

}  // namespace rescade
