#include "rescade/activation.hpp"

#include <cmath>
#include <limits>

#include "rescade/errors.hpp"

namespace rescade {

double Activation::value(double x) const {
  switch (kind_) {
    case ActivationKind::logistic: {
      // Branch on sign so exp() never overflows.
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      const double e = std::exp(x);
      return e / (1.0 + e);
    }
    case ActivationKind::tanh:
      return std::tanh(x);
    case ActivationKind::softplus: {
      // log(1 + e^x) = max(x, 0) + log1p(e^{-|x|}), stable for large |x|.
      const double m = x > 0.0 ? x : 0.0;
      return m + std::log1p(std::exp(-std::fabs(x)));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Activation::derivative(double x) const {
  switch (kind_) {
    case ActivationKind::logistic: {
      const double s = value(x);
      return s * (1.0 - s);
    }
    case ActivationKind::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::softplus: {
      // softplus' = logistic
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      const double e = std::exp(x);
      return e / (1.0 + e);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double Activation::inverse(double y) const {
  switch (kind_) {
    case ActivationKind::logistic:
      if (!(y > 0.0 && y < 1.0))
        throw InvalidArgumentError("logistic inverse requires y in (0,1)");
      return std::log(y / (1.0 - y));
    case ActivationKind::tanh:
      if (!(y > -1.0 && y < 1.0))
        throw InvalidArgumentError("tanh inverse requires y in (-1,1)");
      return std::atanh(y);
    case ActivationKind::softplus:
      if (!(y > 0.0))
        throw InvalidArgumentError("softplus inverse requires y > 0");
      return std::log(std::expm1(y));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void Activation::range(double* lo, double* hi) const {
  switch (kind_) {
    case ActivationKind::logistic:
      *lo = 0.0;
      *hi = 1.0;
      return;
    case ActivationKind::tanh:
      *lo = -1.0;
      *hi = 1.0;
      return;
    case ActivationKind::softplus:
      *lo = 0.0;
      *hi = std::numeric_limits<double>::infinity();
      return;
  }
}

const char* Activation::name() const {
  switch (kind_) {
    case ActivationKind::logistic:
      return "logistic";
    case ActivationKind::tanh:
      return "tanh";
    case ActivationKind::softplus:
      return "softplus";
  }
  return "?";
}

Activation Activation::parse(const std::string& name) {
  if (name == "logistic") return Activation(ActivationKind::logistic);
  if (name == "tanh") return Activation(ActivationKind::tanh);
  if (name == "softplus") return Activation(ActivationKind::softplus);
  throw InvalidArgumentError("unknown activation '" + name +
                             "' (expected logistic, tanh, or softplus)");
}

}  // namespace rescade
