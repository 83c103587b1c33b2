#include <doctest.h>

#include <cmath>
#include <limits>

#include "rescade/activation.hpp"
#include "rescade/errors.hpp"

using rescade::Activation;
using rescade::ActivationKind;

// The three kinds in one place.
static const Activation logistic{ActivationKind::logistic};
static const Activation hyptan{ActivationKind::tanh};
static const Activation softplus{ActivationKind::softplus};

TEST_CASE("activation values at anchor points") {
  CHECK(logistic.value(0.0) == 0.5);
  CHECK(hyptan.value(0.0) == 0.0);
  CHECK(softplus.value(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  // Odd symmetry of tanh, logistic's reflection identity.
  for (double x : {0.3, 1.7, 4.0}) {
    CHECK(hyptan.value(-x) == doctest::Approx(-hyptan.value(x)).epsilon(1e-15));
    CHECK(logistic.value(-x) ==
          doctest::Approx(1.0 - logistic.value(x)).epsilon(1e-15));
  }
}

TEST_CASE("activations survive extreme arguments") {
  for (double x : {-800.0, -40.0, 40.0, 800.0}) {
    for (const Activation& a : {logistic, hyptan, softplus}) {
      const double y = a.value(x);
      CHECK(std::isfinite(y));
      const double d = a.derivative(x);
      CHECK(std::isfinite(d));
      CHECK(d >= 0.0);
    }
  }
  CHECK(logistic.value(800.0) == 1.0);
  CHECK(logistic.value(-800.0) == 0.0);
  CHECK(softplus.value(800.0) == 800.0);  // log1p(exp(-800)) underflows to 0
  CHECK(softplus.value(-800.0) == 0.0);
}

TEST_CASE("derivative matches central finite differences") {
  const double h = 1e-6;
  for (const Activation& a : {logistic, hyptan, softplus}) {
    for (double x = -3.0; x <= 3.0; x += 0.37) {
      const double fd = (a.value(x + h) - a.value(x - h)) / (2.0 * h);
      const double an = a.derivative(x);
      CHECK(an == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("inverse composes to the identity inside the range") {
  for (const Activation& a : {logistic, hyptan, softplus}) {
    for (double x = -5.0; x <= 5.0; x += 0.71) {
      if (a.kind() == ActivationKind::softplus && x < -4.0) continue;
      const double y = a.value(x);
      CHECK(a.inverse(y) == doctest::Approx(x).epsilon(1e-9));
    }
  }
}

TEST_CASE("inverse rejects arguments outside the open range") {
  CHECK_THROWS_AS(logistic.inverse(0.0), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(logistic.inverse(1.0), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(logistic.inverse(-0.2), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(hyptan.inverse(1.0), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(hyptan.inverse(-1.0), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(hyptan.inverse(1.5), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(softplus.inverse(0.0), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(softplus.inverse(-1.0), rescade::InvalidArgumentError);
}

TEST_CASE("range and invertibility flags") {
  double lo = 0.0, hi = 0.0;
  logistic.range(&lo, &hi);
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);
  hyptan.range(&lo, &hi);
  CHECK(lo == -1.0);
  CHECK(hi == 1.0);
  softplus.range(&lo, &hi);
  CHECK(lo == 0.0);
  CHECK(hi == std::numeric_limits<double>::infinity());

  CHECK(logistic.bounded_invertible());
  CHECK(hyptan.bounded_invertible());
  CHECK_FALSE(softplus.bounded_invertible());
}

TEST_CASE("name and parse round-trip") {
  for (const Activation& a : {logistic, hyptan, softplus}) {
    CHECK(Activation::parse(a.name()) == a);
  }
  CHECK_THROWS_AS(Activation::parse("relu"), rescade::InvalidArgumentError);
  CHECK_THROWS_AS(Activation::parse(""), rescade::InvalidArgumentError);
}
