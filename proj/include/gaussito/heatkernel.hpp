#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gaussito/regulated.hpp"

namespace gaussito {

/// Gauss-Hermite rule for the weight e^{-z^2}; nodes from Newton iteration on
/// the orthonormal Hermite recurrence.
class GaussHermite {
 public:
  explicit GaussHermite(std::size_t nodes);

  /// Shared 64-node rule.
  static const GaussHermite& standard();

  /// E[f(Y)] for Y ~ N(0,1).
  template <class F>
  double expectation(const F& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(kSqrt2 * nodes_[i]);
    return acc * kInvSqrtPi;
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  static constexpr double kSqrt2 = 1.41421356237309504880;
  static constexpr double kInvSqrtPi = 0.56418958354775628695;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// |F(x)| <= c * exp(a x^2), asserted for F, F' and F''.
struct GrowthBound {
  double c = 0.0;
  double a = 0.0;
};

/// F together with F' and F'', plus its growth constants.
struct TestFunction {
  std::string id;
  ScalarFn f;
  ScalarFn f1;
  ScalarFn f2;
  GrowthBound growth;
  bool polynomial = false;

  const ScalarFn& derivative(int order) const;

  /// a < 1/(4 lambda) for the variance bound lambda of the active process.
  bool satisfies_growth(double lambda) const { return growth.a * 4.0 * lambda < 1.0; }
};

/// Registry ids: "x", "x2", "x3", "sin", "exp", and "poly" with
/// coefficients c0 + c1 x + c2 x^2 + ... . `a` is the growth exponent
/// asserted for the function; polynomials and exp need a > 0.
TestFunction make_test_function(const std::string& id, double a = 0.05,
                                const std::vector<double>& poly_coeffs = {});

std::vector<std::string> test_function_ids();

/// psi_F(t, x) = E[F(x + sqrt(t) Y)], Y ~ N(0,1); psi_F(0, x) = F(x).
double psi(const ScalarFn& f, double t, double x);
double psi(const TestFunction& f, double t, double x, int derivative_order = 0);

struct HeatResidual {
  double dt_residual = 0.0;
  double dx_residual = 0.0;
};

/// Central differences of psi_F against the heat identities
/// d/dx psi_F = psi_{F'} and d/dt psi_F = psi_{F''} / 2.
HeatResidual heat_identity_residual(const TestFunction& f, double t, double x, double fd_step);

}  // namespace gaussito
