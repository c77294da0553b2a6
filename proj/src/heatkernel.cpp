#include "gaussito/heatkernel.hpp"

#include <algorithm>
#include <cmath>

#include "gaussito/error.hpp"

namespace gaussito {

GaussHermite::GaussHermite(std::size_t n) : nodes_(n), weights_(n) {
  if (n == 0) throw InvalidArgument("Gauss-Hermite rule needs at least one node");
  constexpr long double kPiM4 = 0.751125544464942482L;  // pi^{-1/4}
  const long double nn = static_cast<long double>(n);
  const std::size_t half = (n + 1) / 2;
  long double z = 0.0L;
  std::vector<long double> x(n), w(n);
  for (std::size_t i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0L * nn + 1.0L) - 1.85575L * std::pow(2.0L * nn + 1.0L, -0.16667L);
    else if (i == 1)
      z -= 1.14L * std::pow(nn, 0.426L) / z;
    else if (i == 2)
      z = 1.86L * z - 0.86L * x[0];
    else if (i == 3)
      z = 1.91L * z - 0.91L * x[1];
    else
      z = 2.0L * z - x[i - 2];
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p1 = kPiM4, p2 = 0.0L;
      for (std::size_t j = 0; j < n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        const long double jj = static_cast<long double>(j);
        p1 = z * std::sqrt(2.0L / (jj + 1.0L)) * p2 - std::sqrt(jj / (jj + 1.0L)) * p3;
      }
      pp = std::sqrt(2.0L * nn) * p2;
      const long double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-17L * std::max(1.0L, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0L / (pp * pp);
  }
  // Ascending order.
  for (std::size_t i = 0; i < n; ++i) {
    nodes_[i] = static_cast<double>(x[n - 1 - i]);
    weights_[i] = static_cast<double>(w[n - 1 - i]);
  }
}

const GaussHermite& GaussHermite::standard() {
  static const GaussHermite rule(64);
  return rule;
}

const ScalarFn& TestFunction::derivative(int order) const {
  switch (order) {
    case 0: return f;
    case 1: return f1;
    case 2: return f2;
    default: throw InvalidArgument("test functions carry derivatives up to order 2");
  }
}

namespace {

std::vector<double> differentiate(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

ScalarFn horner(std::vector<double> c) {
  return [c = std::move(c)](double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
}

// sum |c_k| sup_x |x|^k e^{-a x^2}
double polynomial_growth_constant(const std::vector<double>& c, double a) {
  double acc = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0.0) continue;
    if (k == 0) {
      acc += std::abs(c[k]);
      continue;
    }
    const double kk = static_cast<double>(k);
    acc += std::abs(c[k]) * std::pow(kk / (2.0 * a * M_E), 0.5 * kk);
  }
  return acc;
}

TestFunction polynomial(std::string id, std::vector<double> coeffs, double a) {
  if (coeffs.empty()) throw InvalidArgument("polynomial needs at least one coefficient");
  bool constant = true;
  for (std::size_t k = 1; k < coeffs.size(); ++k) constant = constant && coeffs[k] == 0.0;
  if (!(a > 0.0) && !constant)
    throw InvalidArgument("polynomial test functions need a growth exponent a > 0");
  const auto d1 = differentiate(coeffs);
  const auto d2 = differentiate(d1);
  TestFunction out;
  out.id = std::move(id);
  out.polynomial = true;
  out.growth.a = a;
  out.growth.c = std::max({polynomial_growth_constant(coeffs, a), polynomial_growth_constant(d1, a),
                           polynomial_growth_constant(d2, a)});
  out.f = horner(coeffs);
  out.f1 = horner(d1);
  out.f2 = horner(d2);
  return out;
}

}  // namespace

TestFunction make_test_function(const std::string& id, double a,
                                const std::vector<double>& poly_coeffs) {
  if (a < 0.0) throw InvalidArgument("growth exponent must be non-negative");
  if (id == "x") return polynomial(id, {0.0, 1.0}, a);
  if (id == "x2") return polynomial(id, {0.0, 0.0, 1.0}, a);
  if (id == "x3") return polynomial(id, {0.0, 0.0, 0.0, 1.0}, a);
  if (id == "poly") return polynomial(id, poly_coeffs, a);
  if (id == "sin") {
    TestFunction out;
    out.id = id;
    out.f = [](double x) { return std::sin(x); };
    out.f1 = [](double x) { return std::cos(x); };
    out.f2 = [](double x) { return -std::sin(x); };
    out.growth = {1.0, a};
    return out;
  }
  if (id == "exp") {
    if (!(a > 0.0)) throw InvalidArgument("exp needs a growth exponent a > 0");
    TestFunction out;
    out.id = id;
    out.f = out.f1 = out.f2 = [](double x) { return std::exp(x); };
    out.growth = {std::exp(0.25 / a), a};
    return out;
  }
  throw InvalidArgument("unknown test function id '" + id + "'");
}

std::vector<std::string> test_function_ids() { return {"x", "x2", "x3", "sin", "exp", "poly"}; }

double psi(const ScalarFn& f, double t, double x) {
  if (t < 0.0) throw DomainError("psi needs t >= 0");
  if (t == 0.0) return f(x);
  const double s = std::sqrt(t);
  return GaussHermite::standard().expectation([&](double y) { return f(x + s * y); });
}

double psi(const TestFunction& f, double t, double x, int derivative_order) {
  return psi(f.derivative(derivative_order), t, x);
}

HeatResidual heat_identity_residual(const TestFunction& f, double t, double x, double fd_step) {
  if (!(fd_step > 0.0)) throw DomainError("finite-difference step must be positive");
  if (!(t > fd_step)) throw DomainError("heat identity check needs t > fd_step");
  const double h = fd_step;
  const double dt = (psi(f.f, t + h, x) - psi(f.f, t - h, x)) / (2.0 * h);
  const double dx = (psi(f.f, t, x + h) - psi(f.f, t, x - h)) / (2.0 * h);
  return HeatResidual{std::abs(dt - 0.5 * psi(f.f2, t, x)), std::abs(dx - psi(f.f1, t, x))};
}

}  // namespace gaussito
