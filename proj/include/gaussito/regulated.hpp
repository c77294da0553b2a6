#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gaussito {

using ScalarFn = std::function<double(double)>;

/// A jump of a regulated function at `time`:
///   u(s) - u(s-) = delta_minus,  u(s+) - u(s) = delta_plus.
struct Jump {
  double time = 0.0;
  double delta_minus = 0.0;
  double delta_plus = 0.0;
};

struct OneSided {
  double left = 0.0;
  double value = 0.0;
  double right = 0.0;
};

/// Strictly increasing list of times with first = 0 and last = T.
class Partition {
 public:
  explicit Partition(std::vector<double> points);

  static Partition uniform(double horizon, std::size_t intervals);

  /// Union of points; the horizon must agree.
  Partition with_points(std::span<const double> extra) const;

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  std::size_t intervals() const { return points_.size() - 1; }
  double horizon() const { return points_.back(); }
  double operator[](std::size_t i) const { return points_[i]; }

  /// True if every point of `coarser` is also a point of *this.
  bool refines(const Partition& coarser) const;

 private:
  std::vector<double> points_;
};

/// Real function on [0,T] represented as a continuous base plus a finite,
/// ordered jump list. One-sided limits are exact. Conventions: u(0-) = u(0)
/// and u(T+) = u(T).
///
/// An optional density is the derivative of the base; integrate_ls needs it
/// to treat the function as a bounded-variation integrator.
class RegulatedFunction {
 public:
  RegulatedFunction(double horizon, ScalarFn base, std::vector<Jump> jumps = {},
                    ScalarFn density = {});

  /// Builds the function from an evaluator that already includes the jumps;
  /// the step part is subtracted to recover the continuous base.
  static RegulatedFunction from_evaluator(double horizon, ScalarFn full, std::vector<Jump> jumps,
                                          ScalarFn density = {});

  static RegulatedFunction constant(double horizon, double value);
  static RegulatedFunction identity(double horizon);

  double operator()(double t) const;
  OneSided limits(double t) const;
  double left(double t) const { return limits(t).left; }
  double right(double t) const { return limits(t).right; }

  double horizon() const { return horizon_; }
  std::span<const Jump> jumps() const { return jumps_; }
  std::vector<double> jump_times() const;
  const Jump* jump_at(double t) const;

  bool has_density() const { return static_cast<bool>(density_); }
  double density(double t) const;
  double base(double t) const { return base_(t); }

  /// Pointwise a*this + b*other; jump lists are merged.
  RegulatedFunction combine(double a, const RegulatedFunction& other, double b) const;

 private:
  double step_part(double t) const;

  double horizon_;
  ScalarFn base_;
  std::vector<Jump> jumps_;
  ScalarFn density_;
};

OneSided one_sided_limits(const RegulatedFunction& u, double t);

/// Sum of |u(t_j) - u(t_{j-1})|^p over the partition.
double p_variation(const RegulatedFunction& u, double p, const Partition& pi);

/// Sum of squared left and right jumps.
double sigma2(const RegulatedFunction& u);

struct W2StarResult {
  double estimate = 0.0;
  double sigma2 = 0.0;
  bool converged = false;
  std::size_t points = 0;
};

/// Refines `initial` (jump times always pinned) by bisecting the interval
/// whose squared increment deviates most from its share of sigma2, until the
/// quadratic sum is within `tol` of sigma2 or `max_refine` bisections ran.
W2StarResult w2star_criterion(const RegulatedFunction& u, const Partition& initial, double tol,
                              std::size_t max_refine);

}  // namespace gaussito
