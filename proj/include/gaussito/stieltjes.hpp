#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gaussito/regulated.hpp"

namespace gaussito {

/// Interval [lo, hi] with a tag lo <= tag <= hi.
struct TaggedInterval {
  double lo = 0.0;
  double hi = 0.0;
  double tag = 0.0;
};

/// Contiguous tagged intervals covering [0,T]. Tags may sit on the closed
/// interval (Henstock-Kurzweil) or are required to be strictly interior
/// (Young).
class TaggedPartition {
 public:
  TaggedPartition(std::vector<TaggedInterval> intervals, bool strict_interior_tags);

  static TaggedPartition left_tags(const Partition& pi);
  std::span<const TaggedInterval> intervals() const { return intervals_; }
  double horizon() const { return intervals_.back().hi; }

 private:
  std::vector<TaggedInterval> intervals_;
};

class YoungTaggedPartition : public TaggedPartition {
 public:
  explicit YoungTaggedPartition(std::vector<TaggedInterval> intervals)
      : TaggedPartition(std::move(intervals), true) {}

  static YoungTaggedPartition midpoints(const Partition& pi);
};

/// Sum of u(y_i) (r(s_i) - r(s_{i-1})).
double hk_riemann_sum(const ScalarFn& u, const RegulatedFunction& r, const TaggedPartition& tau);

/// Sum of u(s_{i-1}) D+r(s_{i-1}) + u(y_i)(r(s_i-) - r(s_{i-1}+)) + u(s_i) D-r(s_i).
double young_stieltjes_sum(const ScalarFn& u, const RegulatedFunction& r,
                           const YoungTaggedPartition& tau);

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  std::size_t intervals = 0;
};

struct YsOptions {
  double tol = 1e-10;
  std::size_t max_refine = 200000;
  std::size_t initial_intervals = 16;
  /// Extra partition points (discontinuities or kinks of the integrand).
  std::vector<double> pinned;
};

/// Young-Stieltjes integral by adaptive bisection with midpoint tags. Jump
/// times of r and all pinned points stay partition points, so every jump
/// term is exact. Each interval carries |fine - coarse| as its local error
/// indicator; the interval with the largest indicator is bisected until the
/// indicators sum below tol.
IntegrationResult integrate_ys(const ScalarFn& u, const RegulatedFunction& r,
                               const YsOptions& options = {});

struct LsOptions {
  double tol = 1e-12;
  std::size_t max_intervals = 100000;
  bool include_atoms = true;
  std::vector<double> pinned;
};

/// Lebesgue-Stieltjes integral against a BV integrator: adaptive
/// Gauss-Kronrod on u * density for the continuous part plus
/// u(s) (r(s+) - r(s-)) for each atom. Throws UnsupportedIntegrator when r
/// carries no density.
double integrate_ls(const ScalarFn& u, const RegulatedFunction& r, const LsOptions& options = {});

/// G(x1, x2) with its two partial derivatives.
struct ScalarField2 {
  std::function<double(double, double)> f;
  std::function<double(double, double)> d1;
  std::function<double(double, double)> d2;
};

struct ChainRuleTerms {
  double lhs = 0.0;
  double int_u1 = 0.0;
  double int_u2 = 0.0;
  double left_jump_sum = 0.0;
  double right_jump_sum = 0.0;
  double residual = 0.0;
  bool converged = false;
};

/// Evaluates every term of the chain rule for G(u1, u2) with u1 in W*_2 and
/// u2 of bounded variation. The caller vouches for the regularity of G.
ChainRuleTerms chain_rule(const ScalarField2& g, const RegulatedFunction& u1,
                          const RegulatedFunction& u2, double tol);

}  // namespace gaussito
