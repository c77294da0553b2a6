#include "gaussito/regulated.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "gaussito/error.hpp"

namespace gaussito {

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidArgument("partition needs at least two points");
  if (points_.front() != 0.0) throw InvalidArgument("partition must start at 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1]))
      throw InvalidArgument("partition points must be strictly increasing");
  }
}

Partition Partition::uniform(double horizon, std::size_t intervals) {
  if (intervals == 0) throw InvalidArgument("uniform partition needs at least one interval");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  std::vector<double> pts(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    pts[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
  pts.back() = horizon;
  return Partition(std::move(pts));
}

Partition Partition::with_points(std::span<const double> extra) const {
  std::vector<double> pts(points_);
  for (double t : extra) {
    if (t < 0.0 || t > horizon()) throw DomainError("partition point outside [0,T]");
    pts.push_back(t);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return Partition(std::move(pts));
}

bool Partition::refines(const Partition& coarser) const {
  return std::includes(points_.begin(), points_.end(), coarser.points_.begin(),
                       coarser.points_.end());
}

RegulatedFunction::RegulatedFunction(double horizon, ScalarFn base, std::vector<Jump> jumps,
                                     ScalarFn density)
    : horizon_(horizon), base_(std::move(base)), jumps_(std::move(jumps)),
      density_(std::move(density)) {
  if (!(horizon_ > 0.0)) throw InvalidArgument("horizon must be positive");
  if (!base_) throw InvalidArgument("regulated function needs a base evaluator");
  std::sort(jumps_.begin(), jumps_.end(),
            [](const Jump& a, const Jump& b) { return a.time < b.time; });
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    const Jump& j = jumps_[i];
    if (j.time < 0.0 || j.time > horizon_) throw DomainError("jump time outside [0,T]");
    if (i > 0 && !(j.time > jumps_[i - 1].time))
      throw InvalidArgument("jump times must be distinct");
    if (j.time == 0.0 && j.delta_minus != 0.0)
      throw InvalidArgument("left jump at 0 violates u(0-) = u(0)");
    if (j.time == horizon_ && j.delta_plus != 0.0)
      throw InvalidArgument("right jump at T violates u(T+) = u(T)");
  }
}

RegulatedFunction RegulatedFunction::from_evaluator(double horizon, ScalarFn full,
                                                    std::vector<Jump> jumps, ScalarFn density) {
  // Validate and sort through a throwaway instance so the closure sees the
  // same jump list as the result.
  RegulatedFunction steps(horizon, [](double) { return 0.0; }, std::move(jumps));
  std::vector<Jump> sorted(steps.jumps_.begin(), steps.jumps_.end());
  ScalarFn base = [full = std::move(full), steps](double t) { return full(t) - steps.step_part(t); };
  return RegulatedFunction(horizon, std::move(base), std::move(sorted), std::move(density));
}

RegulatedFunction RegulatedFunction::constant(double horizon, double value) {
  return RegulatedFunction(horizon, [value](double) { return value; }, {},
                           [](double) { return 0.0; });
}

RegulatedFunction RegulatedFunction::identity(double horizon) {
  return RegulatedFunction(horizon, [](double t) { return t; }, {}, [](double) { return 1.0; });
}

double RegulatedFunction::step_part(double t) const {
  double acc = 0.0;
  for (const Jump& j : jumps_) {
    if (j.time > t) break;
    acc += j.delta_minus;
    if (j.time < t) acc += j.delta_plus;
  }
  return acc;
}

double RegulatedFunction::operator()(double t) const {
  if (t < 0.0 || t > horizon_) throw DomainError("evaluation time outside [0,T]");
  return base_(t) + step_part(t);
}

const Jump* RegulatedFunction::jump_at(double t) const {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                             [](const Jump& j, double x) { return j.time < x; });
  if (it != jumps_.end() && it->time == t) return &*it;
  return nullptr;
}

OneSided RegulatedFunction::limits(double t) const {
  const double v = (*this)(t);
  OneSided out{v, v, v};
  if (const Jump* j = jump_at(t)) {
    out.left = v - j->delta_minus;
    out.right = v + j->delta_plus;
  }
  return out;
}

std::vector<double> RegulatedFunction::jump_times() const {
  std::vector<double> out;
  out.reserve(jumps_.size());
  for (const Jump& j : jumps_) out.push_back(j.time);
  return out;
}

double RegulatedFunction::density(double t) const {
  if (!density_) throw UnsupportedIntegrator("regulated function has no density for its base");
  return density_(t);
}

RegulatedFunction RegulatedFunction::combine(double a, const RegulatedFunction& other,
                                             double b) const {
  if (other.horizon_ != horizon_) throw InvalidArgument("horizon mismatch in combine");
  std::vector<Jump> merged;
  std::size_t i = 0, k = 0;
  while (i < jumps_.size() || k < other.jumps_.size()) {
    if (k == other.jumps_.size() || (i < jumps_.size() && jumps_[i].time < other.jumps_[k].time)) {
      merged.push_back({jumps_[i].time, a * jumps_[i].delta_minus, a * jumps_[i].delta_plus});
      ++i;
    } else if (i == jumps_.size() || other.jumps_[k].time < jumps_[i].time) {
      const Jump& j = other.jumps_[k];
      merged.push_back({j.time, b * j.delta_minus, b * j.delta_plus});
      ++k;
    } else {
      merged.push_back({jumps_[i].time, a * jumps_[i].delta_minus + b * other.jumps_[k].delta_minus,
                        a * jumps_[i].delta_plus + b * other.jumps_[k].delta_plus});
      ++i;
      ++k;
    }
  }
  ScalarFn base = [a, b, f = base_, g = other.base_](double t) { return a * f(t) + b * g(t); };
  ScalarFn dens;
  if (density_ && other.density_)
    dens = [a, b, f = density_, g = other.density_](double t) { return a * f(t) + b * g(t); };
  return RegulatedFunction(horizon_, std::move(base), std::move(merged), std::move(dens));
}

OneSided one_sided_limits(const RegulatedFunction& u, double t) { return u.limits(t); }

double p_variation(const RegulatedFunction& u, double p, const Partition& pi) {
  if (!(p >= 1.0)) throw DomainError("p-variation needs p >= 1");
  if (pi.horizon() != u.horizon()) throw InvalidArgument("partition horizon mismatch");
  double acc = 0.0;
  double prev = u(pi[0]);
  for (std::size_t i = 1; i < pi.size(); ++i) {
    const double cur = u(pi[i]);
    acc += std::pow(std::abs(cur - prev), p);
    prev = cur;
  }
  return acc;
}

double sigma2(const RegulatedFunction& u) {
  double acc = 0.0;
  for (const Jump& j : u.jumps()) acc += j.delta_minus * j.delta_minus + j.delta_plus * j.delta_plus;
  return acc;
}

namespace {

struct Segment {
  double lo, hi;
  double u_lo, u_hi;
  double deviation;  // (u(hi)-u(lo))^2 minus the jump share of this segment
};

struct ByDeviation {
  bool operator()(const Segment& a, const Segment& b) const {
    if (std::abs(a.deviation) != std::abs(b.deviation))
      return std::abs(a.deviation) < std::abs(b.deviation);
    return a.lo > b.lo;  // deterministic tie-break: leftmost first
  }
};

}  // namespace

W2StarResult w2star_criterion(const RegulatedFunction& u, const Partition& initial, double tol,
                              std::size_t max_refine) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (initial.horizon() != u.horizon()) throw InvalidArgument("partition horizon mismatch");
  const auto pinned = u.jump_times();
  const Partition start = initial.with_points(pinned);

  auto share = [&u](double lo, double hi) {
    double s = 0.0;
    if (const Jump* j = u.jump_at(lo)) s += j->delta_plus * j->delta_plus;
    if (const Jump* j = u.jump_at(hi)) s += j->delta_minus * j->delta_minus;
    return s;
  };
  auto make = [&](double lo, double hi, double ulo, double uhi) {
    const double d = uhi - ulo;
    return Segment{lo, hi, ulo, uhi, d * d - share(lo, hi)};
  };

  std::priority_queue<Segment, std::vector<Segment>, ByDeviation> queue;
  double excess = 0.0;  // running (quadratic sum - sigma2)
  double prev = u(start[0]);
  for (std::size_t i = 1; i < start.size(); ++i) {
    const double cur = u(start[i]);
    Segment s = make(start[i - 1], start[i], prev, cur);
    excess += s.deviation;
    queue.push(s);
    prev = cur;
  }

  const double s2 = sigma2(u);
  std::size_t points = start.size();
  std::size_t refinements = 0;
  while (std::abs(excess) >= tol && refinements < max_refine) {
    Segment top = queue.top();
    queue.pop();
    const double mid = 0.5 * (top.lo + top.hi);
    if (!(mid > top.lo && mid < top.hi)) break;  // interval at machine resolution
    const double umid = u(mid);
    Segment a = make(top.lo, mid, top.u_lo, umid);
    Segment b = make(mid, top.hi, umid, top.u_hi);
    excess += a.deviation + b.deviation - top.deviation;
    queue.push(a);
    queue.push(b);
    ++points;
    ++refinements;
  }
  return W2StarResult{s2 + excess, s2, std::abs(excess) < tol, points};
}

}  // namespace gaussito
