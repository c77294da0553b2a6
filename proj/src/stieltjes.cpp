#include "gaussito/stieltjes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include "gaussito/error.hpp"

namespace gaussito {

TaggedPartition::TaggedPartition(std::vector<TaggedInterval> intervals, bool strict_interior_tags)
    : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw InvalidArgument("tagged partition needs at least one interval");
  if (intervals_.front().lo != 0.0) throw InvalidArgument("tagged partition must start at 0");
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const TaggedInterval& iv = intervals_[i];
    if (!(iv.hi > iv.lo)) throw InvalidArgument("tagged interval must have positive length");
    if (i > 0 && iv.lo != intervals_[i - 1].hi)
      throw InvalidArgument("tagged intervals must be contiguous");
    const bool ok = strict_interior_tags ? (iv.tag > iv.lo && iv.tag < iv.hi)
                                         : (iv.tag >= iv.lo && iv.tag <= iv.hi);
    if (!ok) throw InvalidArgument("tag outside its interval");
  }
}

TaggedPartition TaggedPartition::left_tags(const Partition& pi) {
  std::vector<TaggedInterval> out;
  for (std::size_t i = 1; i < pi.size(); ++i) out.push_back({pi[i - 1], pi[i], pi[i - 1]});
  return TaggedPartition(std::move(out), false);
}

YoungTaggedPartition YoungTaggedPartition::midpoints(const Partition& pi) {
  std::vector<TaggedInterval> out;
  for (std::size_t i = 1; i < pi.size(); ++i)
    out.push_back({pi[i - 1], pi[i], 0.5 * (pi[i - 1] + pi[i])});
  return YoungTaggedPartition(std::move(out));
}

double hk_riemann_sum(const ScalarFn& u, const RegulatedFunction& r, const TaggedPartition& tau) {
  if (tau.horizon() != r.horizon()) throw InvalidArgument("partition horizon mismatch");
  double acc = 0.0;
  for (const TaggedInterval& iv : tau.intervals()) acc += u(iv.tag) * (r(iv.hi) - r(iv.lo));
  return acc;
}

double young_stieltjes_sum(const ScalarFn& u, const RegulatedFunction& r,
                           const YoungTaggedPartition& tau) {
  if (tau.horizon() != r.horizon()) throw InvalidArgument("partition horizon mismatch");
  double acc = 0.0;
  for (const TaggedInterval& iv : tau.intervals()) {
    const OneSided lo = r.limits(iv.lo);
    const OneSided hi = r.limits(iv.hi);
    if (lo.right != lo.value) acc += u(iv.lo) * (lo.right - lo.value);
    acc += u(iv.tag) * (hi.left - lo.right);
    if (hi.value != hi.left) acc += u(iv.hi) * (hi.value - hi.left);
  }
  return acc;
}

namespace {

std::vector<double> breakpoints(double horizon, std::span<const double> a,
                                std::span<const double> b) {
  std::vector<double> pts{0.0, horizon};
  for (double t : a)
    if (t >= 0.0 && t <= horizon) pts.push_back(t);
  for (double t : b)
    if (t >= 0.0 && t <= horizon) pts.push_back(t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// An interval of the adaptive YS scheme. `coarse` tags the whole interval at
// its midpoint, `fine` tags each half at its own midpoint.
struct YsCell {
  double lo, hi;
  double r_lo, r_mid, r_hi;  // r(lo+), r(mid), r(hi-)
  double u_q1, u_q3;         // u at the quarter points
  double coarse, fine, err;
};

struct ByError {
  bool operator()(const YsCell& a, const YsCell& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.lo > b.lo;
  }
};

}  // namespace

IntegrationResult integrate_ys(const ScalarFn& u, const RegulatedFunction& r,
                               const YsOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("tolerance must be positive");
  const double horizon = r.horizon();
  const auto jt = r.jump_times();
  std::vector<double> pts = breakpoints(horizon, jt, options.pinned);
  {
    const Partition seed = Partition::uniform(horizon, std::max<std::size_t>(1, options.initial_intervals));
    pts = breakpoints(horizon, pts, seed.points());
  }

  double jump_part = 0.0;
  for (const Jump& j : r.jumps()) jump_part += u(j.time) * (j.delta_minus + j.delta_plus);

  auto cell = [&](double lo, double hi, double r_lo, double r_hi, double u_mid) {
    const double mid = 0.5 * (lo + hi);
    const double r_mid = r(mid);
    const double u_q1 = u(0.5 * (lo + mid));
    const double u_q3 = u(0.5 * (mid + hi));
    const double coarse = u_mid * (r_hi - r_lo);
    const double fine = u_q1 * (r_mid - r_lo) + u_q3 * (r_hi - r_mid);
    return YsCell{lo, hi, r_lo, r_mid, r_hi, u_q1, u_q3, coarse, fine, std::abs(fine - coarse)};
  };

  std::priority_queue<YsCell, std::vector<YsCell>, ByError> queue;
  double total_err = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double lo = pts[i - 1], hi = pts[i];
    YsCell c = cell(lo, hi, r.right(lo), r.left(hi), u(0.5 * (lo + hi)));
    total_err += c.err;
    queue.push(c);
  }

  std::size_t refinements = 0;
  while (total_err >= options.tol && refinements < options.max_refine) {
    const YsCell top = queue.top();
    const double mid = 0.5 * (top.lo + top.hi);
    const double q1 = 0.5 * (top.lo + mid);
    if (!(q1 > top.lo && q1 < mid)) break;  // resolution exhausted
    queue.pop();
    YsCell a = cell(top.lo, mid, top.r_lo, top.r_mid, top.u_q1);
    YsCell b = cell(mid, top.hi, top.r_mid, top.r_hi, top.u_q3);
    total_err += a.err + b.err - top.err;
    queue.push(a);
    queue.push(b);
    ++refinements;
  }

  std::vector<YsCell> cells;
  cells.reserve(queue.size());
  while (!queue.empty()) {
    cells.push_back(queue.top());
    queue.pop();
  }
  std::sort(cells.begin(), cells.end(), [](const YsCell& a, const YsCell& b) { return a.lo < b.lo; });
  double value = 0.0;
  double err = 0.0;
  for (const YsCell& c : cells) {
    value += c.fine;
    err += c.err;
  }
  return IntegrationResult{value + jump_part, err, err < options.tol, 2 * cells.size()};
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
  double value;
  double err;
};

template <class F>
GkEstimate gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = kWgk[7] * fc;
  double g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double pair = f(c - dx) + f(c + dx);
    k += kWgk[i] * pair;
    if (i % 2 == 1) g += kWg[i / 2] * pair;
  }
  return {k * h, std::abs((k - g) * h)};
}

}  // namespace

double integrate_ls(const ScalarFn& u, const RegulatedFunction& r, const LsOptions& options) {
  if (!r.has_density())
    throw UnsupportedIntegrator("integrator base is not representable as bounded variation");
  const double horizon = r.horizon();
  const auto jt = r.jump_times();
  const std::vector<double> pts = breakpoints(horizon, jt, options.pinned);
  auto integrand = [&](double t) {
    const double d = r.density(t);
    return d == 0.0 ? 0.0 : u(t) * d;
  };

  double continuous = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    struct Piece {
      double a, b;
    };
    std::vector<Piece> stack{{pts[i - 1], pts[i]}};
    while (!stack.empty()) {
      const Piece p = stack.back();
      stack.pop_back();
      const GkEstimate e = gk15(integrand, p.a, p.b);
      ++used;
      const double local_tol = options.tol * (p.b - p.a) / horizon;
      const double mid = 0.5 * (p.a + p.b);
      const bool tiny = !(mid > p.a && mid < p.b) || (p.b - p.a) < 1e-15 * horizon;
      if (e.err <= local_tol || tiny || used >= options.max_intervals) {
        continuous += e.value;
        continue;
      }
      stack.push_back({mid, p.b});
      stack.push_back({p.a, mid});
    }
  }

  double atoms = 0.0;
  if (options.include_atoms)
    for (const Jump& j : r.jumps()) atoms += u(j.time) * (j.delta_minus + j.delta_plus);
  return continuous + atoms;
}

ChainRuleTerms chain_rule(const ScalarField2& g, const RegulatedFunction& u1,
                          const RegulatedFunction& u2, double tol) {
  if (u1.horizon() != u2.horizon()) throw InvalidArgument("horizon mismatch in chain rule");
  const double horizon = u1.horizon();
  ChainRuleTerms out;
  out.lhs = g.f(u1(horizon), u2(horizon)) - g.f(u1(0.0), u2(0.0));

  YsOptions ys;
  ys.tol = tol;
  ys.pinned = u2.jump_times();
  const IntegrationResult i1 =
      integrate_ys([&](double s) { return g.d1(u1(s), u2(s)); }, u1, ys);
  out.int_u1 = i1.value;
  out.converged = i1.converged;

  LsOptions ls;
  ls.tol = tol;
  ls.pinned = u1.jump_times();
  out.int_u2 = integrate_ls([&](double s) { return g.d2(u1(s), u2(s)); }, u2, ls);

  const std::vector<double> times = breakpoints(horizon, u1.jump_times(), u2.jump_times());
  for (double s : times) {
    const OneSided a = u1.limits(s);
    const OneSided b = u2.limits(s);
    const double gs = g.f(a.value, b.value);
    const double p1 = g.d1(a.value, b.value);
    const double p2 = g.d2(a.value, b.value);
    if (s > 0.0)
      out.left_jump_sum +=
          gs - g.f(a.left, b.left) - p1 * (a.value - a.left) - p2 * (b.value - b.left);
    if (s < horizon)
      out.right_jump_sum +=
          g.f(a.right, b.right) - gs - p1 * (a.right - a.value) - p2 * (b.right - b.value);
  }
  out.residual = out.lhs - (out.int_u1 + out.int_u2 + out.left_jump_sum + out.right_jump_sum);
  return out;
}

}  // namespace gaussito
