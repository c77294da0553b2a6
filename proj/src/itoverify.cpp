#include "gaussito/itoverify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gaussito/error.hpp"

namespace gaussito {

ItoCase::ItoCase(std::string id, ProcessSpec spec, TestFunction f, std::vector<CmTerm> h,
                 ItoOptions options)
    : id_(std::move(id)), spec_(std::move(spec)), f_(std::move(f)),
      h_(spec_, std::move(h)), options_(options) {
  if (!f_.satisfies_growth(spec_.lambda()))
    throw ConfigError("growth constraint violated for F='" + f_.id + "' on model '" + spec_.id() +
                      "': need a < 1/(4 lambda) = " + std::to_string(0.25 / spec_.lambda()) +
                      ", got a = " + std::to_string(f_.growth.a));
}

ItoCase ItoCase::with_h(std::vector<CmTerm> h) const {
  return ItoCase(id_, spec_, f_, std::move(h), options_);
}

std::vector<std::vector<CmTerm>> auto_battery(const ProcessSpec& spec) {
  const double T = spec.horizon();
  std::vector<std::vector<CmTerm>> out{
      {{1.0, {T, Side::at}}},
      {{1.0, {0.3 * T, Side::at}}, {-0.5, {0.7 * T, Side::at}}},
      {{0.5, {0.15 * T, Side::at}}, {0.8, {0.45 * T, Side::at}}, {-0.4, {0.85 * T, Side::at}}},
  };
  for (double s : spec.discontinuity_times()) {
    out.push_back({{1.0, {s, Side::left}}, {-0.5, {s, Side::at}}});
    out.push_back({{1.0, {0.5 * s, Side::at}}, {1.0, {0.9 * s, Side::at}}});
  }
  return out;
}

namespace {

double clamp_variance(double v) { return v < 0.0 && v > -1e-14 ? 0.0 : v; }

// (S psi_{F^(k)}(V(s+-) - V^+-(s), X_{s+-}))(h), evaluated literally as the
// outer Gaussian smoothing of the inner one.
double smoothed(const ItoCase& c, int order, double s, Side side) {
  const ProcessSpec& spec = c.spec();
  const Instant p = spec.normalize({s, side});
  const OneSided v = spec.variance().limits(s);
  const double v_limit = side == Side::left ? v.left : side == Side::right ? v.right : v.value;
  const double v_weak = clamp_variance(spec.covariance(p, p));
  const double inner_t = clamp_variance(v_limit - v_weak);
  if (inner_t < 0.0 || v_weak < 0.0) throw DomainError("negative variance in one-sided limit");
  const ScalarFn& g = c.f().derivative(order);
  const ScalarFn inner = [&](double x) { return psi(g, inner_t, x); };
  return psi(inner, v_weak, c.h().pairing(p));
}

struct PsiAt {
  double f, f1, f2;
};

PsiAt psi_all(const TestFunction& f, double t, double x) {
  return {psi(f.f, t, x), psi(f.f1, t, x), psi(f.f2, t, x)};
}

// Record times first, in list order, then any further jump times of V or
// hbar in increasing order.
std::vector<double> jump_times(const ItoCase& c) {
  std::vector<double> out;
  std::set<double> seen;
  for (const auto& r : c.spec().discontinuities())
    if (seen.insert(r.s).second) out.push_back(r.s);
  std::vector<double> extra;
  for (double t : c.spec().variance().jump_times()) extra.push_back(t);
  for (double t : c.h().hbar().jump_times()) extra.push_back(t);
  std::sort(extra.begin(), extra.end());
  for (double t : extra)
    if (seen.insert(t).second) out.push_back(t);
  return out;
}

std::vector<double> pinned_points(const ItoCase& c) {
  std::vector<double> pts = c.spec().discontinuity_times();
  for (double t : c.h().times()) pts.push_back(t);
  return pts;
}

void finish(ItoTerms& out, const ItoMutation& m) {
  out.rhs = 0.0;
  if (!m.drop_ys_integral) out.rhs += out.ys_integral;
  if (!m.drop_dv_integral) out.rhs += out.dv_integral;
  if (!m.drop_left_jumps) out.rhs += out.left_jump_sum;
  if (!m.drop_right_jumps) out.rhs += out.right_jump_sum;
  out.residual = out.lhs - out.rhs;
}

}  // namespace

double s_transform(const Observable& obs, const ItoCase& c) {
  const ProcessSpec& spec = c.spec();
  const CameronMartinElement& h = c.h();
  auto at = [&](double t) { return spec.normalize({t, Side::at}); };
  switch (obs.kind) {
    case ObservableKind::x: return h.pairing(at(obs.t));
    case ObservableKind::f:
    case ObservableKind::f1:
    case ObservableKind::f2: {
      const int order = obs.kind == ObservableKind::f ? 0 : obs.kind == ObservableKind::f1 ? 1 : 2;
      const Instant p = at(obs.t);
      return psi(c.f().derivative(order), spec.covariance(p, p), h.pairing(p));
    }
    case ObservableKind::wick_exp: return std::exp(CameronMartinElement(spec, obs.g).inner(h));
    case ObservableKind::smoothed_left: return smoothed(c, 0, obs.t, Side::left);
    case ObservableKind::smoothed_right: return smoothed(c, 0, obs.t, Side::right);
    case ObservableKind::jump_wick: {
      const Instant l = spec.normalize({obs.t, Side::left});
      const Instant p = at(obs.t);
      const double var = spec.covariance(p, p) - 2.0 * spec.covariance(l, p) + spec.covariance(l, l);
      const double m = h.pairing(p) - h.pairing(l);
      return std::exp(obs.a * m) * (obs.a * var + m) - m;
    }
  }
  throw InvalidArgument("unknown observable");
}

ItoTerms ito_stransform_residual(const ItoCase& c, const ItoMutation& mutation) {
  const ProcessSpec& spec = c.spec();
  const RegulatedFunction& v = spec.variance();
  const RegulatedFunction& hbar = c.h().hbar();
  const TestFunction& f = c.f();
  const double T = spec.horizon();
  ItoTerms out;
  out.lhs = psi(f.f, v(T), hbar(T)) - psi(f.f, v(0.0), hbar(0.0));

  const std::vector<double> pins = pinned_points(c);
  YsOptions ys;
  ys.tol = c.options().ys_tol;
  ys.max_refine = c.options().max_refine;
  ys.pinned = pins;
  const IntegrationResult yr =
      integrate_ys([&](double s) { return psi(f.f1, v(s), hbar(s)); }, hbar, ys);
  out.ys_integral = yr.value;
  out.ys_error_estimate = yr.error_estimate;
  out.converged = yr.converged;

  LsOptions ls;
  ls.tol = c.options().ls_tol;
  ls.pinned = pins;
  out.dv_integral = integrate_ls([&](double s) { return 0.5 * psi(f.f2, v(s), hbar(s)); }, v, ls);

  for (double s : jump_times(c)) {
    const OneSided vl = v.limits(s);
    const OneSided hl = hbar.limits(s);
    const PsiAt p = psi_all(f, vl.value, hl.value);
    if (s > 0.0) {
      const double term = p.f - smoothed(c, 0, s, Side::left) - p.f1 * (hl.value - hl.left) -
                          0.5 * p.f2 * (vl.value - vl.left);
      out.left_jumps.push_back({s, term});
      out.left_jump_sum += term;
    }
    if (s < T) {
      const double term = smoothed(c, 0, s, Side::right) - p.f - p.f1 * (hl.right - hl.value) -
                          0.5 * p.f2 * (vl.right - vl.value);
      out.right_jumps.push_back({s, term});
      out.right_jump_sum += term;
    }
  }
  finish(out, mutation);
  return out;
}

ItoTerms ito_rcll_residual(const ItoCase& c, const ItoMutation& mutation) {
  const ProcessSpec& spec = c.spec();
  if (spec.kind() == ProcessKind::general)
    throw UnsupportedIntegrator("RCLL form needs a martingale or stochastically RCLL model");
  const RegulatedFunction& v = spec.variance();
  const RegulatedFunction& hbar = c.h().hbar();
  const TestFunction& f = c.f();
  const double T = spec.horizon();
  ItoTerms out;
  out.lhs = psi(f.f, v(T), hbar(T)) - psi(f.f, v(0.0), hbar(0.0));

  const std::vector<double> pins = pinned_points(c);
  YsOptions ys;
  ys.tol = c.options().ys_tol;
  ys.max_refine = c.options().max_refine;
  ys.pinned = pins;
  const IntegrationResult yr = integrate_ys(
      [&](double s) { return psi(f.f1, v.left(s), hbar.left(s)); }, hbar, ys);
  out.ys_integral = yr.value;
  out.ys_error_estimate = yr.error_estimate;
  out.converged = yr.converged;

  LsOptions ls;
  ls.tol = c.options().ls_tol;
  ls.pinned = pins;
  ls.include_atoms = false;
  out.dv_integral =
      integrate_ls([&](double s) { return 0.5 * psi(f.f2, v.left(s), hbar.left(s)); }, v, ls);

  for (const DiscontinuityRecord& r : spec.discontinuities()) {
    if (r.s <= 0.0) continue;
    const OneSided hl = hbar.limits(r.s);
    const PsiAt left = psi_all(f, r.v_minus, hl.left);
    const double at = psi(f.f, v(r.s), hl.value);
    // S(F'(X_{s-}) D-X_s)(h) = S(F''(X_{s-}))(h) E[X_{s-} D-X_s] + S(F'(X_{s-}))(h) D-hbar(s)
    const double product = left.f2 * r.e_xleft_dminus + left.f1 * (hl.value - hl.left);
    const double correction = left.f2 * r.e_xleft_dminus;
    double term = at - left.f - product;
    if (!mutation.drop_xleft_correction) term += correction;
    out.xleft_correction += correction;
    out.left_jumps.push_back({r.s, term});
    out.left_jump_sum += term;
  }
  finish(out, mutation);
  return out;
}

namespace {

// Union of instants referenced by several first-chaos elements, with row
// lookup into a sampler.
class InstantTable {
 public:
  explicit InstantTable(const ProcessSpec& spec) : spec_(spec) {}

  std::size_t add(Instant p) {
    p = spec_.normalize(p);
    for (std::size_t i = 0; i < instants_.size(); ++i)
      if (instants_[i] == p) return i;
    instants_.push_back(p);
    return instants_.size() - 1;
  }

  struct Linear {
    std::vector<std::pair<std::size_t, double>> rows;
    double norm_sq = 0.0;
  };

  Linear add(const std::vector<CmTerm>& terms) {
    Linear out;
    for (const CmTerm& t : terms) out.rows.push_back({add(t.at), t.coeff});
    out.norm_sq = CameronMartinElement(spec_, terms).norm_sq();
    return out;
  }

  const std::vector<Instant>& instants() const { return instants_; }

 private:
  const ProcessSpec& spec_;
  std::vector<Instant> instants_;
};

double eval_linear(const InstantTable::Linear& l, const Eigen::MatrixXd& x, Eigen::Index p) {
  double acc = 0.0;
  for (const auto& [row, coeff] : l.rows) acc += coeff * x(static_cast<Eigen::Index>(row), p);
  return acc;
}

double wick_exp(const InstantTable::Linear& l, const Eigen::MatrixXd& x, Eigen::Index p) {
  return std::exp(eval_linear(l, x, p) - 0.5 * l.norm_sq);
}

constexpr std::size_t kBatch = 512;

void require_paths(std::size_t n_paths) {
  if (n_paths == 0) throw InvalidArgument("Monte Carlo check needs n_paths >= 1");
}

}  // namespace

MartingaleMcReport martingale_ito_mc(const ItoCase& c, std::size_t grid_intervals,
                                     std::size_t n_paths, std::uint64_t seed) {
  require_paths(n_paths);
  const ProcessSpec& spec = c.spec();
  if (spec.kind() != ProcessKind::martingale)
    throw InvalidArgument("pathwise Ito check needs a martingale model");
  if (grid_intervals == 0) throw InvalidArgument("grid needs at least one interval");
  const TestFunction& f = c.f();
  const RegulatedFunction& v = spec.variance();

  const GaussianSampler sampler(
      spec, instants_with_companions(spec, Partition::uniform(spec.horizon(), grid_intervals)));
  const std::vector<Instant>& inst = sampler.instants();
  const auto m = static_cast<Eigen::Index>(inst.size());
  std::vector<double> dvc(inst.size(), 0.0);
  std::vector<double> e_xleft(inst.size(), 0.0);
  for (Eigen::Index k = 1; k < m; ++k) {
    dvc[k] = v.base(inst[k].time) - v.base(inst[k - 1].time);
    if (inst[k].time == inst[k - 1].time) {
      const Instant a = inst[k - 1], b = inst[k];
      e_xleft[k] = spec.covariance(a, b) - spec.covariance(a, a);
    }
  }

  std::vector<double> residual(n_paths), increment(n_paths);
  for_each_batch(sampler, n_paths, seed, kBatch, [&](std::size_t first, const Eigen::MatrixXd& x) {
    for (Eigen::Index p = 0; p < x.cols(); ++p) {
      double ito = 0.0, dv = 0.0, jumps = 0.0;
      for (Eigen::Index k = 1; k < m; ++k) {
        const double prev = x(k - 1, p), cur = x(k, p);
        const double d1 = f.f1(prev);
        ito += d1 * (cur - prev);
        if (dvc[k] != 0.0) dv += 0.5 * f.f2(prev) * dvc[k];
        if (inst[k].time == inst[k - 1].time)
          jumps += f.f(cur) - f.f(prev) - d1 * (cur - prev) + f.f2(prev) * e_xleft[k];
      }
      const double lhs = f.f(x(m - 1, p)) - f.f(x(0, p));
      const std::size_t i = first + static_cast<std::size_t>(p);
      residual[i] = lhs - (ito + dv + jumps);
      increment[i] = lhs;
    }
  });

  MartingaleMcReport out;
  out.grid_intervals = grid_intervals;
  out.n_paths = n_paths;
  out.seed = seed;
  double ss_r = 0.0, ss_l = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    ss_r += residual[i] * residual[i];
    ss_l += increment[i] * increment[i];
    mean += residual[i];
  }
  const auto n = static_cast<double>(n_paths);
  mean /= n;
  out.mean_residual = mean;
  out.rms_residual = std::sqrt(ss_r / n);
  out.relative_l2 = ss_l > 0.0 ? std::sqrt(ss_r / ss_l) : out.rms_residual;
  if (n_paths >= 2) {
    double ss = 0.0;
    for (double r : residual) ss += (r - mean) * (r - mean);
    out.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

McReport mc_s_transform(const ItoCase& c, const Observable& obs, std::size_t n_paths,
                        std::uint64_t seed) {
  require_paths(n_paths);
  const ProcessSpec& spec = c.spec();
  InstantTable table(spec);
  std::vector<CmTerm> h_terms(c.h().terms().begin(), c.h().terms().end());
  const InstantTable::Linear h = table.add(h_terms);
  const TestFunction& f = c.f();

  std::size_t row_a = 0, row_b = 0;
  InstantTable::Linear g;
  double inner_t = 0.0, jump_var = 0.0;
  switch (obs.kind) {
    case ObservableKind::x:
    case ObservableKind::f:
    case ObservableKind::f1:
    case ObservableKind::f2: row_a = table.add({obs.t, Side::at}); break;
    case ObservableKind::wick_exp: g = table.add(obs.g); break;
    case ObservableKind::smoothed_left:
    case ObservableKind::smoothed_right: {
      const Side side = obs.kind == ObservableKind::smoothed_left ? Side::left : Side::right;
      const Instant p = spec.normalize({obs.t, side});
      row_a = table.add(p);
      const OneSided vl = spec.variance().limits(obs.t);
      const double limit = side == Side::left ? vl.left : vl.right;
      inner_t = clamp_variance(limit - spec.covariance(p, p));
      break;
    }
    case ObservableKind::jump_wick: {
      const Instant l = spec.normalize({obs.t, Side::left});
      const Instant p = spec.normalize({obs.t, Side::at});
      row_a = table.add(l);
      row_b = table.add(p);
      jump_var = spec.covariance(p, p) - 2.0 * spec.covariance(l, p) + spec.covariance(l, l);
      break;
    }
  }

  const GaussianSampler sampler(spec, table.instants());
  std::vector<double> samples(n_paths);
  for_each_batch(sampler, n_paths, seed, kBatch, [&](std::size_t first, const Eigen::MatrixXd& x) {
    for (Eigen::Index p = 0; p < x.cols(); ++p) {
      const auto ra = static_cast<Eigen::Index>(row_a);
      double xi = 0.0;
      switch (obs.kind) {
        case ObservableKind::x: xi = x(ra, p); break;
        case ObservableKind::f: xi = f.f(x(ra, p)); break;
        case ObservableKind::f1: xi = f.f1(x(ra, p)); break;
        case ObservableKind::f2: xi = f.f2(x(ra, p)); break;
        case ObservableKind::wick_exp: xi = wick_exp(g, x, p); break;
        case ObservableKind::smoothed_left:
        case ObservableKind::smoothed_right: xi = psi(f.f, inner_t, x(ra, p)); break;
        case ObservableKind::jump_wick: {
          const double d = x(static_cast<Eigen::Index>(row_b), p) - x(ra, p);
          xi = (std::exp(obs.a * d - 0.5 * obs.a * obs.a * jump_var) - 1.0) * d;
          break;
        }
      }
      samples[first + static_cast<std::size_t>(p)] = wick_exp(h, x, p) * xi;
    }
  });
  return summarize(samples, s_transform(obs, c), seed);
}

SkorokhodCheck simple_skorokhod(const ProcessSpec& spec, const SimpleIntegrand& z,
                                const std::vector<CmTerm>& h_terms, std::size_t n_paths,
                                std::uint64_t seed) {
  require_paths(n_paths);
  const Partition pi(z.points);
  if (pi.horizon() != spec.horizon()) throw InvalidArgument("integrand partition horizon mismatch");
  const std::size_t n = pi.intervals();
  if (z.at.size() != n + 1 || z.between.size() != n)
    throw InvalidArgument("simple integrand needs n+1 point and n interval coefficients");

  const CameronMartinElement h(spec, h_terms);
  auto s_coeff = [&](const WickCoefficient& w) {
    return w.scale * std::exp(CameronMartinElement(spec, w.f).inner(h));
  };
  auto pair = [&](double t, Side side) { return h.pairing(spec.normalize({t, side})); };

  SkorokhodCheck out;
  for (std::size_t i = 0; i <= n; ++i)
    out.s_transform += s_coeff(z.at[i]) * (pair(pi[i], Side::right) - pair(pi[i], Side::left));
  for (std::size_t i = 1; i <= n; ++i)
    out.s_transform +=
        s_coeff(z.between[i - 1]) * (pair(pi[i], Side::left) - pair(pi[i - 1], Side::right));

  std::vector<double> s_at, s_between;
  for (const auto& w : z.at) s_at.push_back(s_coeff(w));
  for (const auto& w : z.between) s_between.push_back(s_coeff(w));
  const auto pts = pi.points();
  const ScalarFn step = [&](double s) {
    const auto it = std::lower_bound(pts.begin(), pts.end(), s);
    if (it != pts.end() && *it == s) return s_at[static_cast<std::size_t>(it - pts.begin())];
    return s_between[static_cast<std::size_t>(it - pts.begin()) - 1];
  };
  YsOptions ys;
  ys.tol = 1e-13;
  ys.pinned.assign(pts.begin(), pts.end());
  out.hk_integral = integrate_ys(step, h.hbar(), ys).value;

  // Each summand is exp<>(f) <> g with g = a difference of two instants.
  struct Piece {
    double scale;
    InstantTable::Linear f;
    std::size_t plus, minus;
    double e_gf;
  };
  InstantTable table(spec);
  const InstantTable::Linear hl = table.add(h_terms);
  std::vector<Piece> pieces;
  auto add_piece = [&](const WickCoefficient& w, Instant plus, Instant minus) {
    plus = spec.normalize(plus);
    minus = spec.normalize(minus);
    if (plus == minus) return;
    const CameronMartinElement fe(spec, w.f);
    pieces.push_back(
        {w.scale, table.add(w.f), table.add(plus), table.add(minus), fe.pairing(plus) - fe.pairing(minus)});
  };
  for (std::size_t i = 0; i <= n; ++i) add_piece(z.at[i], {pi[i], Side::right}, {pi[i], Side::left});
  for (std::size_t i = 1; i <= n; ++i)
    add_piece(z.between[i - 1], {pi[i], Side::left}, {pi[i - 1], Side::right});

  const GaussianSampler sampler(spec, table.instants());
  std::vector<double> samples(n_paths);
  for_each_batch(sampler, n_paths, seed, kBatch, [&](std::size_t first, const Eigen::MatrixXd& x) {
    for (Eigen::Index p = 0; p < x.cols(); ++p) {
      double integral = 0.0;
      for (const Piece& pc : pieces) {
        const double g = x(static_cast<Eigen::Index>(pc.plus), p) -
                         x(static_cast<Eigen::Index>(pc.minus), p);
        integral += pc.scale * wick_exp(pc.f, x, p) * (g - pc.e_gf);
      }
      samples[first + static_cast<std::size_t>(p)] = wick_exp(hl, x, p) * integral;
    }
  });
  out.mc = summarize(samples, out.s_transform, seed);
  return out;
}

McReport hermite_p2_identity_mc(const ProcessSpec& spec, const std::vector<CmTerm>& g_terms,
                                const std::vector<CmTerm>& h_terms, std::size_t n_paths,
                                std::uint64_t seed) {
  require_paths(n_paths);
  InstantTable table(spec);
  const InstantTable::Linear g = table.add(g_terms);
  const InstantTable::Linear h = table.add(h_terms);
  const double e_gh = CameronMartinElement(spec, g_terms).inner(CameronMartinElement(spec, h_terms));
  const GaussianSampler sampler(spec, table.instants());
  std::vector<double> samples(n_paths);
  for_each_batch(sampler, n_paths, seed, kBatch, [&](std::size_t first, const Eigen::MatrixXd& x) {
    for (Eigen::Index p = 0; p < x.cols(); ++p) {
      const double gv = eval_linear(g, x, p), hv = eval_linear(h, x, p);
      samples[first + static_cast<std::size_t>(p)] =
          (gv * gv - g.norm_sq) * (hv * hv - h.norm_sq);
    }
  });
  return summarize(samples, 2.0 * e_gh * e_gh, seed);
}

}  // namespace gaussito
