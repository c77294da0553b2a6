#include "gaussito/gaussproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaussito/error.hpp"

namespace gaussito {

const char* to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::martingale: return "martingale";
    case ProcessKind::rcll: return "rcll";
    case ProcessKind::general: return "general";
  }
  return "general";
}

double DiscontinuityRecord::left_identity_defect() const {
  return 2.0 * e_x_dminus() - e_dminus_sq - (v_left - v_minus) - (v_at - v_left);
}

double DiscontinuityRecord::right_identity_defect() const {
  return 2.0 * e_x_dplus + e_dplus_sq + (v_right - v_plus) - (v_right - v_at);
}

namespace {

Instant normalize_instant(Instant p, double horizon) {
  if (p.time < 0.0 || p.time > horizon) throw DomainError("instant outside [0,T]");
  if (p.time == 0.0 && p.side == Side::left) p.side = Side::at;
  if (p.time == horizon && p.side == Side::right) p.side = Side::at;
  return p;
}

// 1{s <= t} for at/right instants, 1{s < t} for left instants.
bool reaches(double s, Instant p) { return p.side == Side::left ? s < p.time : s <= p.time; }

class BrownianModel final : public CovarianceModel {
 public:
  double covariance(Instant a, Instant b) const override { return std::min(a.time, b.time); }
};

class FbmModel final : public CovarianceModel {
 public:
  explicit FbmModel(double hurst) : two_h_(2.0 * hurst) {}
  double covariance(Instant a, Instant b) const override {
    const double t = a.time, s = b.time;
    return 0.5 * (std::pow(t, two_h_) + std::pow(s, two_h_) - std::pow(std::abs(t - s), two_h_));
  }

 private:
  double two_h_;
};

class JumpBmModel final : public CovarianceModel {
 public:
  explicit JumpBmModel(std::vector<std::pair<double, double>> jumps) : jumps_(std::move(jumps)) {}
  double covariance(Instant a, Instant b) const override {
    double acc = std::min(a.time, b.time);
    for (const auto& [s, var] : jumps_)
      if (reaches(s, a) && reaches(s, b)) acc += var;
    return acc;
  }

 private:
  std::vector<std::pair<double, double>> jumps_;
};

class CoupledJumpModel final : public CovarianceModel {
 public:
  CoupledJumpModel(double c, double s0) : c_(c), s0_(s0) {}
  double covariance(Instant a, Instant b) const override {
    const double ia = reaches(s0_, a) ? 1.0 : 0.0;
    const double ib = reaches(s0_, b) ? 1.0 : 0.0;
    return std::min(a.time, b.time) + c_ * ib * std::min(a.time, s0_) +
           c_ * ia * std::min(b.time, s0_) + c_ * c_ * s0_ * ia * ib;
  }

 private:
  double c_, s0_;
};

// Block j covers [s0(1 - 2^-j), s0(1 - 2^-(j+1))). Inside block j the process
// is cos(theta) zeta_j + sin(theta) zeta_{j+1} with theta running from 0 to
// pi/2, so it is continuous across block boundaries and has unit variance.
class EvanescentModel final : public CovarianceModel {
 public:
  explicit EvanescentModel(double s0) : s0_(s0) {}

  double covariance(Instant a, Instant b) const override {
    if (!active(a) || !active(b)) return 0.0;
    const auto [ja, ta] = locate(a.time);
    const auto [jb, tb] = locate(b.time);
    if (ja == jb) return std::cos(ta - tb);
    if (ja + 1 == jb) return std::sin(ta) * std::cos(tb);
    if (jb + 1 == ja) return std::sin(tb) * std::cos(ta);
    return 0.0;
  }

 private:
  bool active(Instant p) const { return p.time < s0_; }

  std::pair<long, double> locate(double t) const {
    long j = 0;
    double lo = 0.0;
    double width = 0.5 * s0_;
    while (t >= lo + width && j < 1000) {
      lo += width;
      width *= 0.5;
      ++j;
    }
    const double theta = 0.5 * std::numbers::pi * (t - lo) / width;
    return {j, std::min(theta, 0.5 * std::numbers::pi)};
  }

  double s0_;
};

void require_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InvalidArgument("horizon must be positive and finite");
}

}  // namespace

ProcessSpec::ProcessSpec(std::string id, double horizon, ProcessKind kind,
                         std::shared_ptr<const CovarianceModel> model, RegulatedFunction variance,
                         std::vector<DiscontinuityRecord> records,
                         std::optional<double> continuous_qv)
    : id_(std::move(id)), horizon_(horizon), kind_(kind), model_(std::move(model)),
      variance_(std::move(variance)), records_(std::move(records)),
      continuous_qv_(continuous_qv), lambda_(0.0) {
  require_horizon(horizon_);
  if (!model_) throw InvalidArgument("process spec needs a covariance model");
  if (variance_.horizon() != horizon_) throw InvalidArgument("variance horizon mismatch");
  for (const auto& r : records_)
    if (r.s < 0.0 || r.s > horizon_) throw DomainError("discontinuity outside [0,T]");
  // sup V over [0,T]: V is regulated, so the sup is attained by values or
  // one-sided limits; scan a fine grid plus every jump.
  double sup = 0.0;
  constexpr int kScan = 4096;
  for (int i = 0; i <= kScan; ++i) sup = std::max(sup, variance_(horizon_ * i / kScan));
  for (const Jump& j : variance_.jumps()) {
    const OneSided l = variance_.limits(j.time);
    sup = std::max({sup, l.left, l.value, l.right});
  }
  lambda_ = sup;
}

std::vector<double> ProcessSpec::discontinuity_times() const {
  std::vector<double> out;
  for (const auto& r : records_) out.push_back(r.s);
  std::sort(out.begin(), out.end());
  return out;
}

double ProcessSpec::covariance(Instant a, Instant b) const {
  return model_->covariance(normalize_instant(a, horizon_), normalize_instant(b, horizon_));
}

Instant ProcessSpec::normalize(Instant p) const { return normalize_instant(p, horizon_); }

ProcessSpec ProcessSpec::with_record_order(std::span<const std::size_t> order) const {
  if (order.size() != records_.size()) throw InvalidArgument("record order has wrong length");
  std::vector<DiscontinuityRecord> reordered;
  std::vector<bool> seen(records_.size(), false);
  for (std::size_t i : order) {
    if (i >= records_.size() || seen[i]) throw InvalidArgument("record order is not a permutation");
    seen[i] = true;
    reordered.push_back(records_[i]);
  }
  ProcessSpec out = *this;
  out.records_ = std::move(reordered);
  return out;
}

ProcessSpec brownian(double horizon) {
  require_horizon(horizon);
  return ProcessSpec("brownian", horizon, ProcessKind::martingale,
                     std::make_shared<BrownianModel>(), RegulatedFunction::identity(horizon), {},
                     horizon);
}

ProcessSpec fbm(double hurst, double horizon) {
  require_horizon(horizon);
  if (!(hurst > 0.0 && hurst < 1.0)) throw InvalidArgument("Hurst parameter must lie in (0,1)");
  const double two_h = 2.0 * hurst;
  RegulatedFunction v(
      horizon, [two_h](double t) { return std::pow(t, two_h); }, {},
      [two_h](double t) { return two_h * std::pow(t, two_h - 1.0); });
  std::optional<double> qv;
  if (hurst == 0.5) qv = horizon;
  if (hurst > 0.5) qv = 0.0;
  return ProcessSpec("fbm", horizon, ProcessKind::rcll, std::make_shared<FbmModel>(hurst),
                     std::move(v), {}, qv);
}

ProcessSpec jump_bm(std::vector<std::pair<double, double>> jumps, double horizon) {
  require_horizon(horizon);
  std::sort(jumps.begin(), jumps.end());
  std::vector<Jump> vjumps;
  std::vector<DiscontinuityRecord> records;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const auto [s, var] = jumps[k];
    if (!(s > 0.0 && s < horizon)) throw InvalidArgument("jump times must be interior to (0,T)");
    if (!(var > 0.0)) throw InvalidArgument("jump variances must be positive");
    if (k > 0 && s == jumps[k - 1].first) throw InvalidArgument("jump times must be distinct");
    vjumps.push_back({s, var, 0.0});
    DiscontinuityRecord r;
    r.s = s;
    r.v_left = r.v_minus = s + cumulative;
    cumulative += var;
    r.v_at = r.v_right = r.v_plus = s + cumulative;
    r.e_dminus_sq = var;
    records.push_back(r);
  }
  RegulatedFunction v(
      horizon, [](double t) { return t; }, std::move(vjumps), [](double) { return 1.0; });
  return ProcessSpec("jump_bm", horizon, ProcessKind::martingale,
                     std::make_shared<JumpBmModel>(std::move(jumps)), std::move(v),
                     std::move(records), horizon);
}

ProcessSpec coupled_jump_bm(double coupling, double s0, double horizon) {
  require_horizon(horizon);
  if (!(s0 > 0.0 && s0 < horizon)) throw InvalidArgument("s0 must be interior to (0,T)");
  if (!std::isfinite(coupling)) throw InvalidArgument("coupling must be finite");
  const double c = coupling;
  const double dv = (2.0 * c + c * c) * s0;
  RegulatedFunction v(
      horizon, [](double t) { return t; }, {{s0, dv, 0.0}}, [](double) { return 1.0; });
  DiscontinuityRecord r;
  r.s = s0;
  r.v_left = r.v_minus = s0;
  r.v_at = r.v_right = r.v_plus = s0 + dv;
  r.e_dminus_sq = c * c * s0;
  r.e_xleft_dminus = c * s0;
  return ProcessSpec("coupled_jump_bm", horizon, ProcessKind::rcll,
                     std::make_shared<CoupledJumpModel>(c, s0), std::move(v), {r}, horizon);
}

ProcessSpec evanescent(double s0, double horizon) {
  require_horizon(horizon);
  if (!(s0 > 0.0 && s0 < horizon)) throw InvalidArgument("s0 must be interior to (0,T)");
  RegulatedFunction v(
      horizon, [](double) { return 1.0; }, {{s0, -1.0, 0.0}}, [](double) { return 0.0; });
  DiscontinuityRecord r;
  r.s = s0;
  r.v_left = 1.0;
  r.v_at = r.v_right = 0.0;
  r.v_minus = r.v_plus = 0.0;
  return ProcessSpec("evanescent", horizon, ProcessKind::general,
                     std::make_shared<EvanescentModel>(s0), std::move(v), {r}, std::nullopt);
}

ProcessSpec catalog(const std::string& id, const ModelParams& p) {
  if (id == "brownian") return brownian(p.horizon);
  if (id == "fbm") return fbm(p.hurst, p.horizon);
  if (id == "jump_bm") return jump_bm(p.jumps, p.horizon);
  if (id == "coupled_jump_bm") return coupled_jump_bm(p.coupling, p.s0, p.horizon);
  if (id == "evanescent") return evanescent(p.s0, p.horizon);
  throw InvalidArgument("unknown model id '" + id + "'");
}

std::vector<CatalogEntry> catalog_entries() {
  return {
      {"brownian", "horizon", "continuous Ito formula; planar QV decays like T^2/n"},
      {"fbm", "hurst in (0,1), horizon", "non-semimartingale case; bounded planar variation"},
      {"jump_bm", "jumps: [[time, variance], ...], horizon",
       "martingale with independent Gaussian jumps"},
      {"coupled_jump_bm", "coupling c, s0, horizon",
       "left jump correlated with the past: E[X_{s-} D-X_s] = c s0"},
      {"evanescent", "s0, horizon", "weak left limit vanishes while V(s0-) = 1"},
  };
}

DiscontinuityRecord derive_record(const ProcessSpec& spec, double s) {
  const Instant l{s, Side::left}, m{s, Side::at}, r{s, Side::right};
  const double cll = spec.covariance(l, l), clm = spec.covariance(l, m);
  const double cmm = spec.covariance(m, m), cmr = spec.covariance(m, r);
  const double crr = spec.covariance(r, r);
  const OneSided v = spec.variance().limits(s);
  DiscontinuityRecord out;
  out.s = s;
  out.v_at = v.value;
  out.v_left = v.left;
  out.v_right = v.right;
  out.v_minus = cll;
  out.v_plus = crr;
  out.e_dminus_sq = cmm - 2.0 * clm + cll;
  out.e_dplus_sq = crr - 2.0 * cmr + cmm;
  out.e_xleft_dminus = clm - cll;
  out.e_x_dplus = cmr - cmm;
  return out;
}

CameronMartinElement::CameronMartinElement(const ProcessSpec& spec, std::vector<CmTerm> terms)
    : model_(spec.model()), terms_(std::move(terms)),
      hbar_(RegulatedFunction::constant(spec.horizon(), 0.0)), norm_sq_(0.0) {
  const double horizon = spec.horizon();
  for (CmTerm& term : terms_) term.at = normalize_instant(term.at, horizon);

  for (const CmTerm& a : terms_)
    for (const CmTerm& b : terms_) norm_sq_ += a.coeff * b.coeff * model_->covariance(a.at, b.at);

  std::vector<Jump> jumps;
  for (double s : spec.discontinuity_times()) {
    const double left = pairing(normalize_instant({s, Side::left}, horizon));
    const double at = pairing({s, Side::at});
    const double right = pairing(normalize_instant({s, Side::right}, horizon));
    Jump j{s, s > 0.0 ? at - left : 0.0, s < horizon ? right - at : 0.0};
    if (j.delta_minus != 0.0 || j.delta_plus != 0.0) jumps.push_back(j);
  }
  auto model = model_;
  auto terms_copy = terms_;
  ScalarFn full = [model, terms_copy](double t) {
    double acc = 0.0;
    for (const CmTerm& term : terms_copy) acc += term.coeff * model->covariance({t}, term.at);
    return acc;
  };
  hbar_ = RegulatedFunction::from_evaluator(horizon, std::move(full), std::move(jumps));
}

double CameronMartinElement::pairing(Instant p) const {
  double acc = 0.0;
  for (const CmTerm& term : terms_) acc += term.coeff * model_->covariance(p, term.at);
  return acc;
}

double CameronMartinElement::inner(const CameronMartinElement& g) const {
  double acc = 0.0;
  for (const CmTerm& term : g.terms_) acc += term.coeff * pairing(term.at);
  return acc;
}

std::vector<double> CameronMartinElement::times() const {
  std::vector<double> out;
  for (const CmTerm& term : terms_) out.push_back(term.at.time);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CameronMartinElement cm_element(const ProcessSpec& spec, std::vector<CmTerm> terms) {
  return CameronMartinElement(spec, std::move(terms));
}

namespace {

template <class Cell>
double planar_sum(const Partition& pi, const Cell& cell) {
  double acc = 0.0;
  for (std::size_t i = 1; i < pi.size(); ++i)
    for (std::size_t j = 1; j < pi.size(); ++j) acc += cell(i, j);
  return acc;
}

}  // namespace

double planar_qv_sum(const ProcessSpec& spec, const Partition& pi) {
  if (pi.horizon() != spec.horizon()) throw InvalidArgument("partition horizon mismatch");
  const double T = spec.horizon();
  auto lo = [&](std::size_t i) { return normalize_instant({pi[i - 1], Side::right}, T); };
  auto hi = [&](std::size_t i) { return normalize_instant({pi[i], Side::left}, T); };
  return planar_sum(pi, [&](std::size_t i, std::size_t j) {
    const double c = spec.covariance(hi(i), hi(j)) - spec.covariance(hi(i), lo(j)) -
                     spec.covariance(lo(i), hi(j)) + spec.covariance(lo(i), lo(j));
    return c * c;
  });
}

double planar_variation_sum(const ProcessSpec& spec, const Partition& pi) {
  if (pi.horizon() != spec.horizon()) throw InvalidArgument("partition horizon mismatch");
  return planar_sum(pi, [&](std::size_t i, std::size_t j) {
    return std::abs(spec.covariance(pi[i], pi[j]) + spec.covariance(pi[i - 1], pi[j - 1]) -
                    spec.covariance(pi[i], pi[j - 1]) - spec.covariance(pi[i - 1], pi[j]));
  });
}

}  // namespace gaussito
