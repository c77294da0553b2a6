#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaussito/regulated.hpp"

namespace gaussito {

/// Which member of the one-sided family {X_{t-}, X_t, X_{t+}} is meant.
/// One-sided members are weak L2 limits.
enum class Side { left, at, right };

struct Instant {
  double time = 0.0;
  Side side = Side::at;

  friend bool operator==(const Instant&, const Instant&) = default;
};

/// Closed-form covariance E[X_a X_b] over instants.
class CovarianceModel {
 public:
  virtual ~CovarianceModel() = default;
  virtual double covariance(Instant a, Instant b) const = 0;
};

enum class ProcessKind { martingale, rcll, general };

const char* to_string(ProcessKind kind);

/// Second-moment data of X at a stochastic discontinuity s.
struct DiscontinuityRecord {
  double s = 0.0;
  double v_at = 0.0;            // V(s)
  double v_left = 0.0;          // V(s-), limit of the variance function
  double v_right = 0.0;         // V(s+)
  double v_minus = 0.0;         // E[X_{s-}^2]
  double v_plus = 0.0;          // E[X_{s+}^2]
  double e_dminus_sq = 0.0;     // E[(D-X_s)^2]
  double e_dplus_sq = 0.0;      // E[(D+X_s)^2]
  double e_xleft_dminus = 0.0;  // E[X_{s-} D-X_s]
  double e_x_dplus = 0.0;       // E[X_s D+X_s]

  /// E[X_s D-X_s]
  double e_x_dminus() const { return e_xleft_dminus + e_dminus_sq; }

  /// 2E[X_s D-X_s] - E[(D-X_s)^2] - (V(s-) - V^-(s)) - (V(s) - V(s-)); zero for a consistent record.
  double left_identity_defect() const;
  /// 2E[X_s D+X_s] + E[(D+X_s)^2] + (V(s+) - V^+(s)) - (V(s+) - V(s)); zero for a consistent record.
  double right_identity_defect() const;
};

struct ModelParams {
  double horizon = 1.0;
  double hurst = 0.5;
  std::vector<std::pair<double, double>> jumps;  // (time, variance)
  double coupling = 1.0;
  double s0 = 0.5;
};

/// A centered Gaussian process model with closed-form covariance, variance
/// function and discontinuity records. Immutable after construction.
class ProcessSpec {
 public:
  ProcessSpec(std::string id, double horizon, ProcessKind kind,
              std::shared_ptr<const CovarianceModel> model, RegulatedFunction variance,
              std::vector<DiscontinuityRecord> records, std::optional<double> continuous_qv);

  const std::string& id() const { return id_; }
  double horizon() const { return horizon_; }
  ProcessKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const RegulatedFunction& variance() const { return variance_; }
  std::span<const DiscontinuityRecord> discontinuities() const { return records_; }
  std::vector<double> discontinuity_times() const;
  /// v(T), the deterministic continuous part of the pathwise quadratic
  /// variation, when the model has one.
  std::optional<double> continuous_qv() const { return continuous_qv_; }

  double covariance(double t, double s) const { return model_->covariance({t}, {s}); }
  double covariance(Instant a, Instant b) const;
  /// Maps (0, left) and (T, right) to the instants themselves; rejects
  /// times outside [0,T].
  Instant normalize(Instant p) const;
  std::shared_ptr<const CovarianceModel> model() const { return model_; }

  /// Same process with the discontinuity list reordered; used to check that
  /// jump sums do not depend on enumeration order.
  ProcessSpec with_record_order(std::span<const std::size_t> order) const;

 private:
  std::string id_;
  double horizon_;
  ProcessKind kind_;
  std::shared_ptr<const CovarianceModel> model_;
  RegulatedFunction variance_;
  std::vector<DiscontinuityRecord> records_;
  std::optional<double> continuous_qv_;
  double lambda_;
};

ProcessSpec brownian(double horizon = 1.0);
ProcessSpec fbm(double hurst, double horizon = 1.0);
/// X_t = B_t + sum_k xi_k 1{t >= s_k}, xi_k ~ N(0, variance_k) independent.
ProcessSpec jump_bm(std::vector<std::pair<double, double>> jumps, double horizon = 1.0);
/// X_t = B_t + c B_{s0} 1{t >= s0}.
ProcessSpec coupled_jump_bm(double coupling, double s0, double horizon = 1.0);
/// Unit-variance traveling wave on dyadic blocks of [0, s0), zero on
/// [s0, T]; its weak left limit at s0 vanishes while V(s0-) = 1.
ProcessSpec evanescent(double s0, double horizon = 1.0);

ProcessSpec catalog(const std::string& id, const ModelParams& params);

struct CatalogEntry {
  std::string id;
  std::string params;
  std::string exercises;
};
std::vector<CatalogEntry> catalog_entries();

/// Record fields recomputed from instant covariances and V; a second route to
/// the analytic records.
DiscontinuityRecord derive_record(const ProcessSpec& spec, double s);

struct CmTerm {
  double coeff = 0.0;
  Instant at;
};

/// h = sum a_i X_{p_i} in the first chaos, with hbar(t) = E[X_t h].
class CameronMartinElement {
 public:
  CameronMartinElement(const ProcessSpec& spec, std::vector<CmTerm> terms);

  std::span<const CmTerm> terms() const { return terms_; }
  const RegulatedFunction& hbar() const { return hbar_; }
  double norm_sq() const { return norm_sq_; }
  /// E[X_p h]
  double pairing(Instant p) const;
  /// E[g h]
  double inner(const CameronMartinElement& g) const;
  std::vector<double> times() const;

 private:
  std::shared_ptr<const CovarianceModel> model_;
  std::vector<CmTerm> terms_;
  RegulatedFunction hbar_;
  double norm_sq_;
};

CameronMartinElement cm_element(const ProcessSpec& spec, std::vector<CmTerm> terms);

/// sum_i sum_j E[(X_{t_i-} - X_{t_{i-1}+})(X_{t_j-} - X_{t_{j-1}+})]^2
double planar_qv_sum(const ProcessSpec& spec, const Partition& pi);

/// sum_i sum_j |R(t_i,t_j) + R(t_{i-1},t_{j-1}) - R(t_i,t_{j-1}) - R(t_{i-1},t_j)|
double planar_variation_sum(const ProcessSpec& spec, const Partition& pi);

}  // namespace gaussito
