#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gaussito/gaussproc.hpp"
#include "gaussito/heatkernel.hpp"
#include "gaussito/sampling.hpp"
#include "gaussito/stieltjes.hpp"

namespace gaussito {

struct ItoOptions {
  double ys_tol = 1e-9;
  std::size_t max_refine = 400000;
  double ls_tol = 1e-13;
};

/// One verification case: process, test function and Cameron-Martin element.
/// Construction rejects F whose growth exponent violates a < 1/(4 lambda).
class ItoCase {
 public:
  ItoCase(std::string id, ProcessSpec spec, TestFunction f, std::vector<CmTerm> h,
          ItoOptions options = {});

  const std::string& id() const { return id_; }
  const ProcessSpec& spec() const { return spec_; }
  const TestFunction& f() const { return f_; }
  const CameronMartinElement& h() const { return h_; }
  const ItoOptions& options() const { return options_; }

  /// Same case with h replaced; used for scaling and battery sweeps.
  ItoCase with_h(std::vector<CmTerm> h) const;

 private:
  std::string id_;
  ProcessSpec spec_;
  TestFunction f_;
  CameronMartinElement h_;
  ItoOptions options_;
};

/// Default battery of first-chaos elements for a model: X_T, two and three
/// point combinations on a fixed grid, and for each discontinuity s the
/// elements X_{s-} - X_s / 2 and X_{s/2} + X_{0.9 s}.
std::vector<std::vector<CmTerm>> auto_battery(const ProcessSpec& spec);

enum class ObservableKind {
  x,               // X_t
  f,               // F(X_t)
  f1,              // F'(X_t)
  f2,              // F''(X_t)
  wick_exp,        // exp<>(g)
  smoothed_left,   // psi_F(V(t-) - V^-(t), X_{t-})
  smoothed_right,  // psi_F(V(t+) - V^+(t), X_{t+})
  jump_wick,       // (exp(a D - a^2 E[D^2]/2) - 1) D with D = D-X_t
};

struct Observable {
  ObservableKind kind = ObservableKind::x;
  double t = 0.0;
  double a = 0.0;           // jump_wick exponent
  std::vector<CmTerm> g;    // wick_exp argument
};

/// Closed-form S-transform (S xi)(h) of the observable at the case's h.
double s_transform(const Observable& obs, const ItoCase& c);

/// Removes single terms from the right-hand side; used to show every term
/// is needed.
struct ItoMutation {
  bool drop_ys_integral = false;
  bool drop_dv_integral = false;
  bool drop_left_jumps = false;
  bool drop_right_jumps = false;
  bool drop_xleft_correction = false;

  bool any() const {
    return drop_ys_integral || drop_dv_integral || drop_left_jumps || drop_right_jumps ||
           drop_xleft_correction;
  }
};

struct JumpTerm {
  double s = 0.0;
  double value = 0.0;
};

struct ItoTerms {
  double lhs = 0.0;
  double ys_integral = 0.0;   // int psi_F'(V, hbar) dhbar
  double dv_integral = 0.0;   // 1/2 int psi_F''(V, hbar) dV (dV^c for the RCLL form)
  double left_jump_sum = 0.0;
  double right_jump_sum = 0.0;
  double xleft_correction = 0.0;  // RCLL form only, part of left_jump_sum
  std::vector<JumpTerm> left_jumps;
  std::vector<JumpTerm> right_jumps;
  double rhs = 0.0;
  double residual = 0.0;
  double ys_error_estimate = 0.0;
  bool converged = false;
};

/// S-transform form of the Ito formula at h: every term is closed form
/// except the Young-Stieltjes and Lebesgue-Stieltjes integrals.
ItoTerms ito_stransform_residual(const ItoCase& c, const ItoMutation& mutation = {});

/// Reduced form for stochastically RCLL models: left-limit integrand, dV^c
/// and a single left-jump sum carrying F''(X_{s-}) E[X_{s-} D-X_s].
ItoTerms ito_rcll_residual(const ItoCase& c, const ItoMutation& mutation = {});

struct MartingaleMcReport {
  double relative_l2 = 0.0;     // rms(residual) / rms(F(X_T) - F(X_0))
  double rms_residual = 0.0;
  double mean_residual = 0.0;
  double standard_error = 0.0;  // of the mean residual
  std::size_t grid_intervals = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Pathwise RCLL Ito identity on a uniform grid plus jump companions:
/// left-point Ito sum, left-point dV^c sum and exact jump terms.
MartingaleMcReport martingale_ito_mc(const ItoCase& c, std::size_t grid_intervals,
                                     std::size_t n_paths, std::uint64_t seed);

/// E[exp<>(h) xi] by simulation, against s_transform.
McReport mc_s_transform(const ItoCase& c, const Observable& obs, std::size_t n_paths,
                        std::uint64_t seed);

/// c exp<>(f), with f in the first chaos.
struct WickCoefficient {
  double scale = 1.0;
  std::vector<CmTerm> f;
};

/// Z = F_0 1{0} + sum_i G_i 1{(t_{i-1}, t_i)} + F_i 1{t_i}.
struct SimpleIntegrand {
  std::vector<double> points;            // 0 = t_0 < ... < t_n = T
  std::vector<WickCoefficient> at;       // F_0 .. F_n
  std::vector<WickCoefficient> between;  // G_1 .. G_n
};

struct SkorokhodCheck {
  double s_transform = 0.0;  // closed-form sum over the partition
  double hk_integral = 0.0;  // int (S Z_s)(h) dhbar(s) by the YS engine
  McReport mc;               // E[exp<>(h) int Z d<>X] against s_transform
};

/// Simple-integrand Wick-Skorokhod integral with exp<>(f) <> g =
/// exp<>(f) (g - E[g f]).
SkorokhodCheck simple_skorokhod(const ProcessSpec& spec, const SimpleIntegrand& z,
                                const std::vector<CmTerm>& h, std::size_t n_paths,
                                std::uint64_t seed);

/// E[P2(g) P2(h)] with P2(x) = x^2 - E[x^2]; reference 2 E[gh]^2.
McReport hermite_p2_identity_mc(const ProcessSpec& spec, const std::vector<CmTerm>& g,
                                const std::vector<CmTerm>& h, std::size_t n_paths,
                                std::uint64_t seed);

}  // namespace gaussito
