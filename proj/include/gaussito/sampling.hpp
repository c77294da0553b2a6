#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gaussito/gaussproc.hpp"

namespace gaussito {

/// Exact joint Gaussian sampler for X at a fixed list of instants.
/// The Gram matrix is factorized once; instants with zero variance are
/// pinned to 0 and excluded from the factorization.
class GaussianSampler {
 public:
  GaussianSampler(const ProcessSpec& spec, std::vector<Instant> instants);

  const std::vector<Instant>& instants() const { return instants_; }
  std::size_t size() const { return instants_.size(); }
  /// Jitter added to the Gram diagonal, 0 if the plain factorization succeeded.
  double jitter() const { return jitter_; }

  /// Columns [first, first + count) of the path matrix (instants x paths).
  /// Path p draws from its own stream seeded by (seed, p), so any batching
  /// yields the same values.
  Eigen::MatrixXd sample(std::uint64_t seed, std::size_t first, std::size_t count) const;

 private:
  std::vector<Instant> instants_;
  std::vector<std::size_t> active_;  // rows with positive variance
  Eigen::MatrixXd lower_;
  double jitter_ = 0.0;
};

/// Per-path seed derived from (seed, path index) by SplitMix64 mixing.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path);

/// Grid points plus one-sided companions at every discontinuity, ordered by
/// (time, side).
std::vector<Instant> instants_with_companions(const ProcessSpec& spec, const Partition& grid);

struct PathSet {
  std::vector<Instant> instants;
  Eigen::MatrixXd values;  // instants x paths

  /// Row of an instant, or npos.
  std::size_t row(Instant p) const;
  /// D-X_s per path, from the (s, left) and (s, at) rows.
  Eigen::VectorXd left_jump(double s) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

PathSet simulate_instants(const ProcessSpec& spec, std::vector<Instant> instants,
                          std::size_t n_paths, std::uint64_t seed);

/// X on the grid with discontinuity companions; n_paths = 0 gives an empty
/// matrix.
PathSet simulate_paths(const ProcessSpec& spec, const Partition& grid, std::size_t n_paths,
                       std::uint64_t seed);

/// Streams paths in column blocks of at most `batch` to `visit(first, block)`.
void for_each_batch(const GaussianSampler& sampler, std::size_t n_paths, std::uint64_t seed,
                    std::size_t batch,
                    const std::function<void(std::size_t, const Eigen::MatrixXd&)>& visit);

struct McReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  double reference = 0.0;
  double z_score = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Sample mean and standard error of per-path values; z against reference,
/// with the standard error floored at 1e-12 max(1, |reference|).
McReport summarize(const std::vector<double>& samples, double reference, std::uint64_t seed);

/// MC mean of the pathwise quadratic sum on grid + companions against
/// v(T) + sum E[(Delta X_s)^2].
McReport path_qv_mc(const ProcessSpec& spec, const Partition& grid, std::size_t n_paths,
                    std::uint64_t seed);

}  // namespace gaussito
