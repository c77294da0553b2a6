#include "gaussito/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gaussito/error.hpp"

namespace gaussito {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool instant_less(const Instant& a, const Instant& b) {
  if (a.time != b.time) return a.time < b.time;
  return static_cast<int>(a.side) < static_cast<int>(b.side);
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
  return splitmix64(splitmix64(seed) ^ path);
}

GaussianSampler::GaussianSampler(const ProcessSpec& spec, std::vector<Instant> instants)
    : instants_(std::move(instants)) {
  const std::size_t m = instants_.size();
  for (std::size_t i = 0; i < m; ++i)
    if (spec.covariance(instants_[i], instants_[i]) > 0.0) active_.push_back(i);
  const auto k = static_cast<Eigen::Index>(active_.size());
  Eigen::MatrixXd gram(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      gram(i, j) = gram(j, i) = spec.covariance(instants_[active_[i]], instants_[active_[j]]);
  if (k == 0) return;

  const double scale = std::max(spec.lambda(), gram.diagonal().maxCoeff());
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  double jitter = 1e-12 * scale;
  while (llt.info() != Eigen::Success) {
    if (jitter > 1e-8 * scale * (1.0 + 1e-9))
      throw SimulationError("Gram matrix not factorizable with jitter up to 1e-8 lambda");
    Eigen::MatrixXd shifted = gram;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    jitter_ = jitter;
    jitter *= 10.0;
  }
  lower_ = llt.matrixL();
}

Eigen::MatrixXd GaussianSampler::sample(std::uint64_t seed, std::size_t first,
                                        std::size_t count) const {
  const auto m = static_cast<Eigen::Index>(instants_.size());
  const auto k = static_cast<Eigen::Index>(active_.size());
  const auto n = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, n);
  if (k == 0 || n == 0) return out;
  Eigen::MatrixXd z(k, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    std::mt19937_64 rng(path_seed(seed, first + static_cast<std::size_t>(p)));
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < k; ++i) z(i, p) = normal(rng);
  }
  const Eigen::MatrixXd x = lower_.triangularView<Eigen::Lower>() * z;
  for (Eigen::Index i = 0; i < k; ++i) out.row(static_cast<Eigen::Index>(active_[i])) = x.row(i);
  return out;
}

std::vector<Instant> instants_with_companions(const ProcessSpec& spec, const Partition& grid) {
  if (grid.horizon() != spec.horizon()) throw InvalidArgument("grid horizon mismatch");
  std::vector<Instant> out;
  for (double t : grid.points()) out.push_back({t, Side::at});
  for (double s : spec.discontinuity_times()) {
    out.push_back({s, Side::at});
    if (s > 0.0) out.push_back({s, Side::left});
    if (s < spec.horizon()) out.push_back({s, Side::right});
  }
  std::sort(out.begin(), out.end(), instant_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t PathSet::row(Instant p) const {
  for (std::size_t i = 0; i < instants.size(); ++i)
    if (instants[i] == p) return i;
  return npos;
}

Eigen::VectorXd PathSet::left_jump(double s) const {
  const std::size_t l = row({s, Side::left});
  const std::size_t a = row({s, Side::at});
  if (l == npos || a == npos) throw InvalidArgument("no left companion at requested time");
  return (values.row(static_cast<Eigen::Index>(a)) - values.row(static_cast<Eigen::Index>(l)))
      .transpose();
}

PathSet simulate_instants(const ProcessSpec& spec, std::vector<Instant> instants,
                          std::size_t n_paths, std::uint64_t seed) {
  GaussianSampler sampler(spec, std::move(instants));
  return PathSet{sampler.instants(), sampler.sample(seed, 0, n_paths)};
}

PathSet simulate_paths(const ProcessSpec& spec, const Partition& grid, std::size_t n_paths,
                       std::uint64_t seed) {
  return simulate_instants(spec, instants_with_companions(spec, grid), n_paths, seed);
}

void for_each_batch(const GaussianSampler& sampler, std::size_t n_paths, std::uint64_t seed,
                    std::size_t batch,
                    const std::function<void(std::size_t, const Eigen::MatrixXd&)>& visit) {
  if (batch == 0) throw InvalidArgument("batch size must be positive");
  for (std::size_t first = 0; first < n_paths; first += batch) {
    const std::size_t count = std::min(batch, n_paths - first);
    visit(first, sampler.sample(seed, first, count));
  }
}

McReport summarize(const std::vector<double>& samples, double reference, std::uint64_t seed) {
  McReport r;
  r.n_paths = samples.size();
  r.seed = seed;
  r.reference = reference;
  if (samples.empty()) throw InvalidArgument("Monte Carlo estimate needs at least one path");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  r.estimate = mean;
  if (samples.size() >= 2) {
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(samples.size() - 1);
    r.standard_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  // Floor at rounding level so deterministic observables get a meaningful z.
  const double se = std::max(r.standard_error, 1e-12 * std::max(1.0, std::abs(reference)));
  r.z_score = (r.estimate - reference) / se;
  return r;
}

McReport path_qv_mc(const ProcessSpec& spec, const Partition& grid, std::size_t n_paths,
                    std::uint64_t seed) {
  if (n_paths == 0) throw InvalidArgument("path_qv_mc needs n_paths >= 1");
  if (!spec.continuous_qv())
    throw InvalidArgument("model '" + spec.id() + "' has no continuous quadratic variation");
  double reference = *spec.continuous_qv();
  for (const auto& r : spec.discontinuities()) reference += r.e_dminus_sq + r.e_dplus_sq;

  GaussianSampler sampler(spec, instants_with_companions(spec, grid));
  std::vector<double> qv(n_paths, 0.0);
  for_each_batch(sampler, n_paths, seed, 1024, [&](std::size_t first, const Eigen::MatrixXd& x) {
    for (Eigen::Index p = 0; p < x.cols(); ++p) {
      double acc = 0.0;
      for (Eigen::Index i = 1; i < x.rows(); ++i) {
        const double d = x(i, p) - x(i - 1, p);
        acc += d * d;
      }
      qv[first + static_cast<std::size_t>(p)] = acc;
    }
  });
  return summarize(qv, reference, seed);
}

}  // namespace gaussito
