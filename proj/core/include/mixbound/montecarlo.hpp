#ifndef MIXBOUND_MONTECARLO_HPP
#define MIXBOUND_MONTECARLO_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "mixbound/families.hpp"

namespace mixbound {

/// Reproducible: identical inputs and seed give a bit-identical estimate.
/// For a single run (repetitions == 1) stddev is the standard error of the
/// mean; for repetition_stats it is the sample stddev across repetitions.
struct McEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  std::uint64_t sample_size = 0;
  std::uint32_t repetitions = 1;
  std::uint64_t seed = 0;
};

/// Precomputed mixture log-density; one shared log(x) per evaluation and a
/// max-shifted log-sum-exp keep the Monte-Carlo loops cheap and stable.
class MixtureLogDensity {
 public:
  explicit MixtureLogDensity(const Mixture& m);
  double operator()(double x) const;

 private:
  std::vector<LogLinForm> forms_;
  bool any_log_ = false;
};

/// n iid draws from the mixture (categorical choice, then the component
/// sampler), deterministic given the seed.
std::vector<double> sample_mixture(const Mixture& m, std::size_t n, std::uint64_t seed);

/// Plug-in estimator (1/s) sum log(m(x_i)/m'(x_i)), x_i ~ m.
McEstimate mc_kl(const Mixture& m, const Mixture& m_prime, std::size_t s, std::uint64_t seed);

/// Plug-in entropy estimator -(1/s) sum log m(x_i).
McEstimate mc_entropy(const Mixture& m, std::size_t s, std::uint64_t seed);

/// Runs `estimator` for reps seeds derived from base_seed (splitmix mixing)
/// and reports mean and sample stddev across repetitions. Repetitions may run
/// on up to `threads` threads; the reduction order is fixed by rep index.
McEstimate repetition_stats(const std::function<double(std::uint64_t)>& estimator,
                            std::uint32_t reps, std::uint64_t base_seed,
                            std::uint64_t sample_size_meta = 0, int threads = 1);

} // namespace mixbound

#endif
