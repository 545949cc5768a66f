#include "mixbound/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mixbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class MixtureSampler {
 public:
  explicit MixtureSampler(const Mixture& m) : components_(m.components()) {
    double acc = 0.0;
    for (const auto& c : components_) {
      acc += c.weight;
      cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
  }

  double draw(Xoshiro256pp& rng) const {
    const double u = rng.next_unit();
    std::size_t idx = 0;
    while (idx + 1 < cumulative_.size() && u >= cumulative_[idx]) ++idx;
    return sample(components_[idx].params, rng);
  }

 private:
  std::vector<WeightedComponent> components_;
  std::vector<double> cumulative_;
};

} // namespace

MixtureLogDensity::MixtureLogDensity(const Mixture& m) {
  forms_.reserve(m.size());
  for (const auto& c : m.components()) {
    forms_.push_back(log_weighted_density_form(c.weight, c.params));
    if (forms_.back().clog != 0.0) any_log_ = true;
  }
}

double MixtureLogDensity::operator()(double x) const {
  const double lx = any_log_ ? std::log(x) : 0.0;
  double vals_stack[32];
  std::vector<double> vals_heap;
  double* vals = vals_stack;
  if (forms_.size() > 32) {
    vals_heap.resize(forms_.size());
    vals = vals_heap.data();
  }
  double best = -kInf;
  for (std::size_t i = 0; i < forms_.size(); ++i) {
    const LogLinForm& f = forms_[i];
    double v = f.c0 + f.c1 * x + f.c2 * x * x;
    if (f.clog != 0.0) v += f.clog * lx;
    vals[i] = v;
    if (v > best) best = v;
  }
  if (best == -kInf) return -kInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < forms_.size(); ++i) sum += std::exp(vals[i] - best);
  return best + std::log(sum);
}

std::vector<double> sample_mixture(const Mixture& m, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_mixture: n must be positive");
  MixtureSampler sampler(m);
  Xoshiro256pp rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = sampler.draw(rng);
  return xs;
}

McEstimate mc_kl(const Mixture& m, const Mixture& m_prime, std::size_t s, std::uint64_t seed) {
  if (s == 0) throw std::invalid_argument("mc_kl: sample size must be positive");
  const MixtureLogDensity log_m(m);
  const MixtureLogDensity log_mp(m_prime);
  MixtureSampler sampler(m);
  Xoshiro256pp rng(seed);

  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const double x = sampler.draw(rng);
    const double d = log_m(x) - log_mp(x);
    if (!std::isfinite(d)) {
      std::ostringstream os;
      os << "mc_kl: non-finite log ratio at sampled point x = " << x;
      throw std::runtime_error(os.str());
    }
    const double delta = d - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (d - mean);
  }
  const double se =
      s >= 2 ? std::sqrt(m2 / static_cast<double>(s - 1) / static_cast<double>(s)) : 0.0;
  return {mean, se, s, 1, seed};
}

McEstimate mc_entropy(const Mixture& m, std::size_t s, std::uint64_t seed) {
  if (s == 0) throw std::invalid_argument("mc_entropy: sample size must be positive");
  const MixtureLogDensity log_m(m);
  MixtureSampler sampler(m);
  Xoshiro256pp rng(seed);

  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const double x = sampler.draw(rng);
    const double d = -log_m(x);
    const double delta = d - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (d - mean);
  }
  const double se =
      s >= 2 ? std::sqrt(m2 / static_cast<double>(s - 1) / static_cast<double>(s)) : 0.0;
  return {mean, se, s, 1, seed};
}

McEstimate repetition_stats(const std::function<double(std::uint64_t)>& estimator,
                            std::uint32_t reps, std::uint64_t base_seed,
                            std::uint64_t sample_size_meta, int threads) {
  if (reps < 2) throw std::invalid_argument("repetition_stats: need reps >= 2");
  std::vector<double> values(reps);

  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(reps)));
  if (nthreads == 1) {
    for (std::uint32_t r = 0; r < reps; ++r) values[r] = estimator(derive_seed(base_seed, r));
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint32_t r = static_cast<std::uint32_t>(t); r < reps;
             r += static_cast<std::uint32_t>(nthreads)) {
          values[r] = estimator(derive_seed(base_seed, r));
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Two-pass reduction in rep order: identical result for any thread count.
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(reps);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
  return {mean, sd, sample_size_meta, reps, base_seed};
}

} // namespace mixbound
