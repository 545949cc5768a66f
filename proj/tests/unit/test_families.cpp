#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "mixbound/families.hpp"
#include "mixbound/integrals.hpp"

using namespace mixbound;
using fixtures::all_families;
using fixtures::random_params;

TEST_CASE("log_density reference points") {
  CHECK(log_density(GaussianParams{0, 1}, 0.0) ==
        doctest::Approx(-0.91893853320467274178).epsilon(1e-12));
  CHECK(log_density(ExponentialParams{1.0}, 0.0) == doctest::Approx(0.0));
  CHECK(log_density(RayleighParams{1.0}, 1.0) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("log_density domain errors") {
  CHECK_THROWS_AS(log_density(ExponentialParams{1.0}, -0.1), std::domain_error);
  CHECK_THROWS_AS(log_density(GammaParams{2.0, 1.0}, 0.0), std::domain_error);
  CHECK(std::isinf(log_density(RayleighParams{1.0}, 0.0)));
}

TEST_CASE("cdf reference points and clamping") {
  CHECK(cdf(ExponentialParams{1.0}, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cdf(GaussianParams{0, 1}, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cdf(GammaParams{2.0, 1.0}, 2.0) ==
        doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(cdf(ExponentialParams{2.0}, -1.0) == 0.0);
  CHECK(cdf(RayleighParams{1.5}, std::numeric_limits<double>::infinity()) == 1.0);
}

TEST_CASE("cdf derivative equals density") {
  Xoshiro256pp rng(101);
  for (FamilyTag tag : all_families()) {
    for (int i = 0; i < 250; ++i) {
      const ComponentParams p = random_params(tag, rng);
      Xoshiro256pp draw_rng(rng.next_u64());
      const double x = sample(p, draw_rng);
      const double h = 1e-5 * (1.0 + std::fabs(x));
      if (support_of(tag).lo == 0.0 && x - h <= 0.0) continue;
      const double deriv = (cdf(p, x + h) - cdf(p, x - h)) / (2.0 * h);
      const double dens = density(p, x);
      if (dens < 1e-12) continue; // relative comparison meaningless in far tails
      CHECK(deriv == doctest::Approx(dens).epsilon(1e-6));
    }
  }
}

TEST_CASE("natural form reconstructs the density") {
  Xoshiro256pp rng(202);
  for (FamilyTag tag : all_families()) {
    for (int i = 0; i < 25; ++i) {
      const ComponentParams p = random_params(tag, rng);
      const NaturalForm n = to_natural(p);
      for (int j = 0; j < 100; ++j) {
        Xoshiro256pp draw_rng(rng.next_u64());
        const double x = sample(p, draw_rng);
        const double direct = std::exp(log_density(p, x));
        const double recon = std::exp(n.reconstructed_log_density(x));
        CHECK(std::fabs(direct - recon) <= 1e-12);
      }
    }
  }
}

TEST_CASE("natural form reference examples") {
  const NaturalForm ne = to_natural(ExponentialParams{1.0});
  CHECK(ne.theta[0] == doctest::Approx(-1.0));
  CHECK(ne.reconstructed_log_density(2.0) == doctest::Approx(-2.0).epsilon(1e-14));

  const NaturalForm ng = to_natural(GaussianParams{0, 1});
  CHECK(ng.theta[0] == doctest::Approx(0.0));
  CHECK(ng.theta[1] == doctest::Approx(-0.5));
  CHECK(ng.reconstructed_log_density(0.0) ==
        doctest::Approx(-0.91893853320467274178).epsilon(1e-12));

  const NaturalForm nr = to_natural(RayleighParams{1.0});
  CHECK(nr.theta[0] == doctest::Approx(-0.5));
  CHECK(nr.reconstructed_log_density(1.0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("Rayleigh log-normalizer agrees with quadrature of the normalizer") {
  // F(theta) = -log(-2 theta) should satisfy exp(F) = int exp(theta x^2 + log x) dx.
  for (double sigma : {0.5, 1.0, 2.5}) {
    const NaturalForm n = to_natural(RayleighParams{sigma});
    const double theta = n.theta[0];
    const auto z = integrate_interval(
        [theta](double x) { return x <= 0.0 ? 0.0 : std::exp(theta * x * x) * x; }, 0.0,
        std::numeric_limits<double>::infinity(), 1e-12);
    CHECK(std::log(z.value) == doctest::Approx(n.log_normalizer()).epsilon(1e-10));
  }
}

TEST_CASE("from_natural round-trips") {
  Xoshiro256pp rng(303);
  for (FamilyTag tag : all_families()) {
    const ComponentParams p = random_params(tag, rng);
    const ComponentParams q = from_natural(to_natural(p));
    Xoshiro256pp draw_rng(17);
    const double x = sample(p, draw_rng);
    CHECK(log_density(q, x) == doctest::Approx(log_density(p, x)).epsilon(1e-12));
  }
}

TEST_CASE("sampler is deterministic given the seed") {
  Xoshiro256pp a(42), b(42);
  for (int i = 0; i < 32; ++i) {
    CHECK(sample(ExponentialParams{1.0}, a) == sample(ExponentialParams{1.0}, b));
  }
}

TEST_CASE("sample means match analytic moments (CLT tolerance)") {
  const std::size_t n = 1'000'000;
  auto mean_of = [n](const ComponentParams& p, std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += sample(p, rng);
    return acc / static_cast<double>(n);
  };
  CHECK(std::fabs(mean_of(GaussianParams{0, 1}, 1)) <= 0.004);
  const double ray_mean = 2.0 * std::sqrt(M_PI / 2.0);
  CHECK(std::fabs(mean_of(RayleighParams{2.0}, 2) - ray_mean) <= 0.005);
  CHECK(std::fabs(mean_of(GammaParams{2.0, 1.0}, 3) - 2.0) <= 3.0 * std::sqrt(2.0) / 1000.0);
  CHECK(std::fabs(mean_of(ExponentialParams{0.5}, 4) - 2.0) <= 3.0 * 2.0 / 1000.0);
}

TEST_CASE("empirical CDF passes Kolmogorov-Smirnov at the 0.001 level") {
  const std::size_t n = 100'000;
  const double critical = 1.9495 / std::sqrt(static_cast<double>(n));
  std::uint64_t seed = 900;
  for (FamilyTag tag : all_families()) {
    Xoshiro256pp prng(seed++);
    const ComponentParams p = random_params(tag, prng);
    Xoshiro256pp rng(seed++);
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample(p, rng);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = cdf(p, xs[i]);
      d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
      d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    INFO("family ", to_string(tag), " KS statistic ", d);
    CHECK(d < critical);
  }
}

TEST_CASE("gamma sampler handles shape < 1 via boosting") {
  const std::size_t n = 200'000;
  const GammaParams p{0.5, 2.0};
  Xoshiro256pp rng(77);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += sample(p, rng);
  const double mean = acc / static_cast<double>(n);
  const double sd = std::sqrt(component_variance(p) / static_cast<double>(n));
  CHECK(std::fabs(mean - component_mean(p)) <= 4.0 * sd);
}

TEST_CASE("mixture validation") {
  CHECK_THROWS_AS(Mixture::make(FamilyTag::Gaussian, {}), std::invalid_argument);
  CHECK_THROWS_AS(Mixture::make(FamilyTag::Gaussian, {{0.5, GaussianParams{0, 1}},
                                                      {0.6, GaussianParams{1, 1}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Mixture::make(FamilyTag::Gaussian, {{0.5, GaussianParams{0, 1}},
                                                      {0.5, ExponentialParams{1.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Mixture::make(FamilyTag::Gaussian, {{1.0, GaussianParams{0, -1}}}),
                  std::invalid_argument);
  CHECK_NOTHROW(Mixture::make(FamilyTag::Gaussian, {{1.0, GaussianParams{0, 1}}}));
}

TEST_CASE("canonicalization merges duplicate parameters") {
  const Mixture m = Mixture::make(FamilyTag::Gaussian, {{0.25, GaussianParams{0, 1}},
                                                        {0.25, GaussianParams{1, 1}},
                                                        {0.5, GaussianParams{0, 1}}});
  const Mixture c = m.canonicalized();
  REQUIRE(c.size() == 2);
  CHECK(c.components()[0].weight == doctest::Approx(0.75));
  CHECK(c.components()[1].weight == doctest::Approx(0.25));
  CHECK(m.log_density(0.3) == doctest::Approx(c.log_density(0.3)).epsilon(1e-14));
}

TEST_CASE("mixture moments") {
  CHECK(mixture_mean(fixtures::emm1()) == doctest::Approx(13.0 / 3.0).epsilon(1e-12));
  const Mixture two = Mixture::make(
      FamilyTag::Gaussian, {{0.5, GaussianParams{-1, 0.1}}, {0.5, GaussianParams{1, 0.1}}});
  CHECK(mixture_variance(two) == doctest::Approx(1.01).epsilon(1e-12));
}
