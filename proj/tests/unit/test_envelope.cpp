#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "mixbound/envelope.hpp"

using namespace mixbound;
using fixtures::all_families;
using fixtures::random_mixture;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double weighted_log_density(const WeightedComponent& c, double x) {
  return std::log(c.weight) + log_density(c.params, x);
}

// Value-based partition check: the component owning x's interval must attain
// the envelope there (within tol), for every probe point.
void check_partition(const Mixture& m, const EnvelopePartition& part,
                     const std::vector<double>& probes, double tol = 1e-9) {
  for (double x : probes) {
    if (!part.support.contains(x) || x == part.support.lo) continue;
    const int idx = part.piece_index[part.piece_at(x)];
    const double own = weighted_log_density(m.components()[static_cast<std::size_t>(idx)], x);
    double best = -kInf;
    for (const auto& c : m.components()) {
      const double v = weighted_log_density(c, x);
      if (part.mode == EnvelopeMode::Upper ? v > best : -v > -best) best = v;
      if (part.mode == EnvelopeMode::Lower && best == -kInf) best = v;
    }
    if (part.mode == EnvelopeMode::Lower) {
      best = kInf;
      for (const auto& c : m.components()) best = std::min(best, weighted_log_density(c, x));
      CHECK(own <= best + tol);
    } else {
      CHECK(own >= best - tol);
    }
  }
}

std::vector<double> probe_points(const Mixture& m, std::size_t n, std::uint64_t seed) {
  // Inverse-CDF-distributed probes (mixture samples) plus uniform fill
  // between the extreme samples.
  Xoshiro256pp rng(seed);
  std::vector<double> probes;
  probes.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0;
    double u = rng.next_unit();
    for (const auto& c : m.components()) {
      if (u < c.weight) break;
      u -= c.weight;
      ++idx;
    }
    idx = std::min(idx, m.size() - 1);
    probes.push_back(sample(m.components()[idx].params, rng));
  }
  const auto [mn, mx] = std::minmax_element(probes.begin(), probes.end());
  const double lo = *mn, hi = *mx;
  for (std::size_t i = 0; i < n; ++i) {
    probes.push_back(lo + (hi - lo) * rng.next_unit_open());
  }
  return probes;
}

} // namespace

TEST_CASE("pairwise intersections: exponential closed form") {
  const WeightedComponent c1{0.5, ExponentialParams{1.0}};
  const WeightedComponent c2{0.5, ExponentialParams{2.0}};
  const auto roots = pairwise_intersections(c1, c2, support_of(FamilyTag::Exponential));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("pairwise intersections: symmetric gaussians cross at zero") {
  const WeightedComponent c1{0.5, GaussianParams{-1, 1}};
  const WeightedComponent c2{0.5, GaussianParams{1, 1}};
  const auto roots = pairwise_intersections(c1, c2, support_of(FamilyTag::Gaussian));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pairwise intersections: rayleigh bisection-oracle value") {
  const WeightedComponent c1{0.5, RayleighParams{1.0}};
  const WeightedComponent c2{0.5, RayleighParams{2.0}};
  const auto roots = pairwise_intersections(c1, c2, support_of(FamilyTag::Rayleigh));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(1.9227025154678440228).epsilon(1e-10));
}

TEST_CASE("pairwise intersections: identical components yield none") {
  const WeightedComponent c{0.4, GammaParams{2.0, 1.5}};
  CHECK(pairwise_intersections(c, c, support_of(FamilyTag::Gamma)).empty());
}

TEST_CASE("pairwise intersections satisfy the 1e-9 residual contract") {
  Xoshiro256pp rng(515);
  for (FamilyTag tag : all_families()) {
    for (int i = 0; i < 100; ++i) {
      const WeightedComponent c1{0.2 + 0.6 * rng.next_unit_open(),
                                 fixtures::random_params(tag, rng)};
      const WeightedComponent c2{0.2 + 0.6 * rng.next_unit_open(),
                                 fixtures::random_params(tag, rng)};
      for (double x : pairwise_intersections(c1, c2, support_of(tag))) {
        const double diff = weighted_log_density(c1, x) - weighted_log_density(c2, x);
        CHECK(std::fabs(diff) <= 1e-9);
      }
    }
  }
}

TEST_CASE("gamma cross-shape intersections via bracketing") {
  const WeightedComponent c1{0.5, GammaParams{2.0, 1.0}};
  const WeightedComponent c2{0.5, GammaParams{4.0, 0.5}};
  const auto roots = pairwise_intersections(c1, c2, support_of(FamilyTag::Gamma));
  CHECK(!roots.empty());
  for (double x : roots) {
    CHECK(std::fabs(weighted_log_density(c1, x) - weighted_log_density(c2, x)) <= 1e-9);
  }
}

TEST_CASE("build_partition: single component") {
  const auto m = fixtures::single(GaussianParams{0, 1});
  const auto part = build_partition(m.components(), m.support(), EnvelopeMode::Upper);
  REQUIRE(part.size() == 1);
  CHECK(part.piece_index[0] == 0);
  CHECK(part.breakpoints.front() == -kInf);
  CHECK(part.breakpoints.back() == kInf);
}

TEST_CASE("build_partition: two symmetric gaussians") {
  const Mixture m = Mixture::make(
      FamilyTag::Gaussian, {{0.5, GaussianParams{-1, 1}}, {0.5, GaussianParams{1, 1}}});
  const auto part = build_partition(m.components(), m.support(), EnvelopeMode::Upper);
  REQUIRE(part.size() == 2);
  CHECK(part.breakpoints[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(part.piece_index[0] == 0);
  CHECK(part.piece_index[1] == 1);
}

TEST_CASE("build_partition: EMM1 validated by dense sampling") {
  const Mixture m = fixtures::emm1();
  const auto part = build_partition(m.components(), m.support(), EnvelopeMode::Upper);
  check_partition(m, part, probe_points(m, 5000, 99));
}

TEST_CASE("partition correctness on random mixtures, both modes") {
  Xoshiro256pp rng(616);
  for (FamilyTag tag : all_families()) {
    for (std::size_t k : {1u, 2u, 4u, 6u}) {
      const Mixture m = random_mixture(tag, k, rng).canonicalized();
      for (EnvelopeMode mode : {EnvelopeMode::Upper, EnvelopeMode::Lower}) {
        const auto part = build_partition(m.components(), m.support(), mode);
        REQUIRE(part.breakpoints.size() == part.piece_index.size() + 1);
        CHECK(std::is_sorted(part.breakpoints.begin(), part.breakpoints.end()));
        for (std::size_t r = 0; r + 1 < part.size(); ++r) {
          CHECK(part.piece_index[r] != part.piece_index[r + 1]);
        }
        check_partition(m, part, probe_points(m, 1500, 1234 + k));
      }
    }
  }
}

TEST_CASE("gaussian upper envelope has at most 2k-1 pieces") {
  Xoshiro256pp rng(717);
  for (int i = 0; i < 40; ++i) {
    const std::size_t k = 2 + static_cast<std::size_t>(rng.next_u64() % 7);
    const Mixture m = random_mixture(FamilyTag::Gaussian, k, rng).canonicalized();
    const auto part = build_partition(m.components(), m.support(), EnvelopeMode::Upper);
    CHECK(part.size() <= 2 * m.size() - 1);
  }
}

TEST_CASE("gaussian envelope is affine-equivariant under mean shifts") {
  Xoshiro256pp rng(818);
  const Mixture m = random_mixture(FamilyTag::Gaussian, 5, rng).canonicalized();
  const double shift = 3.25;
  std::vector<WeightedComponent> shifted;
  for (const auto& c : m.components()) {
    const auto& g = std::get<GaussianParams>(c.params);
    shifted.push_back({c.weight, GaussianParams{g.mean + shift, g.stddev}});
  }
  const Mixture ms = Mixture::make(FamilyTag::Gaussian, std::move(shifted));
  const auto p0 = build_partition(m.components(), m.support(), EnvelopeMode::Upper);
  const auto p1 = build_partition(ms.components(), ms.support(), EnvelopeMode::Upper);
  REQUIRE(p0.size() == p1.size());
  CHECK(p0.piece_index == p1.piece_index);
  for (std::size_t i = 1; i + 1 < p0.breakpoints.size(); ++i) {
    CHECK(p1.breakpoints[i] == doctest::Approx(p0.breakpoints[i] + shift).epsilon(1e-9));
  }
}

TEST_CASE("overlay: идempotent on a single partition pair") {
  const Mixture m = fixtures::gmm1();
  const auto part = build_partition(m.components(), m.support(), EnvelopeMode::Upper);
  const auto cells = overlay(part, part);
  REQUIRE(cells.size() == part.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].lo == part.breakpoints[i]);
    CHECK(cells[i].piece[0] == cells[i].piece[1]);
  }
}

TEST_CASE("overlay: breakpoint sets take the sorted union") {
  EnvelopePartition p1{{-kInf, 0.0, kInf}, {0, 1}, EnvelopeMode::Upper,
                       support_of(FamilyTag::Gaussian)};
  EnvelopePartition p2{{-kInf, 1.0, kInf}, {1, 0}, EnvelopeMode::Upper,
                       support_of(FamilyTag::Gaussian)};
  const auto cells = overlay(p1, p2);
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].hi == 0.0);
  CHECK(cells[1].hi == 1.0);
  CHECK(cells[1].piece[0] == 1);
  CHECK(cells[1].piece[1] == 1);
}

TEST_CASE("overlay of the GMM pair partitions") {
  const Mixture m1 = fixtures::gmm1();
  const Mixture m2 = fixtures::gmm2();
  const auto pa = build_partition(m1.components(), m1.support(), EnvelopeMode::Upper);
  const auto pb = build_partition(m2.components(), m2.support(), EnvelopeMode::Upper);
  const auto cells = overlay(pa, pb);
  CHECK(cells.size() <= pa.size() + pb.size() + 1);
  for (const auto& cell : cells) {
    if (!std::isfinite(cell.lo) || !std::isfinite(cell.hi)) continue;
    const double mid = 0.5 * (cell.lo + cell.hi);
    CHECK(cell.piece[0] == pa.piece_index[pa.piece_at(mid)]);
    CHECK(cell.piece[1] == pb.piece_index[pb.piece_at(mid)]);
  }
}
