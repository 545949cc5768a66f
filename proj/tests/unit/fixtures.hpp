#ifndef MIXBOUND_TESTS_FIXTURES_HPP
#define MIXBOUND_TESTS_FIXTURES_HPP

#include <cmath>
#include <vector>

#include "mixbound/families.hpp"
#include "mixbound/rng.hpp"

namespace fixtures {

using mixbound::ComponentParams;
using mixbound::ExponentialParams;
using mixbound::FamilyTag;
using mixbound::GammaParams;
using mixbound::GaussianParams;
using mixbound::Mixture;
using mixbound::RayleighParams;
using mixbound::WeightedComponent;

// The four experiment pairs (rates/scales/means as published).
inline Mixture emm1() {
  return Mixture::make(FamilyTag::Exponential, {{1.0 / 3, ExponentialParams{0.1}},
                                                {1.0 / 3, ExponentialParams{0.5}},
                                                {1.0 / 3, ExponentialParams{1.0}}});
}
inline Mixture emm2() {
  return Mixture::make(FamilyTag::Exponential, {{0.2, ExponentialParams{2.0}},
                                                {0.4, ExponentialParams{10.0}},
                                                {0.4, ExponentialParams{20.0}}});
}
inline Mixture rmm1() {
  return Mixture::make(FamilyTag::Rayleigh, {{1.0 / 3, RayleighParams{0.5}},
                                             {1.0 / 3, RayleighParams{2.0}},
                                             {1.0 / 3, RayleighParams{10.0}}});
}
inline Mixture rmm2() {
  return Mixture::make(FamilyTag::Rayleigh, {{0.25, RayleighParams{5.0}},
                                             {0.25, RayleighParams{60.0}},
                                             {0.5, RayleighParams{100.0}}});
}
inline Mixture gmm1() {
  return Mixture::make(FamilyTag::Gaussian, {{0.05, GaussianParams{-5.0, 1.0}},
                                             {0.1, GaussianParams{-2.0, 0.5}},
                                             {0.2, GaussianParams{5.0, 0.3}},
                                             {0.2, GaussianParams{10.0, 0.5}},
                                             {0.05, GaussianParams{15.0, 0.4}},
                                             {0.3, GaussianParams{25.0, 0.5}},
                                             {0.1, GaussianParams{30.0, 2.0}}});
}
inline Mixture gmm2() {
  return Mixture::make(FamilyTag::Gaussian, {{0.1, GaussianParams{-16.0, 0.5}},
                                             {0.1, GaussianParams{-12.0, 0.2}},
                                             {0.1, GaussianParams{-8.0, 0.5}},
                                             {0.1, GaussianParams{-4.0, 0.2}},
                                             {0.2, GaussianParams{0.0, 0.5}},
                                             {0.1, GaussianParams{4.0, 0.2}},
                                             {0.1, GaussianParams{8.0, 0.5}},
                                             {0.1, GaussianParams{12.0, 0.2}},
                                             {0.1, GaussianParams{16.0, 0.5}}});
}
inline Mixture gamm1() {
  return Mixture::make(FamilyTag::Gamma, {{1.0 / 3, GammaParams{2.0, 0.5}},
                                          {1.0 / 3, GammaParams{2.0, 2.0}},
                                          {1.0 / 3, GammaParams{2.0, 4.0}}});
}
inline Mixture gamm2() {
  return Mixture::make(FamilyTag::Gamma, {{1.0 / 3, GammaParams{4.0, 5.0}},
                                          {1.0 / 3, GammaParams{4.0, 8.0}},
                                          {1.0 / 3, GammaParams{4.0, 10.0}}});
}

inline Mixture single(const ComponentParams& p) {
  return Mixture::make(mixbound::family_of(p), {{1.0, p}});
}

// Random component parameters in well-conditioned ranges.
inline ComponentParams random_params(FamilyTag tag, mixbound::Xoshiro256pp& rng) {
  auto unit = [&rng] { return rng.next_unit_open(); };
  switch (tag) {
    case FamilyTag::Exponential: return ExponentialParams{0.1 + 5.0 * unit()};
    case FamilyTag::Rayleigh: return RayleighParams{0.2 + 5.0 * unit()};
    case FamilyTag::Gaussian: return GaussianParams{-5.0 + 10.0 * unit(), 0.2 + 3.0 * unit()};
    case FamilyTag::Gamma: return GammaParams{0.8 + 4.0 * unit(), 0.2 + 4.0 * unit()};
  }
  return ExponentialParams{1.0};
}

inline Mixture random_mixture(FamilyTag tag, std::size_t k, mixbound::Xoshiro256pp& rng) {
  std::vector<WeightedComponent> comps;
  std::vector<double> ws(k);
  double sum = 0.0;
  for (auto& w : ws) {
    w = 0.05 + rng.next_unit_open();
    sum += w;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double w = ws[i] / sum;
    if (i + 1 == k) w = 1.0 - acc; // exact unit sum
    acc += w;
    comps.push_back({w, random_params(tag, rng)});
  }
  return Mixture::make(tag, std::move(comps));
}

inline const std::vector<FamilyTag>& all_families() {
  static const std::vector<FamilyTag> fams = {FamilyTag::Exponential, FamilyTag::Rayleigh,
                                              FamilyTag::Gaussian, FamilyTag::Gamma};
  return fams;
}

} // namespace fixtures

#endif
