#ifndef MIXBOUND_ENVELOPE_HPP
#define MIXBOUND_ENVELOPE_HPP

#include <span>
#include <vector>

#include "mixbound/families.hpp"

namespace mixbound {

enum class EnvelopeMode { Upper, Lower };

/// Partition of the support into elementary intervals, each dominated
/// (Upper) or minimized (Lower) by one weighted component.
struct EnvelopePartition {
  std::vector<double> breakpoints; // breakpoints.front() == support.lo, .back() == support.hi
  std::vector<int> piece_index;    // piece_index[r] rules (breakpoints[r], breakpoints[r+1])
  EnvelopeMode mode = EnvelopeMode::Upper;
  SupportInterval support{};

  std::size_t size() const { return piece_index.size(); }
  /// Index r of the interval containing x.
  std::size_t piece_at(double x) const;
};

/// Solutions of w1 p1(x) = w2 p2(x) strictly inside the support, sorted.
/// 0, 1 or 2 roots; coincident weighted components yield none. Each root is
/// polished so the weighted log-densities agree within 1e-9.
std::vector<double> pairwise_intersections(const WeightedComponent& c1,
                                           const WeightedComponent& c2,
                                           const SupportInterval& support);

/// Roots of f1(x) == f2(x) strictly inside (lo, hi), sorted. Same machinery
/// as pairwise_intersections; used to split slabs where a max of two scaled
/// envelope branches changes side.
std::vector<double> log_linform_crossings(const LogLinForm& f1, const LogLinForm& f2,
                                          double lo, double hi);

/// All O(k^2) pairwise roots, sorted and deduplicated, then each candidate
/// interval classified by evaluating every weighted log-density at an
/// interior probe point. Adjacent intervals with the same winner are merged.
EnvelopePartition build_partition(std::span<const WeightedComponent> components,
                                  const SupportInterval& support, EnvelopeMode mode);

/// Elementary interval of an overlay, annotated with each input partition's
/// piece index (in input order).
struct OverlayInterval {
  double lo;
  double hi;
  std::vector<int> piece;
};

std::vector<OverlayInterval> overlay(std::span<const EnvelopePartition* const> partitions);
std::vector<OverlayInterval> overlay(const EnvelopePartition& p1, const EnvelopePartition& p2);

} // namespace mixbound

#endif
