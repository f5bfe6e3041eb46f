#pragma once

// Brute-force reference implementations used only by tests. These stay
// deliberately independent of the library's enumeration and pruning logic:
// plain scans over full power sets, no ordering tricks, no memoization.

#include <bit>
#include <optional>
#include <utility>
#include <vector>

#include "pbcore/pbcore.hpp"

namespace oracle {

using namespace pbcore;

inline Rat subset_cost(const Election& e, Mask subset) {
  Rat total(0);
  for (std::size_t i = 0; i < e.project_count(); ++i)
    if (subset & bit(i)) total += e.project(i).cost;
  return total;
}

inline std::vector<Mask> feasible_sets(const Election& e) {
  std::vector<Mask> out;
  const Mask count = Mask{1} << e.project_count();
  for (Mask s = 0; s < count; ++s)
    if (subset_cost(e, s) <= e.budget()) out.push_back(s);
  return out;
}

inline bool is_exhaustive(const Election& e, Mask subset) {
  Rat total = subset_cost(e, subset);
  if (total > e.budget()) return false;
  for (std::size_t i = 0; i < e.project_count(); ++i)
    if (!(subset & bit(i)) && total + e.project(i).cost <= e.budget()) return false;
  return true;
}

inline std::vector<Mask> exhaustive_sets(const Election& e) {
  std::vector<Mask> out;
  for (Mask s : feasible_sets(e))
    if (is_exhaustive(e, s)) out.push_back(s);
  return out;
}

// First blocking pair in (coalition, deviation) ascending-bitmask order,
// scanning all nonempty coalitions against all nonempty project subsets.
inline std::optional<std::pair<VoterMask, Mask>> find_blocking(SatKind kind, const Election& e,
                                                               Mask standing) {
  const std::size_t n = e.voter_count();
  const VoterMask coalitions = VoterMask{1} << n;
  const Mask deviations = Mask{1} << e.project_count();
  for (VoterMask N = 1; N < coalitions; ++N) {
    const unsigned long size = static_cast<unsigned long>(std::popcount(N));
    for (Mask P = 1; P < deviations; ++P) {
      if (!(e.budget() * size >= subset_cost(e, P) * static_cast<unsigned long>(n))) continue;
      bool all_improve = true;
      for (std::size_t v = 0; v < n && all_improve; ++v) {
        if (!(N & (VoterMask{1} << v))) continue;
        SatValue before = sat_set(kind, e, standing & e.approval_mask(v));
        SatValue after = sat_set(kind, e, P & e.approval_mask(v));
        all_improve = sat_compare(after, before) == ComparisonOutcome::Greater;
      }
      if (all_improve) return std::make_pair(N, P);
    }
  }
  return std::nullopt;
}

struct CoreResult {
  std::optional<Mask> in_core;
  std::vector<std::pair<Mask, std::pair<VoterMask, Mask>>> witnesses;
};

// All feasible allocations in ascending order; stops at the first one with
// no blocking pair.
inline CoreResult core_check(SatKind kind, const Election& e) {
  CoreResult result;
  for (Mask s : feasible_sets(e)) {
    auto blocking = find_blocking(kind, e, s);
    if (!blocking) {
      result.in_core = s;
      return result;
    }
    result.witnesses.push_back({s, *blocking});
  }
  return result;
}

// Exhaustive permutation matching: is one election a voter+project relabeling
// of the other?
inline bool isomorphic(const Election& a, const Election& b) {
  const std::size_t n = a.voter_count(), m = a.project_count();
  if (n != b.voter_count() || m != b.project_count()) return false;
  if (!(a.budget() == b.budget())) return false;

  std::vector<std::size_t> vperm(n), pperm(m);
  for (std::size_t i = 0; i < n; ++i) vperm[i] = i;
  do {
    for (std::size_t i = 0; i < m; ++i) pperm[i] = i;
    do {
      bool match = true;
      for (std::size_t i = 0; i < m && match; ++i)
        match = a.project(i).cost == b.project(pperm[i]).cost;
      for (std::size_t v = 0; v < n && match; ++v)
        for (std::size_t i = 0; i < m && match; ++i) {
          bool in_a = (a.approval_mask(v) & bit(i)) != 0;
          bool in_b = (b.approval_mask(vperm[v]) & bit(pperm[i])) != 0;
          match = in_a == in_b;
        }
      if (match) return true;
    } while (std::next_permutation(pperm.begin(), pperm.end()));
  } while (std::next_permutation(vperm.begin(), vperm.end()));
  return false;
}

}  // namespace oracle
