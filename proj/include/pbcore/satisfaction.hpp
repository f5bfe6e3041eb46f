#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbcore/election.hpp"
#include "pbcore/errors.hpp"
#include "pbcore/interval.hpp"
#include "pbcore/rat.hpp"

namespace pbcore {

enum class SatKind {
  Cost,
  Cardinality,
  ChamberlinCourant,
  Share,
  SumLog,
  SumSqrt,
  GlobalLog,
  GlobalSqrt,
};

inline constexpr SatKind kAllSatKinds[] = {
    SatKind::Cost,   SatKind::Cardinality, SatKind::ChamberlinCourant, SatKind::Share,
    SatKind::SumLog, SatKind::SumSqrt,     SatKind::GlobalLog,         SatKind::GlobalSqrt,
};

inline const char* sat_kind_name(SatKind k) {
  switch (k) {
    case SatKind::Cost: return "cost";
    case SatKind::Cardinality: return "card";
    case SatKind::ChamberlinCourant: return "cc";
    case SatKind::Share: return "share";
    case SatKind::SumLog: return "sumlog";
    case SatKind::SumSqrt: return "sumsqrt";
    case SatKind::GlobalLog: return "log";
    case SatKind::GlobalSqrt: return "sqrt";
  }
  return "?";
}

// Accepted names (case-insensitive): cost, card, cc, share, sumlog, sumsqrt,
// log, sqrt.
inline std::optional<SatKind> parse_sat_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (SatKind k : kAllSatKinds)
    if (s == sat_kind_name(k)) return k;
  return std::nullopt;
}

// A satisfaction level: either an exact rational, or an irrational value held
// as the multiset of cost terms that defines it. Irrational values are
// compared through adaptive-precision interval enclosures; the terms stay
// around so a comparison can always re-evaluate at higher precision.
class SatValue {
 public:
  static SatValue exact(Rat v) {
    SatValue s;
    s.exact_ = true;
    s.value_ = std::move(v);
    return s;
  }
  static SatValue irrational(IrShape shape, std::vector<Rat> terms) {
    SatValue s;
    s.exact_ = false;
    s.shape_ = shape;
    std::sort(terms.begin(), terms.end());
    s.terms_ = std::move(terms);
    return s;
  }

  bool is_exact() const { return exact_; }
  const Rat& exact_value() const { return value_; }
  IrShape shape() const { return shape_; }
  const std::vector<Rat>& terms() const { return terms_; }

  RatInterval enclosure(unsigned bits) const {
    if (exact_) return {value_, value_, bits};
    return enclose(shape_, terms_, bits);
  }

  // Same defining expression: identical shape and identical cost multiset.
  bool same_expression(const SatValue& o) const {
    if (exact_ || o.exact_) return false;
    return shape_ == o.shape_ && terms_ == o.terms_;
  }

 private:
  SatValue() = default;

  bool exact_ = true;
  Rat value_{0};
  IrShape shape_ = IrShape::SumLog1p;
  std::vector<Rat> terms_;
};

// Satisfaction of a whole project set. Every kind maps the empty set to
// exact 0. Share requires an approver for each evaluated project.
inline SatValue sat_set(SatKind kind, const Election& e, Mask subset) {
  e.require_subset(subset);
  if (subset == 0) return SatValue::exact(Rat(0));
  switch (kind) {
    case SatKind::Cost:
      return SatValue::exact(e.total_cost(subset));
    case SatKind::Cardinality:
      return SatValue::exact(Rat(static_cast<unsigned long>(std::popcount(subset))));
    case SatKind::ChamberlinCourant:
      return SatValue::exact(Rat(1));
    case SatKind::Share: {
      Rat sum(0);
      for (std::size_t i = 0; i < e.project_count(); ++i) {
        if (!(subset & bit(i))) continue;
        std::size_t approvers = e.approver_count(i);
        if (approvers == 0) throw ShareOfUnapprovedProject(e.project(i).id);
        sum += e.project(i).cost / static_cast<unsigned long>(approvers);
      }
      return SatValue::exact(sum);
    }
    case SatKind::SumLog:
    case SatKind::SumSqrt: {
      std::vector<Rat> costs;
      for (std::size_t i = 0; i < e.project_count(); ++i)
        if (subset & bit(i)) costs.push_back(e.project(i).cost);
      return SatValue::irrational(
          kind == SatKind::SumLog ? IrShape::SumLog1p : IrShape::SumSqrt, std::move(costs));
    }
    case SatKind::GlobalLog:
      return SatValue::irrational(IrShape::Log1pTotal, {e.total_cost(subset)});
    case SatKind::GlobalSqrt:
      return SatValue::irrational(IrShape::SqrtTotal, {e.total_cost(subset)});
  }
  throw InvalidParameters("unknown satisfaction kind");
}

inline SatValue sat_set(SatKind kind, const Election& e, std::span<const std::string> ids) {
  return sat_set(kind, e, e.mask_of_ids(ids));
}

// A voter's satisfaction with an allocation: the set satisfaction of the
// approved part. Share keeps using the global approver counts even when a
// deviating coalition is evaluated.
inline SatValue sat_voter(SatKind kind, const Election& e, std::size_t voter, Mask allocation) {
  if (voter >= e.voter_count()) throw UnknownVoter("#" + std::to_string(voter));
  e.require_subset(allocation);
  return sat_set(kind, e, allocation & e.approval_mask(voter));
}

inline SatValue sat_voter(SatKind kind, const Election& e, std::string_view voter_id,
                          std::span<const std::string> ids) {
  return sat_voter(kind, e, e.require_voter(voter_id), e.mask_of_ids(ids));
}

enum class ComparisonOutcome { Less, Equal, Greater };

inline const char* comparison_outcome_name(ComparisonOutcome o) {
  switch (o) {
    case ComparisonOutcome::Less: return "less";
    case ComparisonOutcome::Equal: return "equal";
    case ComparisonOutcome::Greater: return "greater";
  }
  return "?";
}

// Refinement starts at start_bits and doubles until the operands separate or
// max_bits is reached.
struct ComparePolicy {
  unsigned start_bits = 64;
  unsigned max_bits = 4096;
};

// Sound three-way comparison. Exact operands compare as rationals. Interval
// operands are refined at doubling precision until the enclosures are
// disjoint; equal reals can never be separated that way, so syntactically
// identical expressions short-circuit to Equal instead. Throws
// IndeterminateComparison when the cap is reached without separation.
inline ComparisonOutcome sat_compare(const SatValue& a, const SatValue& b,
                                     const ComparePolicy& policy = {}) {
  if (a.is_exact() && b.is_exact()) {
    int c = cmp(a.exact_value(), b.exact_value());
    if (c < 0) return ComparisonOutcome::Less;
    if (c > 0) return ComparisonOutcome::Greater;
    return ComparisonOutcome::Equal;
  }
  if (a.same_expression(b)) return ComparisonOutcome::Equal;
  unsigned bits = std::max(1u, policy.start_bits);
  const unsigned cap = std::max(bits, policy.max_bits);
  for (;;) {
    RatInterval ia = a.enclosure(bits);
    RatInterval ib = b.enclosure(bits);
    if (ia.hi < ib.lo) return ComparisonOutcome::Less;
    if (ib.hi < ia.lo) return ComparisonOutcome::Greater;
    if (bits >= cap)
      throw IndeterminateComparison("interval operands still overlap at " +
                                    std::to_string(bits) + " bits of precision");
    bits = std::min(cap, bits * 2);
  }
}

struct ConditionWitness {
  std::vector<std::string> first;   // the smaller set, or the cheaper project
  std::vector<std::string> second;  // its strict superset, or the dearer project
};

struct ConditionReport {
  bool passed = true;
  std::optional<ConditionWitness> witness;
  std::uint64_t pairs_checked = 0;
};

// Condition checks are exhaustive up to this many projects, sampled above.
inline constexpr std::size_t kExhaustiveConditionLimit = 12;

// Condition 1: a strict superset must yield strictly larger satisfaction.
inline ConditionReport check_condition1(SatKind kind, const Election& e,
                                        std::uint64_t samples = 2000, std::uint64_t seed = 0) {
  ConditionReport rep;
  auto violates = [&](Mask sub, Mask sup) {
    ++rep.pairs_checked;
    if (sat_compare(sat_set(kind, e, sub), sat_set(kind, e, sup)) != ComparisonOutcome::Less) {
      rep.passed = false;
      rep.witness = ConditionWitness{e.ids_of_mask(sub), e.ids_of_mask(sup)};
      return true;
    }
    return false;
  };
  const std::size_t m = e.project_count();
  if (m <= kExhaustiveConditionLimit) {
    const Mask full = e.all_projects_mask();
    for (Mask sup = 1;; ++sup) {
      Mask sub = 0;  // proper submasks in ascending order
      do {
        if (violates(sub, sup)) return rep;
        sub = (sub - sup) & sup;
      } while (sub != sup && sub != 0);
      if (sup == full) break;
    }
  } else {
    std::mt19937_64 rng(seed);
    const Mask full = e.all_projects_mask();
    for (std::uint64_t k = 0; k < samples; ++k) {
      Mask sup = rng() & full;
      if (sup == 0) continue;
      Mask sub = rng() & sup;
      if (sub == sup) {
        // drop one set bit to make the inclusion strict
        int drop = static_cast<int>(rng() % static_cast<std::uint64_t>(std::popcount(sup)));
        for (std::size_t i = 0; i < kMaxProjects; ++i)
          if (sup & bit(i)) {
            if (drop-- == 0) {
              sub &= ~bit(i);
              break;
            }
          }
      }
      if (violates(sub, sup)) return rep;
    }
  }
  return rep;
}

// Condition 2: a strictly cheaper project must yield strictly smaller
// satisfaction than a dearer one, compared as singletons.
inline ConditionReport check_condition2(SatKind kind, const Election& e,
                                        std::uint64_t samples = 2000, std::uint64_t seed = 0) {
  ConditionReport rep;
  auto violates = [&](std::size_t i, std::size_t j) {
    ++rep.pairs_checked;
    if (sat_compare(sat_set(kind, e, bit(i)), sat_set(kind, e, bit(j))) !=
        ComparisonOutcome::Less) {
      rep.passed = false;
      rep.witness = ConditionWitness{{e.project(i).id}, {e.project(j).id}};
      return true;
    }
    return false;
  };
  const std::size_t m = e.project_count();
  if (m <= kExhaustiveConditionLimit) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j && e.project(i).cost < e.project(j).cost)
          if (violates(i, j)) return rep;
  } else {
    std::mt19937_64 rng(seed);
    for (std::uint64_t k = 0; k < samples; ++k) {
      std::size_t i = static_cast<std::size_t>(rng() % m);
      std::size_t j = static_cast<std::size_t>(rng() % m);
      if (i == j || !(e.project(i).cost < e.project(j).cost)) continue;
      if (violates(i, j)) return rep;
    }
  }
  return rep;
}

// Condition 3: 2b/3 - eps > b/2, an exact rational test (equivalently
// eps < b/6).
inline bool check_condition3(const Rat& b, const Rat& eps) {
  if (b <= 0 || eps <= 0) throw InvalidParameters("b and eps must be positive");
  return Rat(2) * b / 3 - eps > b / 2;
}

// Condition 4: on three synthetic projects costing b/3, eps and 2b/3 - eps,
// funding the two cheap ones together must satisfy strictly less than
// funding the expensive one alone.
inline bool check_condition4(SatKind kind, const Rat& b, const Rat& eps,
                             const ComparePolicy& policy = {}) {
  if (b <= 0 || eps <= 0) throw InvalidParameters("b and eps must be positive");
  Rat joint = Rat(2) * b / 3 - eps;
  if (joint <= 0) throw InvalidParameters("2b/3 - eps must be positive");
  Rat third = b / 3;
  Rat budget = std::max(b, eps);  // every synthetic project fits alone
  RawElection raw;
  raw.budget = budget;
  raw.projects = {{"p_third", third}, {"p_eps", eps}, {"p_joint", joint}};
  raw.voters = {{"1", {"p_third", "p_eps", "p_joint"}}};
  Election e = Election::make(raw);
  SatValue pair = sat_set(kind, e, bit(0) | bit(1));
  SatValue single = sat_set(kind, e, bit(2));
  return sat_compare(pair, single, policy) == ComparisonOutcome::Less;
}

}  // namespace pbcore
