#pragma once

#include <bit>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pbcore/core.hpp"
#include "pbcore/election.hpp"
#include "pbcore/satisfaction.hpp"

namespace pbcore {

namespace detail {

// The bundled 3-voter counterexample family: one joint project per voter
// pair, plus a large and a small personal project per voter. Each voter
// approves exactly the projects carrying their index.
inline Election three_voter_gadget(const Rat& joint, const Rat& large, const Rat& small,
                                   const Rat& b) {
  RawElection raw;
  raw.budget = b;
  raw.projects = {{"p12", joint}, {"p13", joint}, {"p23", joint},
                  {"l1", large},  {"l2", large},  {"l3", large},
                  {"s1", small},  {"s2", small},  {"s3", small}};
  raw.voters = {{"1", {"p12", "p13", "l1", "s1"}},
                {"2", {"p12", "p23", "l2", "s2"}},
                {"3", {"p13", "p23", "l3", "s3"}}};
  return Election::make(raw);
}

}  // namespace detail

// Theorem 1 instance: core-empty under the cost satisfaction.
// b = 15, joint cost 8, large 5, small 2.
inline Election build_thm1() {
  return detail::three_voter_gadget(Rat(8), Rat(5), Rat(2), Rat(15));
}

// Theorem 2 instance, parametric: joint cost 2b/3 - eps, large b/3, small eps.
inline Election build_thm2(const Rat& b, const Rat& eps) {
  if (b <= 0 || eps <= 0) throw InvalidParameters("b and eps must be positive");
  Rat joint = Rat(2) * b / 3 - eps;
  if (joint <= 0) throw InvalidParameters("2b/3 - eps must be positive");
  return detail::three_voter_gadget(joint, b / 3, eps, b);
}

// Theorem 3 instance: core-empty under the share.
// b = 21, joint cost 11, large 3, small 2.
inline Election build_thm3() {
  return detail::three_voter_gadget(Rat(11), Rat(3), Rat(2), Rat(21));
}

// Shape classes of emitted certificates on gadget-style instances, keyed by
// the project-id prefixes (p = joint, l = large, s = small).
enum class WitnessFamily {
  JointPair,            // two voters deviate to a single joint project
  LargeSingleton,       // one voter deviates to their large project
  JointSmallPair,       // two voters deviate to a joint plus a small project
  LargeSmallSingleton,  // one voter deviates to their large plus small project
  JointLargePair,       // two voters deviate to a joint plus a large project
  Other,
};

inline const char* witness_family_name(WitnessFamily f) {
  switch (f) {
    case WitnessFamily::JointPair: return "joint-pair";
    case WitnessFamily::LargeSingleton: return "large-singleton";
    case WitnessFamily::JointSmallPair: return "joint-small-pair";
    case WitnessFamily::LargeSmallSingleton: return "large-small-singleton";
    case WitnessFamily::JointLargePair: return "joint-large-pair";
    case WitnessFamily::Other: return "other";
  }
  return "?";
}

inline WitnessFamily classify_witness(const Election& e, const BlockingCertificate& cert) {
  int joints = 0, larges = 0, smalls = 0, other = 0;
  for (std::size_t i = 0; i < e.project_count(); ++i) {
    if (!(cert.deviation & bit(i))) continue;
    switch (e.project(i).id.empty() ? '?' : e.project(i).id.front()) {
      case 'p': ++joints; break;
      case 'l': ++larges; break;
      case 's': ++smalls; break;
      default: ++other; break;
    }
  }
  const int size = std::popcount(cert.coalition);
  if (other == 0) {
    if (size == 2 && joints == 1 && larges == 0 && smalls == 0) return WitnessFamily::JointPair;
    if (size == 1 && joints == 0 && larges == 1 && smalls == 0)
      return WitnessFamily::LargeSingleton;
    if (size == 2 && joints == 1 && larges == 0 && smalls == 1)
      return WitnessFamily::JointSmallPair;
    if (size == 1 && joints == 0 && larges == 1 && smalls == 1)
      return WitnessFamily::LargeSmallSingleton;
    if (size == 2 && joints == 1 && larges == 1 && smalls == 0)
      return WitnessFamily::JointLargePair;
  }
  return WitnessFamily::Other;
}

struct TheoremReport {
  explicit TheoremReport(Election e) : election(std::move(e)) {}

  int theorem = 0;
  SatKind kind = SatKind::Cost;
  std::optional<Rat> b, eps;  // theorem 2 parameters

  // Theorem 2 precondition checks; unset for theorems 1 and 3, and unset
  // past the first failure.
  std::optional<ConditionReport> condition1, condition2;
  std::optional<bool> condition3, condition4;
  std::optional<int> failed_condition;  // 1..4

  Election election;
  // Present exactly when every precondition passed.
  std::optional<CoreVerdict> verdict;
  std::map<WitnessFamily, std::size_t> witness_families;
  std::int64_t duration_ms = 0;
};

// Machine-checks one of the bundled counterexample theorems end to end.
// Theorem 2 requires kind, b and eps and runs its four condition checks
// before the core scan; the first failing condition stops the run.
inline TheoremReport verify_theorem(int id, std::optional<SatKind> kind = {},
                                    std::optional<Rat> b = {}, std::optional<Rat> eps = {},
                                    const CoreOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();
  };

  std::optional<TheoremReport> rep;
  switch (id) {
    case 1:
      if (kind && *kind != SatKind::Cost)
        throw InvalidParameters("theorem 1 is specific to the cost satisfaction");
      rep.emplace(build_thm1());
      rep->kind = SatKind::Cost;
      break;
    case 2: {
      if (!kind || !b || !eps)
        throw InvalidParameters("theorem 2 requires a satisfaction kind, b and eps");
      rep.emplace(build_thm2(*b, *eps));
      rep->kind = *kind;
      rep->b = *b;
      rep->eps = *eps;
      break;
    }
    case 3:
      if (kind && *kind != SatKind::Share)
        throw InvalidParameters("theorem 3 is specific to the share");
      rep.emplace(build_thm3());
      rep->kind = SatKind::Share;
      break;
    default:
      throw InvalidParameters("theorem id must be 1, 2 or 3");
  }
  rep->theorem = id;

  if (id == 2) {
    rep->condition1 = check_condition1(rep->kind, rep->election);
    if (!rep->condition1->passed) {
      rep->failed_condition = 1;
      rep->duration_ms = elapsed_ms();
      return *rep;
    }
    rep->condition2 = check_condition2(rep->kind, rep->election);
    if (!rep->condition2->passed) {
      rep->failed_condition = 2;
      rep->duration_ms = elapsed_ms();
      return *rep;
    }
    rep->condition3 = check_condition3(*b, *eps);
    if (!*rep->condition3) {
      rep->failed_condition = 3;
      rep->duration_ms = elapsed_ms();
      return *rep;
    }
    rep->condition4 = check_condition4(rep->kind, *b, *eps, opts.compare);
    if (!*rep->condition4) {
      rep->failed_condition = 4;
      rep->duration_ms = elapsed_ms();
      return *rep;
    }
  }

  rep->verdict = core_empty(rep->kind, rep->election, opts);
  if (rep->verdict->empty())
    for (const auto& [mask, cert] : rep->verdict->witnesses)
      ++rep->witness_families[classify_witness(rep->election, cert)];
  rep->duration_ms = elapsed_ms();
  return *rep;
}

}  // namespace pbcore
