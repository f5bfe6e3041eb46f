#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pbcore/election.hpp"
#include "pbcore/satisfaction.hpp"

namespace pbcore {

// Largest deviation cost a coalition can command: b * |N| / n.
inline Rat budget_share(const Election& e, std::size_t coalition_size) {
  if (coalition_size < 1 || coalition_size > e.voter_count())
    throw InvalidParameters("coalition size out of range");
  return e.budget() * static_cast<unsigned long>(coalition_size) /
         static_cast<unsigned long>(e.voter_count());
}

struct MemberComparison {
  std::size_t voter;
  SatValue before;  // satisfaction under the standing allocation
  SatValue after;   // satisfaction under the deviation
};

// Witness of a core violation: the coalition commands at least the
// deviation's cost, and every member strictly improves.
struct BlockingCertificate {
  VoterMask coalition = 0;
  Mask deviation = 0;
  std::vector<MemberComparison> members;  // ascending voter index
};

struct CoreOptions {
  bool exhaustive_only = true;    // outer loop visits exhaustive allocations only
  bool prune_deviations = true;   // deviations within the coalition's approval union
  std::size_t max_projects = 20;  // enumeration guard for core_empty
  unsigned threads = 1;
  ComparePolicy compare{};
};

// Brute-force reference mode: all feasible allocations, all deviations.
inline CoreOptions naive_options() {
  CoreOptions o;
  o.exhaustive_only = false;
  o.prune_deviations = false;
  return o;
}

struct CoreVerdict {
  // Engaged: this allocation admits no blocking pair, so the core is
  // nonempty. Disengaged: every scanned allocation has a certificate.
  std::optional<Mask> in_core;
  std::vector<std::pair<Mask, BlockingCertificate>> witnesses;  // ascending allocation mask
  std::uint64_t allocations_checked = 0;

  bool empty() const { return !in_core.has_value(); }
};

namespace detail {

// Per-voter memo of whether a deviation's approved part strictly beats the
// voter's standing satisfaction. Keyed by the intersection mask, which is the
// only thing the voter's satisfaction depends on.
class ImprovementTable {
 public:
  ImprovementTable(SatKind kind, const Election& e, Mask standing, const ComparePolicy& policy)
      : kind_(kind), e_(e), policy_(policy) {
    before_.reserve(e.voter_count());
    for (std::size_t v = 0; v < e.voter_count(); ++v)
      before_.push_back(sat_set(kind, e, standing & e.approval_mask(v)));
    memo_.resize(e.voter_count());
  }

  bool improves(std::size_t voter, Mask deviation) {
    const Mask key = deviation & e_.approval_mask(voter);
    auto& m = memo_[voter];
    if (auto it = m.find(key); it != m.end()) return it->second;
    bool better =
        sat_compare(sat_set(kind_, e_, key), before_[voter], policy_) == ComparisonOutcome::Greater;
    m.emplace(key, better);
    return better;
  }

  const SatValue& before(std::size_t voter) const { return before_[voter]; }
  SatValue after(std::size_t voter, Mask deviation) const {
    return sat_set(kind_, e_, deviation & e_.approval_mask(voter));
  }

 private:
  SatKind kind_;
  const Election& e_;
  ComparePolicy policy_;
  std::vector<SatValue> before_;
  std::vector<std::unordered_map<Mask, bool>> memo_;
};

inline Mask expand_bits(Mask counter, const std::vector<std::size_t>& positions) {
  Mask out = 0;
  for (std::size_t k = 0; counter != 0; ++k, counter >>= 1)
    if (counter & 1) out |= bit(positions[k]);
  return out;
}

}  // namespace detail

// Searches for a blocking pair against the standing allocation. Coalitions
// and deviations are scanned in ascending bitmask order, so the returned
// certificate is the lexicographically first one; two runs always agree.
//
// Deviations are restricted to the coalition's approval union by default:
// projects nobody in the coalition approves add cost but satisfy no member,
// so dropping them never loses a blocking pair.
inline std::optional<BlockingCertificate> find_blocking(SatKind kind, const Election& e,
                                                        const Allocation& standing,
                                                        const CoreOptions& opts = {}) {
  const std::size_t n = e.voter_count();
  detail::ImprovementTable table(kind, e, standing.mask(), opts.compare);
  const VoterMask all_voters = n >= kMaxVoters ? ~VoterMask{0} : (VoterMask{1} << n) - 1;

  for (VoterMask coalition = 1;; ++coalition) {
    const unsigned long size = static_cast<unsigned long>(std::popcount(coalition));
    // |N|/n >= c(P)/b held exactly as b*|N| >= n*c(P)
    const Rat cost_cap = e.budget() * size;

    Mask domain;
    if (opts.prune_deviations) {
      domain = 0;
      for (std::size_t v = 0; v < n; ++v)
        if (coalition & (VoterMask{1} << v)) domain |= e.approval_mask(v);
    } else {
      domain = e.all_projects_mask();
    }
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < e.project_count(); ++i)
      if (domain & bit(i)) positions.push_back(i);
    if (positions.size() >= 48)
      throw EnumerationLimitExceeded("deviation domain too large to enumerate");

    const Mask count = Mask{1} << positions.size();
    for (Mask counter = 1; counter < count; ++counter) {
      const Mask deviation = detail::expand_bits(counter, positions);
      if (!(e.total_cost(deviation) * static_cast<unsigned long>(n) <= cost_cap)) continue;
      bool all_improve = true;
      for (std::size_t v = 0; v < n && all_improve; ++v)
        if (coalition & (VoterMask{1} << v)) all_improve = table.improves(v, deviation);
      if (!all_improve) continue;

      BlockingCertificate cert;
      cert.coalition = coalition;
      cert.deviation = deviation;
      for (std::size_t v = 0; v < n; ++v)
        if (coalition & (VoterMask{1} << v))
          cert.members.push_back({v, table.before(v), table.after(v, deviation)});
      return cert;
    }
    if (coalition == all_voters) break;
  }
  return std::nullopt;
}

inline bool in_core(SatKind kind, const Election& e, const Allocation& standing,
                    const CoreOptions& opts = {}) {
  return !find_blocking(kind, e, standing, opts).has_value();
}

// Decides core emptiness. Only exhaustive allocations need scanning: any
// blocking pair against a superset also blocks the subset, so the core is
// nonempty exactly when some exhaustive allocation is in it. The naive
// all-feasible mode stays available through the options as a reference.
//
// Returns at the first unblocked allocation, otherwise a certificate for
// every scanned allocation. With threads > 1 the scan is partitioned into
// blocks that are merged in allocation order, so the verdict (and any
// surfaced error) is independent of the thread count.
inline CoreVerdict core_empty(SatKind kind, const Election& e, const CoreOptions& opts = {}) {
  if (e.project_count() > opts.max_projects)
    throw EnumerationLimitExceeded("instance has " + std::to_string(e.project_count()) +
                                   " projects; enumeration limit is " +
                                   std::to_string(opts.max_projects));
  const std::vector<Mask> allocations =
      opts.exhaustive_only ? exhaustive_masks(e) : feasible_masks(e);

  CoreVerdict verdict;
  auto check_one = [&](Mask m) { return find_blocking(kind, e, Allocation::of(e, m), opts); };

  if (opts.threads <= 1) {
    for (Mask m : allocations) {
      ++verdict.allocations_checked;
      auto cert = check_one(m);
      if (!cert) {
        verdict.in_core = m;
        return verdict;
      }
      verdict.witnesses.emplace_back(m, std::move(*cert));
    }
    return verdict;
  }

  const std::size_t block = std::size_t{opts.threads} * 8;
  for (std::size_t base = 0; base < allocations.size(); base += block) {
    const std::size_t end = std::min(allocations.size(), base + block);
    std::vector<std::optional<BlockingCertificate>> results(end - base);
    std::vector<std::exception_ptr> errors(end - base);
    std::atomic<std::size_t> next{base};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= end) return;
        try {
          results[i - base] = check_one(allocations[i]);
        } catch (...) {
          errors[i - base] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(opts.threads);
    for (unsigned t = 0; t < opts.threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    for (std::size_t i = base; i < end; ++i) {
      ++verdict.allocations_checked;
      if (errors[i - base]) std::rethrow_exception(errors[i - base]);
      auto& cert = results[i - base];
      if (!cert) {
        verdict.in_core = allocations[i];
        return verdict;
      }
      verdict.witnesses.emplace_back(allocations[i], std::move(*cert));
    }
  }
  return verdict;
}

enum class CertStatus {
  Ok,
  EmptyCoalition,
  UnknownVoter,
  UnknownProject,
  BudgetShareViolated,
  MemberNotImproved,
  Indeterminate,
};

inline const char* cert_status_name(CertStatus s) {
  switch (s) {
    case CertStatus::Ok: return "Ok";
    case CertStatus::EmptyCoalition: return "EmptyCoalition";
    case CertStatus::UnknownVoter: return "UnknownVoter";
    case CertStatus::UnknownProject: return "UnknownProject";
    case CertStatus::BudgetShareViolated: return "BudgetShareViolated";
    case CertStatus::MemberNotImproved: return "MemberNotImproved";
    case CertStatus::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct CertCheck {
  CertStatus status = CertStatus::Ok;
  std::string detail;

  bool ok() const { return status == CertStatus::Ok; }
  explicit operator bool() const { return ok(); }
};

// Independent re-check of a certificate against the election. Trusts nothing
// stored in the certificate: the budget inequality and every member
// comparison are re-derived from scratch. Never throws; an unverifiable
// certificate comes back with a reason code.
inline CertCheck verify_certificate(SatKind kind, const Election& e, const Allocation& standing,
                                    const BlockingCertificate& cert,
                                    const ComparePolicy& policy = {}) {
  const std::size_t n = e.voter_count();
  if (cert.coalition == 0) return {CertStatus::EmptyCoalition, "coalition is empty"};
  if (n < kMaxVoters && (cert.coalition >> n) != 0)
    return {CertStatus::UnknownVoter, "coalition refers to a voter index beyond the election"};
  if (e.project_count() < kMaxProjects && (cert.deviation >> e.project_count()) != 0)
    return {CertStatus::UnknownProject, "deviation refers to a project index beyond the election"};

  const unsigned long size = static_cast<unsigned long>(std::popcount(cert.coalition));
  const Rat deviation_cost = e.total_cost(cert.deviation);
  if (!(deviation_cost * static_cast<unsigned long>(n) <= e.budget() * size))
    return {CertStatus::BudgetShareViolated,
            "coalition of " + std::to_string(size) + " commands " +
                rat_str(budget_share(e, size)) + " but the deviation costs " +
                rat_str(deviation_cost)};

  for (std::size_t v = 0; v < n; ++v) {
    if (!(cert.coalition & (VoterMask{1} << v))) continue;
    try {
      SatValue before = sat_set(kind, e, standing.mask() & e.approval_mask(v));
      SatValue after = sat_set(kind, e, cert.deviation & e.approval_mask(v));
      if (sat_compare(after, before, policy) != ComparisonOutcome::Greater)
        return {CertStatus::MemberNotImproved,
                "voter " + e.voter_id(v) + " does not strictly improve"};
    } catch (const IndeterminateComparison& ex) {
      return {CertStatus::Indeterminate, ex.what()};
    }
  }
  return {};
}

}  // namespace pbcore
