#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pbcore/errors.hpp"
#include "pbcore/rat.hpp"

namespace pbcore {

// Subsets of projects and of voters are bitmasks over the declaration order.
// The library supports at most 64 projects and 64 voters per election.
using Mask = std::uint64_t;
using VoterMask = std::uint64_t;

inline constexpr std::size_t kMaxProjects = 64;
inline constexpr std::size_t kMaxVoters = 64;

inline constexpr Mask bit(std::size_t i) { return Mask{1} << i; }

struct Project {
  std::string id;
  Rat cost;

  friend bool operator==(const Project& a, const Project& b) {
    return a.id == b.id && a.cost == b.cost;
  }
};

struct RawVoter {
  std::string id;
  std::vector<std::string> approves;
};

// Unvalidated election data, as read from a file or assembled by a builder.
struct RawElection {
  Rat budget;
  std::vector<Project> projects;
  std::vector<RawVoter> voters;
};

enum class ViolationKind {
  NonPositiveCost,
  ProjectExceedsBudget,
  UnknownApprovedProject,
  DuplicateId,
  EmptyElection,
  TooManyProjects,
  TooManyVoters,
};

inline const char* violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::NonPositiveCost: return "NonPositiveCost";
    case ViolationKind::ProjectExceedsBudget: return "ProjectExceedsBudget";
    case ViolationKind::UnknownApprovedProject: return "UnknownApprovedProject";
    case ViolationKind::DuplicateId: return "DuplicateId";
    case ViolationKind::EmptyElection: return "EmptyElection";
    case ViolationKind::TooManyProjects: return "TooManyProjects";
    case ViolationKind::TooManyVoters: return "TooManyVoters";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string subject;  // offending id, or "budget" / "election"
  std::string detail;
};

struct ValidationError : PbError {
  std::vector<Violation> violations;

  explicit ValidationError(std::vector<Violation> v)
      : PbError(describe(v)), violations(std::move(v)) {}

 private:
  static std::string describe(const std::vector<Violation>& v) {
    std::string msg = "invalid election:";
    for (const Violation& x : v) {
      msg += "\n  ";
      msg += violation_kind_name(x.kind);
      msg += " [" + x.subject + "]: " + x.detail;
    }
    return msg;
  }
};

// Immutable, validated election: projects with exact positive costs, a budget
// limit, and one approval ballot per voter. Safe for concurrent reads.
class Election {
 public:
  // Checks every invariant and reports all violations, not just the first.
  static std::vector<Violation> validate(const RawElection& raw) {
    std::vector<Violation> out;
    if (raw.projects.empty())
      out.push_back({ViolationKind::EmptyElection, "election", "no projects"});
    if (raw.voters.empty())
      out.push_back({ViolationKind::EmptyElection, "election", "no voters"});
    if (raw.projects.size() > kMaxProjects)
      out.push_back({ViolationKind::TooManyProjects, "election",
                     "at most " + std::to_string(kMaxProjects) + " projects supported"});
    if (raw.voters.size() > kMaxVoters)
      out.push_back({ViolationKind::TooManyVoters, "election",
                     "at most " + std::to_string(kMaxVoters) + " voters supported"});
    const bool budget_ok = raw.budget > 0;
    if (!budget_ok)
      out.push_back({ViolationKind::NonPositiveCost, "budget", "budget must be positive"});

    std::unordered_set<std::string> project_ids;
    for (const Project& p : raw.projects) {
      if (!project_ids.insert(p.id).second)
        out.push_back({ViolationKind::DuplicateId, p.id, "duplicate project id"});
      if (p.cost <= 0) {
        out.push_back({ViolationKind::NonPositiveCost, p.id, "cost must be positive"});
      } else if (budget_ok && p.cost > raw.budget) {
        out.push_back({ViolationKind::ProjectExceedsBudget, p.id,
                       "cost " + rat_str(p.cost) + " exceeds budget " + rat_str(raw.budget)});
      }
    }
    std::unordered_set<std::string> voter_ids;
    for (const RawVoter& v : raw.voters) {
      if (!voter_ids.insert(v.id).second)
        out.push_back({ViolationKind::DuplicateId, v.id, "duplicate voter id"});
      for (const std::string& a : v.approves)
        if (!project_ids.count(a))
          out.push_back({ViolationKind::UnknownApprovedProject, a,
                         "voter " + v.id + " approves an unknown project"});
    }
    return out;
  }

  // Validates and constructs; throws ValidationError listing every violation.
  static Election make(const RawElection& raw) {
    auto violations = validate(raw);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    Election e;
    e.budget_ = raw.budget;
    e.projects_ = raw.projects;
    for (std::size_t i = 0; i < e.projects_.size(); ++i)
      e.project_index_.emplace(e.projects_[i].id, i);
    e.approver_counts_.assign(e.projects_.size(), 0);
    for (std::size_t v = 0; v < raw.voters.size(); ++v) {
      e.voters_.push_back(raw.voters[v].id);
      e.voter_index_.emplace(raw.voters[v].id, v);
      Mask ballot = 0;
      for (const std::string& a : raw.voters[v].approves)
        ballot |= bit(e.project_index_.at(a));
      e.approvals_.push_back(ballot);
    }
    for (std::size_t i = 0; i < e.projects_.size(); ++i)
      for (Mask ballot : e.approvals_)
        if (ballot & bit(i)) ++e.approver_counts_[i];
    return e;
  }

  // Unit-cost convenience constructor: every project costs 1 and the budget
  // is a positive integer. Approvals are given by project index.
  static Election unit_cost(std::size_t num_projects, unsigned long budget,
                            const std::vector<std::vector<std::size_t>>& approvals) {
    RawElection raw;
    raw.budget = Rat(budget);
    for (std::size_t i = 0; i < num_projects; ++i)
      raw.projects.push_back({"p" + std::to_string(i + 1), Rat(1)});
    for (std::size_t v = 0; v < approvals.size(); ++v) {
      RawVoter voter{"v" + std::to_string(v + 1), {}};
      for (std::size_t idx : approvals[v]) {
        if (idx >= num_projects)
          throw InvalidParameters("approval index out of range: " + std::to_string(idx));
        voter.approves.push_back(raw.projects[idx].id);
      }
      raw.voters.push_back(std::move(voter));
    }
    return make(raw);
  }

  std::size_t project_count() const { return projects_.size(); }
  std::size_t voter_count() const { return voters_.size(); }
  const Rat& budget() const { return budget_; }
  const Project& project(std::size_t i) const { return projects_[i]; }
  const std::vector<Project>& projects() const { return projects_; }
  const std::string& voter_id(std::size_t i) const { return voters_[i]; }
  const std::vector<std::string>& voter_ids() const { return voters_; }
  Mask approval_mask(std::size_t voter) const { return approvals_[voter]; }
  std::size_t approver_count(std::size_t project) const { return approver_counts_[project]; }

  Mask all_projects_mask() const {
    return projects_.size() >= kMaxProjects ? ~Mask{0} : bit(projects_.size()) - 1;
  }

  std::optional<std::size_t> project_index(std::string_view id) const {
    auto it = project_index_.find(std::string(id));
    if (it == project_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> voter_index(std::string_view id) const {
    auto it = voter_index_.find(std::string(id));
    if (it == voter_index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t require_project(std::string_view id) const {
    auto idx = project_index(id);
    if (!idx) throw UnknownProject(std::string(id));
    return *idx;
  }
  std::size_t require_voter(std::string_view id) const {
    auto idx = voter_index(id);
    if (!idx) throw UnknownVoter(std::string(id));
    return *idx;
  }

  // Throws UnknownProject when a bit beyond the project range is set.
  void require_subset(Mask subset) const {
    if (projects_.size() < kMaxProjects && (subset >> projects_.size()) != 0)
      throw UnknownProject("project index out of range in subset mask");
  }

  Mask mask_of_ids(std::span<const std::string> ids) const {
    Mask m = 0;
    for (const std::string& id : ids) m |= bit(require_project(id));
    return m;
  }
  std::vector<std::string> ids_of_mask(Mask subset) const {
    require_subset(subset);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < projects_.size(); ++i)
      if (subset & bit(i)) out.push_back(projects_[i].id);
    return out;
  }

  Rat total_cost(Mask subset) const {
    require_subset(subset);
    Rat sum(0);
    for (std::size_t i = 0; i < projects_.size(); ++i)
      if (subset & bit(i)) sum += projects_[i].cost;
    return sum;
  }
  Rat total_cost(std::span<const std::string> ids) const { return total_cost(mask_of_ids(ids)); }

  bool is_feasible(Mask subset) const { return total_cost(subset) <= budget_; }

  // Feasible, and no single remaining project still fits within the budget.
  bool is_exhaustive(Mask subset) const {
    Rat total = total_cost(subset);
    if (total > budget_) return false;
    for (std::size_t i = 0; i < projects_.size(); ++i)
      if (!(subset & bit(i)) && total + projects_[i].cost <= budget_) return false;
    return true;
  }

  RawElection to_raw() const {
    RawElection raw;
    raw.budget = budget_;
    raw.projects = projects_;
    for (std::size_t v = 0; v < voters_.size(); ++v)
      raw.voters.push_back({voters_[v], ids_of_mask(approvals_[v])});
    return raw;
  }

  friend bool operator==(const Election& a, const Election& b) {
    return a.budget_ == b.budget_ && a.projects_ == b.projects_ && a.voters_ == b.voters_ &&
           a.approvals_ == b.approvals_;
  }

 private:
  Election() = default;

  Rat budget_;
  std::vector<Project> projects_;
  std::vector<std::string> voters_;
  std::vector<Mask> approvals_;
  std::vector<std::size_t> approver_counts_;
  std::unordered_map<std::string, std::size_t> project_index_;
  std::unordered_map<std::string, std::size_t> voter_index_;
};

// A feasible subset of projects; feasibility is checked at construction.
class Allocation {
 public:
  static Allocation of(const Election& e, Mask subset) {
    e.require_subset(subset);
    if (!e.is_feasible(subset))
      throw InvalidParameters("allocation exceeds the budget: cost " +
                              rat_str(e.total_cost(subset)) + " > " + rat_str(e.budget()));
    return Allocation(subset);
  }
  static Allocation of_ids(const Election& e, std::span<const std::string> ids) {
    return of(e, e.mask_of_ids(ids));
  }
  Mask mask() const { return mask_; }

 private:
  explicit Allocation(Mask m) : mask_(m) {}
  Mask mask_;
};

namespace detail {

template <typename Fn>
bool enumerate_feasible_rec(const Election& e, int next_bit, Mask mask, const Rat& cost, Fn& fn) {
  if (next_bit < 0) return fn(mask, cost);
  if (!enumerate_feasible_rec(e, next_bit - 1, mask, cost, fn)) return false;
  Rat with = cost + e.project(static_cast<std::size_t>(next_bit)).cost;
  if (with <= e.budget())
    return enumerate_feasible_rec(e, next_bit - 1, mask | bit(static_cast<std::size_t>(next_bit)),
                                  with, fn);
  return true;
}

}  // namespace detail

// Visits every feasible subset exactly once, in ascending bitmask order
// (lexicographic over the project declaration order). fn receives the subset
// and its exact total cost; returning false stops the enumeration early.
template <typename Fn>
bool for_each_feasible(const Election& e, Fn fn) {
  return detail::enumerate_feasible_rec(e, static_cast<int>(e.project_count()) - 1, Mask{0},
                                        Rat(0), fn);
}

// Same order, restricted to exhaustive allocations.
template <typename Fn>
bool for_each_exhaustive(const Election& e, Fn fn) {
  return for_each_feasible(e, [&](Mask m, const Rat& cost) {
    for (std::size_t i = 0; i < e.project_count(); ++i)
      if (!(m & bit(i)) && cost + e.project(i).cost <= e.budget()) return true;
    return fn(m, cost);
  });
}

inline std::vector<Mask> feasible_masks(const Election& e) {
  std::vector<Mask> out;
  for_each_feasible(e, [&](Mask m, const Rat&) {
    out.push_back(m);
    return true;
  });
  return out;
}

inline std::vector<Mask> exhaustive_masks(const Election& e) {
  std::vector<Mask> out;
  for_each_exhaustive(e, [&](Mask m, const Rat&) {
    out.push_back(m);
    return true;
  });
  return out;
}

}  // namespace pbcore
