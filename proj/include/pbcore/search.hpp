#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pbcore/core.hpp"
#include "pbcore/election.hpp"

namespace pbcore {

// k-voter generalization of the bundled 3-voter instances: one joint project
// per voter pair, plus a large and a small personal project per voter.
// Voter i approves exactly the projects carrying index i.
inline Election gadget(std::size_t k, const Rat& joint, const Rat& large, const Rat& small,
                       const Rat& b) {
  if (k < 2 || k > 9) throw InvalidParameters("gadget size must be between 2 and 9");
  if (joint <= 0 || large <= 0 || small <= 0 || b <= 0)
    throw InvalidParameters("gadget costs and budget must be positive");
  if (joint > b || large > b || small > b)
    throw InvalidParameters("every gadget project must fit the budget alone");

  RawElection raw;
  raw.budget = b;
  for (std::size_t i = 1; i <= k; ++i)
    for (std::size_t j = i + 1; j <= k; ++j)
      raw.projects.push_back({"p" + std::to_string(i) + std::to_string(j), joint});
  for (std::size_t i = 1; i <= k; ++i)
    raw.projects.push_back({"l" + std::to_string(i), large});
  for (std::size_t i = 1; i <= k; ++i)
    raw.projects.push_back({"s" + std::to_string(i), small});
  for (std::size_t i = 1; i <= k; ++i) {
    RawVoter v{std::to_string(i), {}};
    for (std::size_t a = 1; a <= k; ++a)
      for (std::size_t bb = a + 1; bb <= k; ++bb)
        if (a == i || bb == i) v.approves.push_back("p" + std::to_string(a) + std::to_string(bb));
    v.approves.push_back("l" + std::to_string(i));
    v.approves.push_back("s" + std::to_string(i));
    raw.voters.push_back(std::move(v));
  }
  return Election::make(raw);
}

// Label that depends only on the election's structure: two elections get the
// same key exactly when one can be turned into the other by renaming voters
// and renaming projects (budget, costs and the approval structure preserved).
//
// For a fixed voter ordering a project is characterized by (cost, approver
// set), so sorting those signatures canonicalizes the project labels; taking
// the minimum over all voter orderings canonicalizes the voter labels too.
inline std::string canonical_key(const Election& e) {
  const std::size_t n = e.voter_count();
  if (n > 8) throw LimitExceeded("canonical_key supports at most 8 voters");

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  std::string best;
  std::vector<std::pair<Rat, VoterMask>> signature(e.project_count());
  do {
    for (std::size_t i = 0; i < e.project_count(); ++i) {
      VoterMask approvers = 0;
      for (std::size_t k = 0; k < n; ++k)
        if (e.approval_mask(perm[k]) & bit(i)) approvers |= VoterMask{1} << k;
      signature[i] = {e.project(i).cost, approvers};
    }
    std::sort(signature.begin(), signature.end(), [](const auto& a, const auto& b) {
      int c = cmp(a.first, b.first);
      if (c != 0) return c < 0;
      return a.second < b.second;
    });
    std::string key = "b=" + rat_str(e.budget()) + ";n=" + std::to_string(n) + ";";
    for (const auto& [cost, approvers] : signature)
      key += rat_str(cost) + "@" + std::to_string(approvers) + ";";
    if (best.empty() || key < best) best = std::move(key);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

enum class ProfileFamily { Gadget, Random, All };

inline const char* profile_family_name(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::Gadget: return "gadget";
    case ProfileFamily::Random: return "random";
    case ProfileFamily::All: return "all";
  }
  return "?";
}

struct SearchSpace {
  ProfileFamily family = ProfileFamily::Gadget;
  std::size_t voters = 3;
  std::size_t projects = 0;     // random / all families
  std::vector<Rat> costs;       // candidate cost values
  std::vector<Rat> budgets;     // candidate budget values
  double approval_prob = 0.5;   // random family
  bool dedupe = true;           // canonical-key symmetry reduction
};

struct SearchLimits {
  std::uint64_t max_instances = 1000000;  // cap on candidates drawn from the space
  unsigned threads = 1;
  std::size_t max_projects = 20;
  ComparePolicy compare{};
  std::string checkpoint_path;  // empty disables checkpointing
};

struct Counterexample {
  Election election;
  CoreVerdict verdict;
};

struct SearchReport {
  std::uint64_t seed = 0;
  std::uint64_t enumerated = 0;          // valid candidates drawn from the space
  std::uint64_t invalid = 0;             // drawn but failed validation
  std::uint64_t skipped_isomorphic = 0;  // deduped by canonical key
  std::uint64_t examined = 0;            // actually core-checked
  std::uint64_t indeterminate = 0;       // verdict aborted by an unresolved comparison
  bool limit_hit = false;                // stopped by max_instances with candidates remaining
  std::vector<Counterexample> counterexamples;
  // Wall clock, informational only; excluded from the serialized report so
  // identical runs serialize identically.
  std::int64_t duration_ms = 0;
};

namespace detail {

// Deterministic candidate stream over a search space. Enumerative families
// (gadget, all) advance odometers in ascending order: budget first, then
// costs, then approval profiles. The random family draws from a fixed-seed
// mt19937_64, so a given seed always replays the same sequence.
class CandidateGen {
 public:
  CandidateGen(const SearchSpace& space, std::uint64_t seed, std::uint64_t cap)
      : space_(space), cap_(cap), rng_(seed) {
    std::sort(space_.costs.begin(), space_.costs.end());
    space_.costs.erase(std::unique(space_.costs.begin(), space_.costs.end()), space_.costs.end());
    std::sort(space_.budgets.begin(), space_.budgets.end());
    space_.budgets.erase(std::unique(space_.budgets.begin(), space_.budgets.end()),
                         space_.budgets.end());
    if (space_.costs.empty() || space_.budgets.empty())
      throw InvalidParameters("search space needs at least one cost and one budget value");
    switch (space_.family) {
      case ProfileFamily::Gadget:
        if (space_.voters < 2 || space_.voters > 9)
          throw InvalidParameters("gadget family needs between 2 and 9 voters");
        odometer_.assign(3, 0);
        break;
      case ProfileFamily::Random:
      case ProfileFamily::All:
        if (space_.voters < 1 || space_.projects < 1)
          throw InvalidParameters("family needs at least one voter and one project");
        if (space_.projects > kMaxProjects) throw InvalidParameters("too many projects");
        if (space_.family == ProfileFamily::All) {
          if (space_.projects > 16)
            throw InvalidParameters("the exhaustive family supports at most 16 projects");
          odometer_.assign(space_.projects, 0);       // cost digit per project
          profile_.assign(space_.voters, 0);          // ballot mask per voter
        }
        break;
    }
    if (space_.family == ProfileFamily::Random) {
      if (!(space_.approval_prob >= 0.0 && space_.approval_prob <= 1.0))
        throw InvalidParameters("approval probability must be in [0, 1]");
      approve_all_ = space_.approval_prob >= 1.0;
      if (!approve_all_)
        approve_threshold_ = static_cast<std::uint64_t>(
            space_.approval_prob * 18446744073709551616.0 /* 2^64 */);
    }
  }

  // nullopt when the family is exhausted or the cap is reached. Invalid
  // candidates (some cost exceeding the budget) count toward the cap and the
  // report, then the stream moves on. Replay mode (checkpoint fast-forward)
  // draws without consuming the cap.
  std::optional<Election> next(SearchReport& rep) {
    for (;;) {
      if (!replay_ && drawn_ >= cap_) {
        truncated_ = has_more();
        return std::nullopt;
      }
      if (replay_ && ++replayed_ > kReplayBound)
        throw InvalidParameters("checkpoint does not match this search space");
      std::optional<RawElection> raw = generate();
      if (!raw) return std::nullopt;
      if (!replay_) ++drawn_;
      auto violations = Election::validate(*raw);
      if (!violations.empty()) {
        if (!replay_) ++rep.invalid;
        continue;
      }
      if (!replay_) ++rep.enumerated;
      return Election::make(*raw);
    }
  }

  void set_replay(bool replay) { replay_ = replay; }
  bool truncated() const { return truncated_; }

 private:
  bool has_more() {
    if (space_.family == ProfileFamily::Random) return true;
    return !exhausted_;
  }

  std::optional<RawElection> generate() {
    switch (space_.family) {
      case ProfileFamily::Gadget: return generate_gadget();
      case ProfileFamily::Random: return generate_random();
      case ProfileFamily::All: return generate_all();
    }
    return std::nullopt;
  }

  std::optional<RawElection> generate_gadget() {
    if (exhausted_) return std::nullopt;
    const Rat& b = space_.budgets[budget_idx_];
    const Rat& joint = space_.costs[odometer_[0]];
    const Rat& large = space_.costs[odometer_[1]];
    const Rat& small = space_.costs[odometer_[2]];
    RawElection raw;
    raw.budget = b;
    const std::size_t k = space_.voters;
    for (std::size_t i = 1; i <= k; ++i)
      for (std::size_t j = i + 1; j <= k; ++j)
        raw.projects.push_back({"p" + std::to_string(i) + std::to_string(j), joint});
    for (std::size_t i = 1; i <= k; ++i)
      raw.projects.push_back({"l" + std::to_string(i), large});
    for (std::size_t i = 1; i <= k; ++i)
      raw.projects.push_back({"s" + std::to_string(i), small});
    for (std::size_t i = 1; i <= k; ++i) {
      RawVoter v{std::to_string(i), {}};
      for (std::size_t a = 1; a <= k; ++a)
        for (std::size_t bb = a + 1; bb <= k; ++bb)
          if (a == i || bb == i)
            v.approves.push_back("p" + std::to_string(a) + std::to_string(bb));
      v.approves.push_back("l" + std::to_string(i));
      v.approves.push_back("s" + std::to_string(i));
      raw.voters.push_back(std::move(v));
    }
    advance_digits(odometer_, space_.costs.size());
    return raw;
  }

  std::optional<RawElection> generate_random() {
    RawElection raw;
    raw.budget = space_.budgets[rng_() % space_.budgets.size()];
    // keep every project individually feasible
    std::vector<const Rat*> admissible;
    for (const Rat& c : space_.costs)
      if (c <= raw.budget) admissible.push_back(&c);
    if (admissible.empty()) {
      for (std::size_t i = 0; i < space_.projects; ++i)
        raw.projects.push_back({"p" + std::to_string(i + 1), space_.costs.front()});
    } else {
      for (std::size_t i = 0; i < space_.projects; ++i)
        raw.projects.push_back(
            {"p" + std::to_string(i + 1), *admissible[rng_() % admissible.size()]});
    }
    for (std::size_t v = 0; v < space_.voters; ++v) {
      RawVoter voter{"v" + std::to_string(v + 1), {}};
      for (std::size_t i = 0; i < space_.projects; ++i)
        if (approve_all_ || rng_() < approve_threshold_)
          voter.approves.push_back(raw.projects[i].id);
      raw.voters.push_back(std::move(voter));
    }
    return raw;
  }

  std::optional<RawElection> generate_all() {
    if (exhausted_) return std::nullopt;
    RawElection raw;
    raw.budget = space_.budgets[budget_idx_];
    for (std::size_t i = 0; i < space_.projects; ++i)
      raw.projects.push_back({"p" + std::to_string(i + 1), space_.costs[odometer_[i]]});
    for (std::size_t v = 0; v < space_.voters; ++v) {
      RawVoter voter{"v" + std::to_string(v + 1), {}};
      for (std::size_t i = 0; i < space_.projects; ++i)
        if (profile_[v] & bit(i)) voter.approves.push_back(raw.projects[i].id);
      raw.voters.push_back(std::move(voter));
    }
    // innermost: approval profiles, then cost assignment, then budget
    const Mask profile_count = bit(space_.projects);
    std::size_t v = space_.voters;
    while (v-- > 0) {
      if (++profile_[v] < profile_count) return raw;
      profile_[v] = 0;
    }
    advance_digits(odometer_, space_.costs.size());
    return raw;
  }

  void advance_digits(std::vector<std::size_t>& digits, std::size_t radix) {
    std::size_t d = digits.size();
    while (d-- > 0) {
      if (++digits[d] < radix) return;
      digits[d] = 0;
    }
    if (++budget_idx_ >= space_.budgets.size()) exhausted_ = true;
  }

  static constexpr std::uint64_t kReplayBound = 100000000;

  SearchSpace space_;
  std::uint64_t cap_;
  std::mt19937_64 rng_;
  std::uint64_t approve_threshold_ = 0;
  bool approve_all_ = false;
  std::uint64_t drawn_ = 0;
  std::uint64_t replayed_ = 0;
  std::size_t budget_idx_ = 0;
  std::vector<std::size_t> odometer_;
  std::vector<Mask> profile_;
  bool exhausted_ = false;
  bool truncated_ = false;
  bool replay_ = false;
};

}  // namespace detail

// Deterministic search for core-empty instances. Candidates are streamed in
// a fixed order, deduped by canonical key, and core-checked; every reported
// counterexample is re-verified from scratch (full core_empty rerun plus an
// independent verify_certificate pass over each witness).
//
// Checkpointing appends "key<TAB>status" lines: one per counterexample and a
// progress line every 10^4 candidates. A restart replays the stream without
// re-checking until it passes the last recorded key.
inline SearchReport run_search(SatKind kind, const SearchSpace& space, std::uint64_t seed,
                               const SearchLimits& limits = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  SearchReport rep;
  rep.seed = seed;
  detail::CandidateGen gen(space, seed, limits.max_instances);

  const bool need_keys = space.dedupe || !limits.checkpoint_path.empty();

  std::optional<std::string> resume_key;
  if (!limits.checkpoint_path.empty()) {
    std::ifstream in(limits.checkpoint_path);
    std::string line, last;
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    if (!last.empty()) resume_key = last.substr(0, last.find('\t'));
  }
  std::ofstream ckpt;
  if (!limits.checkpoint_path.empty()) {
    ckpt.open(limits.checkpoint_path, std::ios::app);
    if (!ckpt) throw PbError("cannot open checkpoint file: " + limits.checkpoint_path);
  }

  CoreOptions copts;
  copts.max_projects = limits.max_projects;
  copts.compare = limits.compare;

  std::unordered_set<std::string> seen;
  std::vector<std::pair<Election, std::string>> block;
  const std::size_t block_cap = std::max<std::size_t>(1, std::size_t{limits.threads} * 4);

  auto check_block = [&] {
    if (block.empty()) return;
    std::vector<std::optional<CoreVerdict>> verdicts(block.size());
    std::vector<bool> indeterminate(block.size(), false);
    std::vector<std::exception_ptr> errors(block.size());
    auto run_one = [&](std::size_t i) {
      try {
        verdicts[i] = core_empty(kind, block[i].first, copts);
      } catch (const IndeterminateComparison&) {
        indeterminate[i] = true;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    };
    if (limits.threads <= 1 || block.size() == 1) {
      for (std::size_t i = 0; i < block.size(); ++i) run_one(i);
    } else {
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= block.size()) return;
          run_one(i);
        }
      };
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < limits.threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < block.size(); ++i) {
      ++rep.examined;
      if (errors[i]) std::rethrow_exception(errors[i]);
      if (indeterminate[i]) {
        ++rep.indeterminate;
        continue;
      }
      if (!verdicts[i]->empty()) continue;
      // full independent re-verification before reporting
      const Election& found = block[i].first;
      CoreVerdict recheck = core_empty(kind, found, copts);
      if (!recheck.empty())
        throw PbError("internal error: counterexample did not re-verify");
      for (const auto& [mask, cert] : recheck.witnesses)
        if (!verify_certificate(kind, found, Allocation::of(found, mask), cert, copts.compare))
          throw PbError("internal error: counterexample certificate did not re-verify");
      if (ckpt.is_open()) ckpt << block[i].second << "\tcounterexample\n" << std::flush;
      rep.counterexamples.push_back({found, std::move(recheck)});
    }
    block.clear();
  };

  bool fast_forward = resume_key.has_value();
  gen.set_replay(fast_forward);
  std::uint64_t stream_position = 0;
  std::string last_key;
  for (;;) {
    std::optional<Election> cand = gen.next(rep);
    if (!cand) break;
    ++stream_position;
    std::string key = need_keys ? canonical_key(*cand) : std::string();
    if (!key.empty()) last_key = key;

    if (fast_forward) {
      // replay without re-checking; rebuild the dedupe set as we go
      if (space.dedupe) seen.insert(key);
      if (key == *resume_key) {
        fast_forward = false;
        gen.set_replay(false);
      }
      continue;
    }

    if (space.dedupe && !seen.insert(key).second) {
      ++rep.skipped_isomorphic;
    } else {
      block.emplace_back(std::move(*cand), key);
      if (block.size() >= block_cap) check_block();
    }
    if (ckpt.is_open() && stream_position % 10000 == 0) {
      check_block();
      ckpt << last_key << "\tprogress\n" << std::flush;
    }
  }
  check_block();
  if (fast_forward)
    throw InvalidParameters("checkpoint does not match this search space: key not found");

  rep.limit_hit = gen.truncated() && limits.max_instances > 0;
  rep.duration_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();
  return rep;
}

}  // namespace pbcore
