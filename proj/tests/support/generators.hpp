#pragma once

// Deterministic random-election generators for property tests.

#include <random>
#include <string>
#include <vector>

#include "pbcore/pbcore.hpp"

namespace gen {

using namespace pbcore;

struct Options {
  std::size_t max_voters = 3;
  std::size_t max_projects = 5;
  // Cost grid chosen so that interval-kind comparisons always terminate:
  // 1+c are distinct primes (sum-log products separate multisets) and the
  // costs have distinct squarefree parts (sum-sqrt values do too).
  std::vector<Rat> costs = {Rat(1), Rat(2), Rat(6), Rat(10)};
  std::vector<Rat> budgets = {Rat(10), Rat(11), Rat(15), Rat(21)};
  bool every_project_approved = false;
};

inline Election random_election(std::mt19937_64& rng, const Options& opt = {}) {
  const std::size_t n = 1 + rng() % opt.max_voters;
  const std::size_t m = 1 + rng() % opt.max_projects;
  RawElection raw;
  raw.budget = opt.budgets[rng() % opt.budgets.size()];
  for (std::size_t i = 0; i < m; ++i) {
    Rat cost = opt.costs[rng() % opt.costs.size()];
    while (cost > raw.budget) cost = opt.costs[rng() % opt.costs.size()];
    raw.projects.push_back({"p" + std::to_string(i + 1), cost});
  }
  std::vector<Mask> ballots(n, 0);
  for (std::size_t v = 0; v < n; ++v) ballots[v] = rng() & ((Mask{1} << m) - 1);
  if (opt.every_project_approved)
    for (std::size_t i = 0; i < m; ++i) {
      bool approved = false;
      for (Mask b : ballots) approved = approved || (b & bit(i));
      if (!approved) ballots[i % n] |= bit(i);
    }
  for (std::size_t v = 0; v < n; ++v) {
    RawVoter voter{"v" + std::to_string(v + 1), {}};
    for (std::size_t i = 0; i < m; ++i)
      if (ballots[v] & bit(i)) voter.approves.push_back(raw.projects[i].id);
    raw.voters.push_back(std::move(voter));
  }
  return Election::make(raw);
}

}  // namespace gen
