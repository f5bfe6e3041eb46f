#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "pbcore/election.hpp"
#include "pbcore/paperlab.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace pbcore;

namespace {

bool has_violation(const std::vector<Violation>& vs, ViolationKind kind,
                   const std::string& subject) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) {
    return v.kind == kind && v.subject == subject;
  });
}

}  // namespace

TEST_CASE("validation accepts the bundled instance") {
  RawElection raw = build_thm1().to_raw();
  CHECK(Election::validate(raw).empty());
}

TEST_CASE("validation reports every violated invariant") {
  SECTION("project exceeding the budget") {
    RawElection raw{Rat(15), {{"big", Rat(16)}}, {{"1", {"big"}}}};
    auto vs = Election::validate(raw);
    REQUIRE(vs.size() == 1);
    CHECK(has_violation(vs, ViolationKind::ProjectExceedsBudget, "big"));
  }
  SECTION("approval of a nonexistent project") {
    RawElection raw{Rat(10), {{"a", Rat(1)}}, {{"1", {"x"}}}};
    auto vs = Election::validate(raw);
    CHECK(has_violation(vs, ViolationKind::UnknownApprovedProject, "x"));
  }
  SECTION("duplicate ids") {
    RawElection raw{Rat(10), {{"a", Rat(1)}, {"a", Rat(2)}}, {{"1", {}}, {"1", {}}}};
    auto vs = Election::validate(raw);
    CHECK(has_violation(vs, ViolationKind::DuplicateId, "a"));
    CHECK(has_violation(vs, ViolationKind::DuplicateId, "1"));
  }
  SECTION("empty election") {
    RawElection raw{Rat(10), {}, {}};
    auto vs = Election::validate(raw);
    CHECK(has_violation(vs, ViolationKind::EmptyElection, "election"));
  }
  SECTION("nonpositive cost and budget") {
    RawElection raw{Rat(0), {{"a", Rat(0)}}, {{"1", {}}}};
    auto vs = Election::validate(raw);
    CHECK(has_violation(vs, ViolationKind::NonPositiveCost, "budget"));
    CHECK(has_violation(vs, ViolationKind::NonPositiveCost, "a"));
  }
  SECTION("multiple violations are all reported") {
    RawElection raw{Rat(5), {{"a", Rat(6)}, {"a", Rat(1)}}, {{"1", {"zzz"}}}};
    auto vs = Election::validate(raw);
    CHECK(vs.size() >= 3);
    CHECK_THROWS_AS(Election::make(raw), ValidationError);
  }
}

TEST_CASE("total_cost is exact") {
  Election thm1 = build_thm1();
  std::vector<std::string> ids = {"p12", "l3"};
  CHECK(thm1.total_cost(ids) == Rat(13));
  CHECK(thm1.total_cost(Mask{0}) == Rat(0));

  Election thm3 = build_thm3();
  std::vector<std::string> ids3 = {"p13", "l1"};
  CHECK(thm3.total_cost(ids3) == Rat(14));

  std::vector<std::string> bad = {"nope"};
  CHECK_THROWS_AS(thm1.total_cost(bad), UnknownProject);
}

TEST_CASE("feasibility and exhaustiveness") {
  Election thm1 = build_thm1();
  std::vector<std::string> full{"p12", "l3", "s1"};
  Mask m = thm1.mask_of_ids(full);
  CHECK(thm1.is_feasible(m));
  CHECK(thm1.is_exhaustive(m));

  std::vector<std::string> two_joints{"p12", "p13"};
  Mask j = thm1.mask_of_ids(two_joints);
  CHECK_FALSE(thm1.is_feasible(j));
  CHECK_FALSE(thm1.is_exhaustive(j));

  CHECK(thm1.is_feasible(0));
  CHECK_FALSE(thm1.is_exhaustive(0));
}

TEST_CASE("enumeration order and tiny fixed cases") {
  SECTION("two unit-cost projects, budget 1") {
    Election e = Election::unit_cost(2, 1, {{0, 1}});
    CHECK(feasible_masks(e) == std::vector<Mask>{0b00, 0b01, 0b10});
    CHECK(exhaustive_masks(e) == std::vector<Mask>{0b01, 0b10});
  }
  SECTION("single project costing the whole budget") {
    RawElection raw{Rat(7), {{"p", Rat(7)}}, {{"1", {"p"}}}};
    Election e = Election::make(raw);
    CHECK(feasible_masks(e) == std::vector<Mask>{0, 1});
    CHECK(exhaustive_masks(e) == std::vector<Mask>{1});
  }
}

TEST_CASE("enumeration agrees with the power-set oracle") {
  Election thm1 = build_thm1();
  auto feasible = feasible_masks(thm1);
  CHECK(feasible == oracle::feasible_sets(thm1));
  CHECK(feasible.size() == 114);

  auto exhaustive = exhaustive_masks(thm1);
  CHECK(exhaustive == oracle::exhaustive_sets(thm1));
  CHECK(exhaustive.size() == 43);

  CHECK(std::is_sorted(feasible.begin(), feasible.end()));
}

TEST_CASE("enumeration properties on random elections") {
  std::mt19937_64 rng(987654321);
  gen::Options opt;
  opt.max_projects = 6;
  for (int round = 0; round < 60; ++round) {
    Election e = gen::random_election(rng, opt);
    auto feasible = feasible_masks(e);
    REQUIRE(feasible == oracle::feasible_sets(e));
    REQUIRE(exhaustive_masks(e) == oracle::exhaustive_sets(e));

    // monotone closure: subsets of feasible sets are feasible
    for (int k = 0; k < 20; ++k) {
      Mask sup = feasible[rng() % feasible.size()];
      Mask sub = sup & static_cast<Mask>(rng());
      REQUIRE(e.is_feasible(sub));
    }
    // additivity over disjoint splits
    Mask all = e.all_projects_mask();
    for (int k = 0; k < 10; ++k) {
      Mask a = static_cast<Mask>(rng()) & all;
      Mask b = all & ~a;
      REQUIRE(e.total_cost(a) + e.total_cost(b) == e.total_cost(all));
    }
    for (Mask m : exhaustive_masks(e)) REQUIRE(e.is_feasible(m));
  }
}

TEST_CASE("allocations check feasibility at construction") {
  Election thm1 = build_thm1();
  std::vector<std::string> over{"p12", "p13"};
  CHECK_THROWS_AS(Allocation::of_ids(thm1, over), InvalidParameters);
  std::vector<std::string> ok{"p12", "l3", "s1"};
  CHECK(Allocation::of_ids(thm1, ok).mask() == thm1.mask_of_ids(ok));
  CHECK_THROWS_AS(Allocation::of(thm1, Mask{1} << 60), UnknownProject);
}

TEST_CASE("structural equality and raw round-trip") {
  Election a = build_thm1();
  Election b = Election::make(a.to_raw());
  CHECK(a == b);
  CHECK_FALSE(a == build_thm3());
}

TEST_CASE("unit-cost constructor") {
  Election e = Election::unit_cost(3, 2, {{0, 1}, {2}});
  CHECK(e.project_count() == 3);
  CHECK(e.voter_count() == 2);
  CHECK(e.budget() == Rat(2));
  for (std::size_t i = 0; i < 3; ++i) CHECK(e.project(i).cost == Rat(1));
  CHECK(e.approval_mask(0) == 0b011);
  CHECK(e.approval_mask(1) == 0b100);
  CHECK_THROWS_AS(Election::unit_cost(2, 1, {{5}}), InvalidParameters);
}
