#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "pbcore/core.hpp"
#include "pbcore/json_io.hpp"
#include "pbcore/paperlab.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace pbcore;

namespace {

Allocation alloc(const Election& e, std::vector<std::string> ids) {
  return Allocation::of_ids(e, std::span<const std::string>(ids));
}

VoterMask voters_of(const Election& e, std::vector<std::string> ids) {
  VoterMask m = 0;
  for (const std::string& id : ids) m |= VoterMask{1} << e.require_voter(id);
  return m;
}

}  // namespace

TEST_CASE("budget share is the exact coalition entitlement") {
  Election thm1 = build_thm1();
  CHECK(budget_share(thm1, 2) == Rat(10));
  CHECK(budget_share(thm1, 3) == thm1.budget());
  CHECK(budget_share(build_thm3(), 1) == Rat(7));
  CHECK_THROWS_AS(budget_share(thm1, 0), InvalidParameters);
  CHECK_THROWS_AS(budget_share(thm1, 4), InvalidParameters);
}

TEST_CASE("find_blocking returns the lexicographically first certificate") {
  Election thm1 = build_thm1();

  SECTION("no joint project funded: a pair grabs a joint project") {
    auto cert = find_blocking(SatKind::Cost, thm1, alloc(thm1, {"l1", "s1", "l2"}));
    REQUIRE(cert.has_value());
    CHECK(cert->coalition == voters_of(thm1, {"1", "2"}));
    CHECK(cert->deviation == thm1.mask_of_ids(std::vector<std::string>{"p12"}));
    REQUIRE(cert->members.size() == 2);
    CHECK(cert->members[0].before.exact_value() == Rat(7));
    CHECK(cert->members[0].after.exact_value() == Rat(8));
    CHECK(cert->members[1].before.exact_value() == Rat(5));
    CHECK(cert->members[1].after.exact_value() == Rat(8));
  }
  SECTION("joint plus large funded: the starved pair deviates") {
    auto cert = find_blocking(SatKind::Cost, thm1, alloc(thm1, {"p12", "l3", "s2"}));
    REQUIRE(cert.has_value());
    CHECK(cert->coalition == voters_of(thm1, {"1", "3"}));
    CHECK(cert->deviation == thm1.mask_of_ids(std::vector<std::string>{"p13", "s1"}));
  }
  SECTION("a voter alone at their optimum is never blocked") {
    RawElection raw{Rat(5), {{"p", Rat(5)}}, {{"1", {"p"}}}};
    Election e = Election::make(raw);
    CHECK_FALSE(find_blocking(SatKind::Cost, e, alloc(e, {"p"})).has_value());
    CHECK(in_core(SatKind::Cost, e, alloc(e, {"p"})));
  }
}

TEST_CASE("in_core on the bundled instances") {
  Election thm1 = build_thm1();
  for (Mask m : exhaustive_masks(thm1))
    CHECK_FALSE(in_core(SatKind::Cost, thm1, Allocation::of(thm1, m)));

  Election thm3 = build_thm3();
  CHECK_FALSE(in_core(SatKind::Share, thm3, alloc(thm3, {"p12", "l3", "s3", "l1"})));
}

TEST_CASE("core_empty on the bundled instances") {
  Election thm1 = build_thm1();
  CoreVerdict verdict = core_empty(SatKind::Cost, thm1);
  CHECK(verdict.empty());
  CHECK(verdict.witnesses.size() == 43);
  CHECK(verdict.allocations_checked == 43);

  CoreVerdict share3 = core_empty(SatKind::Share, build_thm3());
  CHECK(share3.empty());
}

TEST_CASE("core_empty finds an allocation nobody can block") {
  // two voters approving disjoint unit-cost singletons, budget 2
  Election e = Election::unit_cost(2, 2, {{0}, {1}});
  CoreVerdict verdict = core_empty(SatKind::Cost, e);
  REQUIRE_FALSE(verdict.empty());
  CHECK(*verdict.in_core == 0b11);
}

TEST_CASE("core_empty enforces the enumeration guard") {
  Election thm1 = build_thm1();
  CoreOptions opts;
  opts.max_projects = 5;
  CHECK_THROWS_AS(core_empty(SatKind::Cost, thm1, opts), EnumerationLimitExceeded);
}

TEST_CASE("verify_certificate re-derives everything") {
  Election thm1 = build_thm1();
  Allocation pi = alloc(thm1, {"l1", "s1", "l2"});

  BlockingCertificate cert;
  cert.coalition = voters_of(thm1, {"1", "2"});
  cert.deviation = thm1.mask_of_ids(std::vector<std::string>{"p12"});
  CHECK(verify_certificate(SatKind::Cost, thm1, pi, cert).ok());

  SECTION("a singleton coalition cannot afford the joint project") {
    cert.coalition = voters_of(thm1, {"1"});
    auto check = verify_certificate(SatKind::Cost, thm1, pi, cert);
    CHECK(check.status == CertStatus::BudgetShareViolated);
  }
  SECTION("a deviation that leaves a member flat is rejected") {
    cert.deviation = thm1.mask_of_ids(std::vector<std::string>{"s1"});
    auto check = verify_certificate(SatKind::Cost, thm1, pi, cert);
    CHECK(check.status == CertStatus::MemberNotImproved);
  }
  SECTION("structural corruption") {
    cert.coalition = 0;
    CHECK(verify_certificate(SatKind::Cost, thm1, pi, cert).status ==
          CertStatus::EmptyCoalition);
    cert.coalition = VoterMask{1} << 10;
    CHECK(verify_certificate(SatKind::Cost, thm1, pi, cert).status == CertStatus::UnknownVoter);
    cert.coalition = voters_of(thm1, {"1", "2"});
    cert.deviation = Mask{1} << 20;
    CHECK(verify_certificate(SatKind::Cost, thm1, pi, cert).status == CertStatus::UnknownProject);
  }
  SECTION("empty deviation never improves anyone") {
    cert.deviation = 0;
    CHECK(verify_certificate(SatKind::Cost, thm1, pi, cert).status ==
          CertStatus::MemberNotImproved);
  }
}

TEST_CASE("every emitted certificate passes independent verification") {
  Election thm1 = build_thm1();
  for (SatKind k : {SatKind::Cost, SatKind::Share, SatKind::SumLog, SatKind::GlobalSqrt}) {
    CoreVerdict verdict = core_empty(k, thm1);
    for (const auto& [mask, cert] : verdict.witnesses) {
      auto check = verify_certificate(k, thm1, Allocation::of(thm1, mask), cert);
      REQUIRE(check.ok());
    }
  }
}

TEST_CASE("pruned search agrees with the brute-force oracle") {
  std::mt19937_64 rng(13371337);
  for (int round = 0; round < 30; ++round) {
    Election e = gen::random_election(rng);
    for (SatKind k : kAllSatKinds) {
      // blocking pairs match the oracle exactly, allocation by allocation
      auto feasible = feasible_masks(e);
      for (int t = 0; t < 4; ++t) {
        Mask pi = feasible[rng() % feasible.size()];
        auto lib = find_blocking(k, e, Allocation::of(e, pi));
        auto ref = oracle::find_blocking(k, e, pi);
        REQUIRE(lib.has_value() == ref.has_value());
        if (lib) {
          REQUIRE(lib->coalition == ref->first);
          REQUIRE(lib->deviation == ref->second);
        }
      }
      // emptiness verdicts agree between pruned, naive and oracle paths
      CoreVerdict pruned = core_empty(k, e);
      CoreVerdict naive = core_empty(k, e, naive_options());
      oracle::CoreResult ref = oracle::core_check(k, e);
      REQUIRE(pruned.empty() == naive.empty());
      REQUIRE(naive.empty() == !ref.in_core.has_value());
      if (!naive.empty()) REQUIRE(*naive.in_core == *ref.in_core);
    }
  }
}

TEST_CASE("the naive mode restricted to exhaustive allocations matches") {
  std::mt19937_64 rng(909090);
  for (int round = 0; round < 10; ++round) {
    Election e = gen::random_election(rng);
    for (SatKind k : {SatKind::Cost, SatKind::Cardinality, SatKind::Share, SatKind::SumSqrt}) {
      CoreVerdict pruned = core_empty(k, e);
      CoreVerdict naive = core_empty(k, e, naive_options());
      if (!pruned.empty()) continue;
      // every pruned witness appears identically in the naive witness map
      std::size_t found = 0;
      for (const auto& [mask, cert] : naive.witnesses)
        for (const auto& [pmask, pcert] : pruned.witnesses)
          if (mask == pmask) {
            ++found;
            REQUIRE(cert.coalition == pcert.coalition);
            REQUIRE(cert.deviation == pcert.deviation);
          }
      REQUIRE(found == pruned.witnesses.size());
    }
  }
}

TEST_CASE("indeterminate comparisons surface instead of deciding verdicts") {
  // sqrt(1) + sqrt(1) = sqrt(4): the improvement comparison can never resolve
  RawElection raw{Rat(4), {{"a", Rat(4)}, {"b", Rat(1)}, {"c", Rat(1)}},
                  {{"1", {"a", "b", "c"}}}};
  Election e = Election::make(raw);
  Allocation standing = alloc(e, {"a"});

  CHECK_THROWS_AS(find_blocking(SatKind::SumSqrt, e, standing), IndeterminateComparison);
  CHECK_THROWS_AS(core_empty(SatKind::SumSqrt, e), IndeterminateComparison);

  BlockingCertificate cert;
  cert.coalition = 0b1;
  cert.deviation = e.mask_of_ids(std::vector<std::string>{"b", "c"});
  auto check = verify_certificate(SatKind::SumSqrt, e, standing, cert);
  CHECK(check.status == CertStatus::Indeterminate);
}

TEST_CASE("verdicts are deterministic and thread-count independent") {
  Election thm1 = build_thm1();
  for (SatKind k : {SatKind::Cost, SatKind::Cardinality}) {
    CoreVerdict a = core_empty(k, thm1);
    CoreVerdict b = core_empty(k, thm1);
    CoreOptions parallel;
    parallel.threads = 4;
    CoreVerdict c = core_empty(k, thm1, parallel);
    Json ja = verdict_to_json(thm1, a);
    CHECK(ja == verdict_to_json(thm1, b));
    CHECK(ja == verdict_to_json(thm1, c));
  }
}

TEST_CASE("relabeling voters and projects permutes the blocked allocations") {
  Election thm1 = build_thm1();
  // reversed project order, renamed voters
  RawElection raw = thm1.to_raw();
  std::reverse(raw.projects.begin(), raw.projects.end());
  std::swap(raw.voters[0], raw.voters[2]);
  Election permuted = Election::make(raw);

  CoreVerdict a = core_empty(SatKind::Cost, thm1);
  CoreVerdict b = core_empty(SatKind::Cost, permuted);
  REQUIRE(a.empty());
  REQUIRE(b.empty());
  REQUIRE(a.witnesses.size() == b.witnesses.size());

  const std::size_t m = thm1.project_count();
  auto relabel = [&](Mask mask) {
    Mask out = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & bit(i)) out |= bit(m - 1 - i);
    return out;
  };
  std::vector<Mask> blocked_a, blocked_b;
  for (const auto& [mask, cert] : a.witnesses) blocked_a.push_back(relabel(mask));
  for (const auto& [mask, cert] : b.witnesses) blocked_b.push_back(mask);
  std::sort(blocked_a.begin(), blocked_a.end());
  std::sort(blocked_b.begin(), blocked_b.end());
  CHECK(blocked_a == blocked_b);
}
