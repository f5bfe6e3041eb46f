#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbcore/core.hpp"
#include "pbcore/election.hpp"
#include "pbcore/paperlab.hpp"
#include "pbcore/search.hpp"

namespace pbcore {

// ordered_json keeps insertion order, so identical data always serializes to
// identical bytes.
using Json = nlohmann::ordered_json;

namespace detail {

inline std::vector<std::string> sorted_ids(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace detail

// Native election format. Rationals are strings ("15", "1/2" or a decimal)
// and round-trip bit-exactly.
inline Json election_to_json(const Election& e) {
  Json j;
  j["budget"] = rat_str(e.budget());
  Json projects = Json::array();
  for (const Project& p : e.projects()) projects.push_back({{"id", p.id}, {"cost", rat_str(p.cost)}});
  j["projects"] = std::move(projects);
  Json voters = Json::array();
  for (std::size_t v = 0; v < e.voter_count(); ++v)
    voters.push_back({{"id", e.voter_id(v)}, {"approves", e.ids_of_mask(e.approval_mask(v))}});
  j["voters"] = std::move(voters);
  return j;
}

inline RawElection election_from_json(const Json& j) {
  auto rational_field = [](const Json& v, const std::string& what) -> Rat {
    if (v.is_string()) return parse_rat(v.get<std::string>());
    if (v.is_number_integer()) return Rat(static_cast<long>(v.get<std::int64_t>()));
    throw ParseError(what + " must be a rational string (floating point is not accepted)");
  };
  if (!j.is_object()) throw ParseError("election must be a JSON object");
  if (!j.contains("budget") || !j.contains("projects") || !j.contains("voters"))
    throw ParseError("election needs 'budget', 'projects' and 'voters' fields");
  RawElection raw;
  raw.budget = rational_field(j.at("budget"), "budget");
  if (!j.at("projects").is_array()) throw ParseError("'projects' must be an array");
  for (const Json& p : j.at("projects")) {
    if (!p.is_object() || !p.contains("id") || !p.contains("cost"))
      throw ParseError("each project needs 'id' and 'cost'");
    raw.projects.push_back(
        {p.at("id").get<std::string>(), rational_field(p.at("cost"), "project cost")});
  }
  if (!j.at("voters").is_array()) throw ParseError("'voters' must be an array");
  for (const Json& v : j.at("voters")) {
    if (!v.is_object() || !v.contains("id") || !v.contains("approves"))
      throw ParseError("each voter needs 'id' and 'approves'");
    RawVoter voter{v.at("id").get<std::string>(), {}};
    for (const Json& a : v.at("approves")) voter.approves.push_back(a.get<std::string>());
    raw.voters.push_back(std::move(voter));
  }
  return raw;
}

inline RawElection load_raw_election(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("invalid JSON in " + path + ": " + ex.what());
  }
  return election_from_json(j);
}

inline Election load_election(const std::string& path) {
  return Election::make(load_raw_election(path));
}

inline void save_election(const std::string& path, const Election& e) {
  std::ofstream out(path);
  if (!out) throw PbError("cannot write file: " + path);
  out << election_to_json(e).dump(2) << "\n";
}

// Exact values serialize as rational strings; interval values as an enclosure
// evaluated at the given precision.
inline Json sat_value_to_json(const SatValue& v, unsigned bits = 64) {
  if (v.is_exact()) return Json{{"type", "exact"}, {"value", rat_str(v.exact_value())}};
  RatInterval enc = v.enclosure(bits);
  return Json{{"type", "interval"},
              {"lo", rat_str(enc.lo)},
              {"hi", rat_str(enc.hi)},
              {"precision_bits", enc.bits}};
}

inline Json certificate_to_json(const Election& e, const BlockingCertificate& cert) {
  Json j;
  std::vector<std::string> coalition;
  for (std::size_t v = 0; v < e.voter_count(); ++v)
    if (cert.coalition & (VoterMask{1} << v)) coalition.push_back(e.voter_id(v));
  j["coalition"] = detail::sorted_ids(std::move(coalition));
  j["deviation"] = detail::sorted_ids(e.ids_of_mask(cert.deviation));
  Json members = Json::array();
  for (const MemberComparison& m : cert.members)
    members.push_back({{"voter", e.voter_id(m.voter)},
                       {"before", sat_value_to_json(m.before)},
                       {"after", sat_value_to_json(m.after)}});
  j["members"] = std::move(members);
  return j;
}

inline Json verdict_to_json(const Election& e, const CoreVerdict& v,
                            bool include_witnesses = true) {
  Json j;
  j["verdict"] = v.empty() ? "empty" : "in_core";
  j["allocations_checked"] = v.allocations_checked;
  if (!v.empty()) {
    j["in_core_allocation"] = detail::sorted_ids(e.ids_of_mask(*v.in_core));
  } else if (include_witnesses) {
    Json witnesses = Json::array();
    for (const auto& [mask, cert] : v.witnesses)
      witnesses.push_back({{"allocation", detail::sorted_ids(e.ids_of_mask(mask))},
                           {"certificate", certificate_to_json(e, cert)}});
    j["witnesses"] = std::move(witnesses);
  } else {
    j["blocked_allocations"] = v.witnesses.size();
  }
  return j;
}

inline Json condition_report_to_json(const ConditionReport& r) {
  Json j;
  j["passed"] = r.passed;
  j["pairs_checked"] = r.pairs_checked;
  if (r.witness)
    j["witness"] = Json{{"first", r.witness->first}, {"second", r.witness->second}};
  else
    j["witness"] = nullptr;
  return j;
}

inline Json theorem_report_to_json(const TheoremReport& rep, bool include_witnesses = false) {
  Json j;
  j["theorem"] = rep.theorem;
  j["sat"] = sat_kind_name(rep.kind);
  j["b"] = rep.b ? Json(rat_str(*rep.b)) : Json(nullptr);
  j["eps"] = rep.eps ? Json(rat_str(*rep.eps)) : Json(nullptr);
  if (rep.theorem == 2) {
    Json c;
    c["condition1"] = rep.condition1 ? condition_report_to_json(*rep.condition1) : Json(nullptr);
    c["condition2"] = rep.condition2 ? condition_report_to_json(*rep.condition2) : Json(nullptr);
    c["condition3"] = rep.condition3 ? Json(*rep.condition3) : Json(nullptr);
    c["condition4"] = rep.condition4 ? Json(*rep.condition4) : Json(nullptr);
    j["conditions"] = std::move(c);
  }
  j["failed_condition"] = rep.failed_condition ? Json(*rep.failed_condition) : Json(nullptr);
  if (rep.verdict) {
    j["verdict"] = verdict_to_json(rep.election, *rep.verdict, include_witnesses);
    Json families;
    for (const auto& [family, count] : rep.witness_families)
      families[witness_family_name(family)] = count;
    j["witness_families"] = std::move(families);
  } else {
    j["verdict"] = nullptr;
  }
  j["duration_ms"] = rep.duration_ms;
  return j;
}

// Deliberately omits the wall-clock duration: two runs with the same inputs
// must produce byte-identical reports.
inline Json search_report_to_json(const SearchReport& rep, bool include_witnesses = true) {
  Json j;
  j["seed"] = rep.seed;
  j["enumerated"] = rep.enumerated;
  j["invalid"] = rep.invalid;
  j["skipped_isomorphic"] = rep.skipped_isomorphic;
  j["examined"] = rep.examined;
  j["indeterminate"] = rep.indeterminate;
  j["limit_hit"] = rep.limit_hit;
  Json cs = Json::array();
  for (const Counterexample& c : rep.counterexamples)
    cs.push_back({{"election", election_to_json(c.election)},
                  {"verdict", verdict_to_json(c.election, c.verdict, include_witnesses)}});
  j["counterexamples"] = std::move(cs);
  return j;
}

}  // namespace pbcore
