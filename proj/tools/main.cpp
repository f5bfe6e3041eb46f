// Command-line front end: core membership/emptiness checks, verification of
// the bundled counterexample theorems, counterexample search, and format
// conversion.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbcore/pbcore.hpp"

namespace {

using namespace pbcore;

constexpr int kExitOk = 0;
constexpr int kExitNegativeVerdict = 1;
constexpr int kExitInputError = 2;
constexpr int kExitIndeterminate = 3;
constexpr int kExitLimits = 4;

std::string join(const std::vector<std::string>& parts, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<Rat> parse_rat_list(const std::string& s) {
  std::vector<Rat> out;
  for (const std::string& item : split_commas(s)) out.push_back(parse_rat(item));
  return out;
}

std::string sat_value_str(const SatValue& v) {
  if (v.is_exact()) return rat_str(v.exact_value());
  RatInterval enc = v.enclosure(64);
  char buf[40];
  std::snprintf(buf, sizeof buf, "~%.6g", (enc.lo.get_d() + enc.hi.get_d()) / 2);
  return buf;
}

std::string certificate_str(const Election& e, const BlockingCertificate& cert) {
  std::vector<std::string> coalition;
  for (std::size_t v = 0; v < e.voter_count(); ++v)
    if (cert.coalition & (VoterMask{1} << v)) coalition.push_back(e.voter_id(v));
  std::string out =
      "coalition {" + join(coalition) + "} deviates to {" + join(e.ids_of_mask(cert.deviation)) + "}:";
  for (const MemberComparison& m : cert.members)
    out += " voter " + e.voter_id(m.voter) + ": " + sat_value_str(m.before) + " -> " +
           sat_value_str(m.after) + ";";
  return out;
}

SatKind require_sat_kind(const std::string& name) {
  auto kind = parse_sat_kind(name);
  if (!kind)
    throw InvalidParameters("unknown satisfaction kind '" + name +
                            "' (use cost, card, cc, share, sumlog, sumsqrt, log, sqrt)");
  return *kind;
}

struct CheckArgs {
  std::string instance;
  std::string sat;
  std::string allocation;
  bool all = false;
  bool naive = false;
  bool expect = false;
  bool json = false;
  unsigned threads = 1;
  std::size_t max_projects = 20;
};

int run_check(const CheckArgs& args) {
  Election e = load_election(args.instance);
  SatKind kind = require_sat_kind(args.sat);
  CoreOptions opts = args.naive ? naive_options() : CoreOptions{};
  opts.threads = args.threads;
  opts.max_projects = args.max_projects;

  if (!args.allocation.empty()) {
    std::vector<std::string> ids = split_commas(args.allocation);
    Allocation pi = Allocation::of_ids(e, ids);
    auto cert = find_blocking(kind, e, pi, opts);
    if (args.json) {
      Json j;
      j["sat"] = sat_kind_name(kind);
      j["allocation"] = e.ids_of_mask(pi.mask());
      j["in_core"] = !cert.has_value();
      j["certificate"] = cert ? certificate_to_json(e, *cert) : Json(nullptr);
      std::cout << j.dump(2) << "\n";
    } else if (cert) {
      std::cout << "BLOCKED: {" << join(e.ids_of_mask(pi.mask())) << "} is not in core["
                << sat_kind_name(kind) << "]\n  " << certificate_str(e, *cert) << "\n";
    } else {
      std::cout << "IN CORE: {" << join(e.ids_of_mask(pi.mask())) << "} is in core["
                << sat_kind_name(kind) << "]\n";
    }
    if (args.expect && cert) return kExitNegativeVerdict;
    return kExitOk;
  }

  CoreVerdict verdict = core_empty(kind, e, opts);
  if (args.json) {
    Json j = verdict_to_json(e, verdict);
    j["sat"] = sat_kind_name(kind);
    std::cout << j.dump(2) << "\n";
  } else {
    const std::size_t m = e.project_count();
    std::cout << "scanned " << verdict.allocations_checked << " of "
              << (m < 64 ? std::to_string(Mask{1} << m) : "2^64") << " subsets ("
              << (args.naive ? "all feasible" : "exhaustive only") << ")\n";
    if (verdict.empty()) {
      std::cout << "CORE EMPTY under " << sat_kind_name(kind) << "\n";
      for (const auto& [mask, cert] : verdict.witnesses)
        std::cout << "  {" << join(e.ids_of_mask(mask)) << "}: " << certificate_str(e, cert)
                  << "\n";
    } else {
      std::cout << "CORE NONEMPTY under " << sat_kind_name(kind) << ": {"
                << join(e.ids_of_mask(*verdict.in_core)) << "} admits no blocking coalition\n";
    }
  }
  if (args.expect && verdict.empty()) return kExitNegativeVerdict;
  return kExitOk;
}

struct VerifyArgs {
  int theorem = 0;
  std::string sat;
  std::string b, eps;
  bool witnesses = false;
  bool json = false;
  unsigned threads = 1;
};

int run_verify_paper(const VerifyArgs& args) {
  std::optional<SatKind> kind;
  if (!args.sat.empty()) kind = require_sat_kind(args.sat);
  std::optional<Rat> b, eps;
  if (!args.b.empty()) b = parse_rat(args.b);
  if (!args.eps.empty()) eps = parse_rat(args.eps);
  CoreOptions opts;
  opts.threads = args.threads;

  TheoremReport rep = verify_theorem(args.theorem, kind, b, eps, opts);
  if (args.json) {
    std::cout << theorem_report_to_json(rep, args.witnesses).dump(2) << "\n";
    return kExitOk;
  }

  std::cout << "theorem " << rep.theorem << " (sat=" << sat_kind_name(rep.kind);
  if (rep.b) std::cout << ", b=" << rat_str(*rep.b) << ", eps=" << rat_str(*rep.eps);
  std::cout << ")\n";
  if (rep.theorem == 2) {
    auto cond_str = [](const std::optional<ConditionReport>& r) {
      return !r ? "skipped" : r->passed ? "pass" : "FAIL";
    };
    std::cout << "  condition 1 (strict inclusion monotonicity): " << cond_str(rep.condition1)
              << "\n";
    if (rep.condition1 && rep.condition1->witness)
      std::cout << "    witness: {" << join(rep.condition1->witness->first) << "} vs {"
                << join(rep.condition1->witness->second) << "}\n";
    std::cout << "  condition 2 (cost monotonicity on singletons): " << cond_str(rep.condition2)
              << "\n";
    if (rep.condition2 && rep.condition2->witness)
      std::cout << "    witness: {" << join(rep.condition2->witness->first) << "} vs {"
                << join(rep.condition2->witness->second) << "}\n";
    auto bool_str = [](const std::optional<bool>& v) {
      return !v ? "skipped" : *v ? "pass" : "FAIL";
    };
    std::cout << "  condition 3 (2b/3 - eps > b/2): " << bool_str(rep.condition3) << "\n";
    std::cout << "  condition 4 (cheap pair below the expensive project): "
              << bool_str(rep.condition4) << "\n";
  }
  if (rep.failed_condition) {
    std::cout << "ConditionFailed(" << *rep.failed_condition
              << "): the core check was not attempted\n";
    return kExitOk;
  }
  const CoreVerdict& v = *rep.verdict;
  if (v.empty()) {
    std::cout << "core[" << sat_kind_name(rep.kind) << "] EMPTY: all " << v.allocations_checked
              << " exhaustive allocations are blocked [" << rep.duration_ms << " ms]\n";
    std::cout << "  witness families:";
    for (const auto& [family, count] : rep.witness_families)
      std::cout << " " << witness_family_name(family) << "=" << count;
    std::cout << "\n";
    if (args.witnesses)
      for (const auto& [mask, cert] : v.witnesses)
        std::cout << "  {" << join(rep.election.ids_of_mask(mask))
                  << "}: " << certificate_str(rep.election, cert) << "\n";
  } else {
    std::cout << "core[" << sat_kind_name(rep.kind) << "] NONEMPTY: {"
              << join(rep.election.ids_of_mask(*v.in_core)) << "} admits no blocking coalition ["
              << rep.duration_ms << " ms]\n";
  }
  return kExitOk;
}

struct SearchArgs {
  std::string sat;
  std::string family = "gadget";
  std::size_t voters = 3;
  std::size_t projects = 0;
  std::string costs;
  std::string budgets;
  double approval_prob = 0.5;
  std::uint64_t seed = 0;
  std::string checkpoint;
  std::uint64_t max_instances = 1000000;
  unsigned threads = 1;
  bool no_dedupe = false;
  std::string out_dir;
  bool json = false;
};

int run_search_cmd(const SearchArgs& args) {
  SatKind kind = require_sat_kind(args.sat);
  SearchSpace space;
  if (args.family == "gadget")
    space.family = ProfileFamily::Gadget;
  else if (args.family == "random")
    space.family = ProfileFamily::Random;
  else if (args.family == "all")
    space.family = ProfileFamily::All;
  else
    throw InvalidParameters("unknown family '" + args.family + "' (use gadget, random or all)");
  space.voters = args.voters;
  space.projects = args.projects;
  space.costs = parse_rat_list(args.costs);
  space.budgets = parse_rat_list(args.budgets);
  space.approval_prob = args.approval_prob;
  space.dedupe = !args.no_dedupe;

  SearchLimits limits;
  limits.max_instances = args.max_instances;
  limits.threads = args.threads;
  limits.checkpoint_path = args.checkpoint;

  SearchReport rep = run_search(kind, space, args.seed, limits);

  // counterexamples land next to the checkpoint unless an output directory
  // was chosen explicitly
  std::filesystem::path out_dir = args.out_dir;
  if (out_dir.empty() && !args.checkpoint.empty())
    out_dir = std::filesystem::path(args.checkpoint).parent_path();
  if (out_dir.empty()) out_dir = ".";
  std::vector<std::string> files;
  for (std::size_t i = 0; i < rep.counterexamples.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "counterexample_%03zu.json", i + 1);
    std::filesystem::path p = out_dir / name;
    save_election(p.string(), rep.counterexamples[i].election);
    files.push_back(p.string());
  }

  if (args.json) {
    Json j = search_report_to_json(rep);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "search (sat=" << sat_kind_name(kind) << ", family=" << args.family
              << ", seed=" << rep.seed << ")\n";
    std::cout << "  enumerated: " << rep.enumerated << ", invalid: " << rep.invalid
              << ", skipped isomorphic: " << rep.skipped_isomorphic
              << ", examined: " << rep.examined << ", indeterminate: " << rep.indeterminate
              << "\n";
    std::cout << "  counterexamples: " << rep.counterexamples.size() << "\n";
    for (std::size_t i = 0; i < rep.counterexamples.size(); ++i) {
      const Counterexample& c = rep.counterexamples[i];
      std::cout << "  [" << i + 1 << "] b=" << rat_str(c.election.budget()) << ", projects:";
      for (const Project& p : c.election.projects())
        std::cout << " " << p.id << "=" << rat_str(p.cost);
      std::cout << " -> " << files[i] << "\n";
    }
    if (rep.limit_hit) std::cout << "  stopped early: instance limit reached\n";
    std::cout << "  duration: " << rep.duration_ms << " ms\n";
  }
  return rep.limit_hit ? kExitLimits : kExitOk;
}

struct ConvertArgs {
  std::string from = "pabulib";
  std::string to = "native";
  std::string input;
  std::string output;
};

int run_convert(const ConvertArgs& args) {
  if (args.from != "pabulib" || args.to != "native")
    throw InvalidParameters("only pabulib -> native conversion is supported");
  RawElection raw = load_pabulib(args.input);
  Election e = Election::make(raw);
  save_election(args.output, e);
  std::cout << "wrote " << args.output << " (" << e.project_count() << " projects, "
            << e.voter_count() << " voters, budget " << rat_str(e.budget()) << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact core-stability checking for approval-based participatory budgeting"};
  app.require_subcommand(1);

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand(
      "check", "decide core membership of an allocation, or core emptiness with --all");
  check->add_option("--instance", check_args.instance, "election file (native JSON)")->required();
  check->add_option("--sat", check_args.sat, "satisfaction function")->required();
  check->add_option("--allocation", check_args.allocation,
                    "comma-separated project ids of the allocation to test");
  check->add_flag("--all", check_args.all, "decide core emptiness over all allocations");
  check->add_flag("--naive-oracle", check_args.naive,
                  "brute force: all feasible allocations, unpruned deviations");
  check->add_flag("--expect", check_args.expect,
                  "exit 1 when the verdict is negative (blocked / core empty)");
  check->add_flag("--json", check_args.json, "JSON output");
  check->add_option("--threads", check_args.threads, "parallel workers");
  check->add_option("--max-projects", check_args.max_projects, "enumeration guard for --all");

  VerifyArgs verify_args;
  CLI::App* verify =
      app.add_subcommand("verify-paper", "machine-check the bundled counterexample theorems");
  verify->add_option("--theorem", verify_args.theorem, "theorem id: 1, 2 or 3")->required();
  verify->add_option("--sat", verify_args.sat, "satisfaction function (theorem 2)");
  verify->add_option("--b", verify_args.b, "budget parameter (theorem 2)");
  verify->add_option("--eps", verify_args.eps, "epsilon parameter (theorem 2)");
  verify->add_flag("--witnesses", verify_args.witnesses, "print the full witness map");
  verify->add_flag("--json", verify_args.json, "JSON output");
  verify->add_option("--threads", verify_args.threads, "parallel workers");

  SearchArgs search_args;
  CLI::App* search = app.add_subcommand("search", "search a family for core-empty instances");
  search->add_option("--sat", search_args.sat, "satisfaction function")->required();
  search->add_option("--family", search_args.family, "gadget | random | all");
  search->add_option("--voters", search_args.voters, "number of voters");
  search->add_option("--projects", search_args.projects, "number of projects (random/all)");
  search->add_option("--costs", search_args.costs, "comma-separated cost values")->required();
  search->add_option("--budget", search_args.budgets, "comma-separated budget values")->required();
  search->add_option("--approval-prob", search_args.approval_prob,
                     "per-(voter,project) approval probability (random)");
  search->add_option("--seed", search_args.seed, "RNG seed");
  search->add_option("--checkpoint", search_args.checkpoint, "checkpoint file (resumes if present)");
  search->add_option("--max-instances", search_args.max_instances,
                     "cap on candidates drawn from the space");
  search->add_option("--threads", search_args.threads, "parallel workers");
  search->add_flag("--no-dedupe", search_args.no_dedupe, "disable canonical-key deduplication");
  search->add_option("--out-dir", search_args.out_dir, "directory for counterexample files");
  search->add_flag("--json", search_args.json, "JSON output");

  ConvertArgs convert_args;
  CLI::App* convert = app.add_subcommand("convert", "convert between election formats");
  convert->add_option("--from", convert_args.from, "input format (pabulib)");
  convert->add_option("--to", convert_args.to, "output format (native)");
  convert->add_option("input", convert_args.input, "input file")->required();
  convert->add_option("output", convert_args.output, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ? kExitOk
                                                                             : kExitInputError;
  }

  try {
    if (app.got_subcommand(check)) {
      if (check_args.allocation.empty() == !check_args.all)
        throw InvalidParameters("pass exactly one of --allocation or --all");
      return run_check(check_args);
    }
    if (app.got_subcommand(verify)) return run_verify_paper(verify_args);
    if (app.got_subcommand(search)) return run_search_cmd(search_args);
    if (app.got_subcommand(convert)) return run_convert(convert_args);
  } catch (const IndeterminateComparison& ex) {
    std::cerr << "indeterminate comparison: " << ex.what() << "\n";
    return kExitIndeterminate;
  } catch (const EnumerationLimitExceeded& ex) {
    std::cerr << "limit exceeded: " << ex.what() << "\n";
    return kExitLimits;
  } catch (const LimitExceeded& ex) {
    std::cerr << "limit exceeded: " << ex.what() << "\n";
    return kExitLimits;
  } catch (const PbError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
