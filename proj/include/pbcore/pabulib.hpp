#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pbcore/election.hpp"
#include "pbcore/errors.hpp"

namespace pbcore {

// Parser for the semicolon-separated Pabulib text format: META, PROJECTS and
// VOTES sections, each introduced by a header row of column names. Only the
// approval ballot type is supported; anything else is rejected.
inline RawElection parse_pabulib(std::istream& in) {
  enum class Section { None, Meta, Projects, Votes };

  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ';')) fields.push_back(field);
    if (!line.empty() && line.back() == ';') fields.push_back("");
    return fields;
  };
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };

  Section section = Section::None;
  bool expect_header = false;
  std::vector<std::string> header;
  std::unordered_map<std::string, std::string> meta;
  RawElection raw;
  bool first_line = true;
  std::size_t line_no = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    if (first_line && line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' &&
        line[2] == '\xBF')
      line.erase(0, 3);  // UTF-8 BOM
    first_line = false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    std::string t = trim(line);
    if (t == "META" || t == "PROJECTS" || t == "VOTES") {
      section = t == "META" ? Section::Meta : t == "PROJECTS" ? Section::Projects : Section::Votes;
      expect_header = true;
      continue;
    }
    if (section == Section::None)
      throw ParseError("line " + std::to_string(line_no) + ": content before any section header");
    if (expect_header) {
      header = split(line);
      for (std::string& h : header) h = trim(h);
      expect_header = false;
      continue;
    }

    std::vector<std::string> fields = split(line);
    auto field_of = [&](const std::string& column) -> std::string {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column)
          return i < fields.size() ? trim(fields[i]) : std::string();
      throw ParseError("line " + std::to_string(line_no) + ": missing column '" + column + "'");
    };

    switch (section) {
      case Section::Meta: {
        if (fields.size() < 2)
          throw ParseError("line " + std::to_string(line_no) + ": META rows need key;value");
        meta[trim(fields[0])] = trim(fields[1]);
        break;
      }
      case Section::Projects: {
        raw.projects.push_back({field_of("project_id"), parse_rat(field_of("cost"))});
        break;
      }
      case Section::Votes: {
        RawVoter voter{field_of("voter_id"), {}};
        std::string vote = field_of("vote");
        std::string item;
        std::istringstream vs(vote);
        while (std::getline(vs, item, ',')) {
          item = trim(item);
          if (!item.empty()) voter.approves.push_back(item);
        }
        raw.voters.push_back(std::move(voter));
        break;
      }
      case Section::None: break;
    }
  }

  auto vote_type = meta.find("vote_type");
  if (vote_type == meta.end())
    throw ParseError("META is missing 'vote_type'");
  if (vote_type->second != "approval")
    throw ParseError("unsupported ballot type '" + vote_type->second +
                     "': only approval ballots are supported");
  auto budget = meta.find("budget");
  if (budget == meta.end()) throw ParseError("META is missing 'budget'");
  raw.budget = parse_rat(budget->second);
  return raw;
}

inline RawElection load_pabulib(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return parse_pabulib(in);
}

}  // namespace pbcore
