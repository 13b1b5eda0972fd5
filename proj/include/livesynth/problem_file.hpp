#pragma once

// Problem files. Sections start with `NAME:` at the beginning of a line and
// run until the next section; `#` starts a comment.
//
//   INPUTS: m0 m1
//   OUTPUTS: i0 i1 r
//   INITIAL: G(m1 -> X F i1)
//   UPDATE: true
//   TRACE: {m1, i0, i1, r}; {i1}; {m0, m1}
//   MACHINE: relay_two_station.machine
//   UPDATE_MACHINE:
//     inputs: m0 m1
//     ...
//
// MACHINE is the initial system, UPDATE_MACHINE the update system. Both take
// either inline machine text or a path relative to the problem file.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "livesynth/machine.hpp"
#include "livesynth/model_check.hpp"
#include "livesynth/parser.hpp"

namespace livesynth {

struct ProblemFile {
  ApTable aps;
  std::optional<Formula> initial;
  std::optional<Formula> update;
  std::optional<FiniteTrace> trace;
  std::optional<MooreMachine> initial_machine;
  std::optional<MooreMachine> update_machine;

  const Formula& require_initial() const {
    if (!initial)
      throw Error("problem has no INITIAL section");
    return *initial;
  }
  const Formula& require_update() const {
    if (!update)
      throw Error("problem has no UPDATE section");
    return *update;
  }
  const MooreMachine& require_initial_machine() const {
    if (!initial_machine)
      throw Error("problem has no MACHINE section");
    return *initial_machine;
  }
  const MooreMachine& require_update_machine() const {
    if (!update_machine)
      throw Error("problem has no UPDATE_MACHINE section");
    return *update_machine;
  }

  /// φ and ψ with an absent section read as `true`.
  LiveProblem live_problem() const {
    return {initial.value_or(Formula::tt()), update.value_or(Formula::tt()), aps, trace,
            initial_machine};
  }
};

/// `{a, b}; {}; c d` → three letters. Braces are optional.
inline FiniteTrace parse_trace(std::string_view text, const ApTable& aps) {
  FiniteTrace out;
  std::string t = detail::trim(text);
  if (t.empty() || t == "ε" || t == "eps")
    return out;
  std::size_t start = 0;
  while (true) {
    std::size_t semi = t.find(';', start);
    std::string item =
        detail::trim(t.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
    if (!item.empty() && item.front() == '{') {
      if (item.back() != '}')
        throw Error("unterminated letter '" + item + "'");
      item = item.substr(1, item.size() - 2);
    }
    Letter l;
    for (auto& name : detail::split_names(item)) {
      PropId p = PropRegistry::intern(name);
      if (!aps.declared(p))
        throw Error("trace mentions undeclared proposition '" + name + "'");
      l.insert(p);
    }
    out.push_back(std::move(l));
    if (semi == std::string::npos)
      break;
    start = semi + 1;
  }
  return out;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in)
    throw Error("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MooreMachine machine_section(const std::string& body, const std::filesystem::path& base,
                                    const ApTable& aps) {
  std::string t = trim(body);
  bool inline_text = t.find('\n') != std::string::npos || t.rfind("inputs", 0) == 0;
  std::string text = inline_text ? t : read_file(base / t);
  MooreMachine m = parse_machine(text, true);
  for (PropId p : m.aps().inputs())
    if (!aps.is_input(p))
      throw Error("machine input '" + PropRegistry::name(p) + "' is not a problem input");
  for (PropId p : m.aps().outputs())
    if (!aps.is_output(p))
      throw Error("machine output '" + PropRegistry::name(p) + "' is not a problem output");
  return m;
}

}  // namespace detail

inline ProblemFile parse_problem(std::string_view text,
                                 const std::filesystem::path& base_dir = ".") {
  static const std::vector<std::string> known{"INPUTS", "OUTPUTS", "INITIAL", "UPDATE",
                                              "TRACE",  "MACHINE", "UPDATE_MACHINE"};
  std::map<std::string, std::string> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::size_t colon = line.find(':');
    if (colon != std::string::npos && !line.empty() && line[0] != ' ' && line[0] != '\t') {
      std::string name = detail::trim(line.substr(0, colon));
      if (std::find(known.begin(), known.end(), name) != known.end()) {
        if (sections.count(name))
          throw Error("line " + std::to_string(lineno) + ": duplicate section " + name);
        current = name;
        sections[current] = line.substr(colon + 1);
        continue;
      }
      auto header_char = [](char ch) {
        return std::isupper(static_cast<unsigned char>(ch)) || ch == '_';
      };
      if (!name.empty() && std::all_of(name.begin(), name.end(), header_char))
        throw Error("line " + std::to_string(lineno) + ": unknown section " + name);
    }
    if (current.empty()) {
      if (!detail::trim(line).empty())
        throw Error("line " + std::to_string(lineno) + ": text outside of a section");
      continue;
    }
    sections[current] += "\n" + line;
  }

  ProblemFile p;
  auto body = [&](const std::string& s) -> std::optional<std::string> {
    auto it = sections.find(s);
    if (it == sections.end())
      return std::nullopt;
    return detail::trim(it->second);
  };
  p.aps = ApTable(detail::split_names(body("INPUTS").value_or("")),
                  detail::split_names(body("OUTPUTS").value_or("")));
  auto formula = [&](const std::string& s) -> std::optional<Formula> {
    auto b = body(s);
    if (!b)
      return std::nullopt;
    std::string flat = *b;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    try {
      return parse_formula(flat, p.aps);
    } catch (const ParseError& e) {
      throw Error(s + ": " + e.what());
    }
  };
  p.initial = formula("INITIAL");
  p.update = formula("UPDATE");
  if (auto t = body("TRACE")) {
    std::string flat = *t;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    p.trace = parse_trace(flat, p.aps);
  }
  if (auto m = body("MACHINE"))
    p.initial_machine = detail::machine_section(*m, base_dir, p.aps);
  if (auto m = body("UPDATE_MACHINE"))
    p.update_machine = detail::machine_section(*m, base_dir, p.aps);
  return p;
}

inline ProblemFile load_problem(const std::filesystem::path& path) {
  return parse_problem(detail::read_file(path), path.parent_path().empty()
                                                    ? std::filesystem::path(".")
                                                    : path.parent_path());
}

}  // namespace livesynth
