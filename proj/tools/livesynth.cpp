// livesynth command-line tool.
//
// Exit codes: 0 pass / realizable, 1 fail / unrealizable, 2 unknown,
// 3 usage or input errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "livesynth/livesynth.hpp"

using namespace livesynth;
using nlohmann::json;

namespace {

constexpr int kPass = 0, kFail = 1, kUnknown = 2, kError = 3;

json letter_json(const Letter& l) {
  json a = json::array();
  for (PropId p : l.props())
    a.push_back(PropRegistry::name(p));
  return a;
}

json trace_json(const FiniteTrace& t) {
  json a = json::array();
  for (auto& l : t)
    a.push_back(letter_json(l));
  return a;
}

json verdict_json(const Verdict& v) {
  json j{{"pass", v.pass}};
  if (v.witness)
    j["witness"] = {{"prefix", trace_json(v.witness->lasso.prefix())},
                    {"loop", trace_json(v.witness->lasso.loop())},
                    {"text", v.witness->lasso.str()}};
  if (v.failing_obligation)
    j["failing_obligation"] = v.failing_obligation->str();
  return j;
}

json monitor_json(const ObligationMonitor& mon) {
  json states = json::array(), edges = json::array(), labels = json::array();
  for (std::size_t s = 0; s < mon.size(); ++s) {
    json st{{"id", s}, {"formula", mon.state(s).formula.str()}, {"label", mon.label(s).str()}};
    if (mon.state(s).machine_state)
      st["machine_state"] = *mon.state(s).machine_state;
    states.push_back(st);
    for (auto& e : mon.edges(s))
      edges.push_back({{"from", s}, {"to", e.target}, {"letter", letter_json(e.letter)}});
  }
  for (auto& l : mon.labels())
    labels.push_back(l.str());
  return {{"mode", mon.mode() == StepMode::Exact ? "exact" : "moore-offset"},
          {"cut", mon.is_cut()},
          {"num_states", mon.size()},
          {"num_labels", mon.labels().size()},
          {"labels", labels},
          {"states", states},
          {"edges", edges}};
}

json synthesis_json(const SynthesisResult& r) {
  json stats = json::array();
  for (auto& b : r.stats)
    stats.push_back({{"side", b.dual ? "environment" : "system"},
                     {"bound", b.bound},
                     {"variables", b.variables},
                     {"clauses", b.clauses},
                     {"result", sat::to_string(b.result)},
                     {"seconds", b.seconds}});
  json j{{"outcome", to_string(r.outcome)}, {"seconds", r.seconds}, {"bounds", stats}};
  if (r.machine)
    j["machine"] = serialize_machine(*r.machine);
  if (r.counter_strategy)
    j["counter_strategy"] = r.counter_strategy->str();
  return j;
}

int outcome_code(Outcome o) {
  switch (o) {
  case Outcome::Realizable:
    return kPass;
  case Outcome::Unrealizable:
    return kFail;
  default:
    return kUnknown;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write '" + path + "'");
  out << text;
}

void print_verdict(const Verdict& v) {
  std::cout << (v.pass ? "PASS" : "FAIL") << "\n";
  if (v.failing_obligation)
    std::cout << "obligation: " << v.failing_obligation->str() << "\n";
  if (v.witness)
    std::cout << "counterexample: " << v.witness->lasso.str() << "\n";
}

struct Common {
  std::string file;
  bool json = false;
  std::optional<std::string> dot;
};

struct SynthFlags {
  std::size_t bound_max = 16;
  std::string solver = "internal";
  std::optional<double> timeout;
  bool no_dual = false;

  SynthesisOptions options() const {
    SynthesisOptions o;
    o.bound_cap = bound_max;
    o.solver = solver;
    o.dual = !no_dual;
    if (timeout)
      o.time_budget = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(*timeout));
    return o;
  }
};

void add_synth_flags(CLI::App* cmd, SynthFlags& f) {
  cmd->add_option("--bound-max", f.bound_max, "Largest system bound tried")->check(CLI::Range(1, 64));
  cmd->add_option("--solver", f.solver, "'internal' or path to a DIMACS SAT solver");
  cmd->add_option("--timeout", f.timeout, "Time budget per synthesis query, seconds");
  cmd->add_flag("--no-dual", f.no_dual, "Skip the counter-strategy search");
}

int cmd_monitor(const Common& c, const std::string& mode, bool cut, bool merge,
                std::size_t max_states) {
  auto p = load_problem(c.file);
  MonitorOptions opt;
  opt.mode = mode == "exact" ? StepMode::Exact : StepMode::MooreOffset;
  opt.max_states = max_states;
  auto mon = build_monitor(p.require_initial(), opt);
  if (cut)
    mon = cut_monitor(mon, p.require_initial_machine(), max_states);
  auto obligations = reachable_obligations(mon, merge);
  if (c.dot)
    write_file(*c.dot, to_dot(mon));
  if (c.json) {
    json j = monitor_json(mon);
    j["obligations"] = json::array();
    for (auto& o : obligations)
      j["obligations"].push_back(o.str());
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "states: " << mon.size() << "\nlabels: " << mon.labels().size() << "\n";
    for (auto& o : obligations)
      std::cout << "  " << (o.is_true() ? "true" : o.str()) << "\n";
  }
  return kPass;
}

int cmd_evolve(const Common& c) {
  auto p = load_problem(c.file);
  if (!p.trace)
    throw Error("problem has no TRACE section");
  Formula o = evolve(*p.trace, p.require_initial());
  if (c.json)
    std::cout << json{{"trace", trace_json(*p.trace)}, {"obligation", o.str()}}.dump(2) << "\n";
  else
    std::cout << o.str() << "\n";
  return kPass;
}

int cmd_mc(const Common& c, bool finite, bool universal, bool product) {
  auto p = load_problem(c.file);
  const MooreMachine& ts_u = p.require_update_machine();
  Verdict v;
  json extra = json::object();
  if (finite) {
    v = mc_finite_live(ts_u, p.live_problem());
  } else if (universal) {
    auto lp = p.live_problem();
    if (product) {
      v = mc_universal_product(p.require_initial_machine(), ts_u, p.require_initial(),
                               lp.psi);
    } else {
      p.require_initial_machine();
      json table = json::array();
      for (auto& oc : check_obligations(ts_u, lp)) {
        table.push_back({{"obligation", oc.obligation.str()}, {"pass", oc.verdict.pass}});
        if (!oc.verdict.pass && v.pass)
          v = oc.verdict;
      }
      extra["obligations"] = table;
    }
  } else {
    v = mc_ltl(ts_u, p.require_update());
  }
  if (c.json) {
    json j = verdict_json(v);
    j.update(extra);
    std::cout << j.dump(2) << "\n";
  } else {
    print_verdict(v);
  }
  return v.pass ? kPass : kFail;
}

int cmd_synth(const Common& c, bool finite, bool universal, const SynthFlags& f,
              const std::optional<std::string>& out_path) {
  auto p = load_problem(c.file);
  auto opt = f.options();
  SynthesisResult r;
  json extra = json::object();
  if (finite) {
    if (!p.trace)
      throw Error("problem has no TRACE section");
    r = synth_finite_live(p.require_initial(), p.update.value_or(Formula::tt()), *p.trace,
                          p.aps, opt);
  } else if (universal) {
    auto u = synth_universal_live(p.require_initial_machine(), p.require_initial(),
                                  p.update.value_or(Formula::tt()), p.aps, opt);
    r = u.universal;
    json table = json::array();
    for (auto& o : u.per_obligation)
      table.push_back({{"obligation", o.obligation.str()}, {"outcome", to_string(o.outcome)}});
    extra["monitor_states"] = u.monitor_states;
    extra["obligations"] = table;
    if (!c.json) {
      std::cout << "monitor states: " << u.monitor_states << "\n";
      for (auto& o : u.per_obligation)
        std::cout << "  " << to_string(o.outcome) << "  " << o.obligation.str() << "\n";
    }
  } else {
    r = synth_ltl(p.require_update(), p.aps, opt);
  }
  if (r.machine) {
    if (out_path)
      write_file(*out_path, serialize_machine(*r.machine));
    if (c.dot)
      write_file(*c.dot, to_dot(*r.machine));
  }
  if (c.json) {
    json j = synthesis_json(r);
    j.update(extra);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_string(r.outcome) << " (" << r.seconds << " s)\n";
    if (r.machine && !out_path)
      std::cout << serialize_machine(*r.machine);
    if (r.counter_strategy)
      std::cout << "counter-strategy:\n" << r.counter_strategy->str();
  }
  return outcome_code(r.outcome);
}

int cmd_bench(const std::string& filter, bool list, bool json_out, const SynthFlags& f,
              std::uint64_t seed) {
  std::vector<UpdateRow> rows;
  for (auto& r : update_rows())
    if (filter.empty() || r.label().find(filter) != std::string::npos)
      rows.push_back(r);
  if (list) {
    for (auto& r : rows)
      std::cout << r.label() << "\n  initial: " << r.initial.text << "\n  update:  "
                << r.update.text << "\n";
    return kPass;
  }
  auto opt = f.options();
  json table = json::array();
  bool mismatch = false, unknown = false;
  if (!json_out)
    std::cout << "row                                 init  OM  obl  fin+  fin-  universal     "
                 "expected      t(psi)  t(univ)\n";
  for (auto& row : rows) {
    auto rep = run_row(row, opt);
    mismatch |= rep.error.empty() && rep.universal != Outcome::Unknown && !rep.matches();
    unknown |= !rep.error.empty() || rep.universal == Outcome::Unknown;
    if (json_out) {
      json j{{"row", rep.label},
             {"initial_size", rep.initial_size},
             {"monitor_states", rep.monitor_states},
             {"obligations", rep.obligations},
             {"finite_realizable", rep.finite_realizable},
             {"finite_unrealizable", rep.finite_unrealizable},
             {"universal", to_string(rep.universal)},
             {"expected", to_string(rep.expected)},
             {"match", rep.matches()},
             {"seconds_update", rep.seconds_update},
             {"seconds_universal", rep.seconds_universal}};
      if (!rep.error.empty())
        j["error"] = rep.error;
      table.push_back(j);
    } else {
      std::printf("%-36s %4zu %3zu %4zu %5zu %5zu  %-13s %-13s %6.2f %8.2f%s\n",
                  rep.label.c_str(), rep.initial_size, rep.monitor_states, rep.obligations,
                  rep.finite_realizable, rep.finite_unrealizable, to_string(rep.universal),
                  to_string(rep.expected), rep.seconds_update, rep.seconds_universal,
                  rep.error.empty() ? "" : ("  error: " + rep.error).c_str());
      std::fflush(stdout);
    }
  }
  if (json_out)
    std::cout << json{{"seed", seed}, {"rows", table}}.dump(2) << "\n";
  return mismatch ? kFail : unknown ? kUnknown : kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Obligation monitors, live-update model checking and synthesis"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed recorded in reports; generators are deterministic");

  Common common;
  auto add_common = [&](CLI::App* cmd, bool with_file = true) {
    if (with_file)
      cmd->add_option("file", common.file, "Problem file")->required()->check(CLI::ExistingFile);
    cmd->add_flag("--json", common.json, "Machine-readable output");
  };

  auto* monitor = app.add_subcommand("monitor", "Build (and optionally cut) the obligation monitor");
  std::string mode = "exact";
  bool cut = false, merge = false;
  std::size_t max_states = 100000;
  add_common(monitor);
  monitor->add_option("--mode", mode, "Step function")
      ->check(CLI::IsMember({"exact", "moore-offset"}));
  monitor->add_flag("--cut", cut, "Restrict to the histories of MACHINE");
  monitor->add_flag("--merge", merge, "Fold propositionally equivalent labels");
  monitor->add_option("--max-states", max_states, "State budget");
  monitor->add_option("--dot", common.dot, "Write Graphviz output to this path");

  auto* evolve_cmd = app.add_subcommand("evolve", "Obligation left open by TRACE");
  add_common(evolve_cmd);

  auto* mc = app.add_subcommand("mc", "Model check UPDATE_MACHINE");
  bool finite = false, universal = false, product = false;
  add_common(mc);
  auto* mc_finite = mc->add_flag("--finite", finite, "Check against TRACE");
  mc->add_flag("--universal", universal, "Check against every history of MACHINE")
      ->excludes(mc_finite);
  mc->add_flag("--product", product, "Use the combined-system formulation (with --universal)");

  auto* synth = app.add_subcommand("synth", "Bounded synthesis");
  SynthFlags sflags;
  std::optional<std::string> out_path;
  add_common(synth);
  auto* s_finite = synth->add_flag("--finite", finite, "Update for TRACE");
  synth->add_flag("--universal", universal, "Update for every history of MACHINE")
      ->excludes(s_finite);
  add_synth_flags(synth, sflags);
  synth->add_option("-o,--out", out_path, "Write the machine to this path");
  synth->add_option("--dot", common.dot, "Write Graphviz output to this path");

  auto* bench = app.add_subcommand("bench", "Live-update regression table");
  std::string filter;
  bool table1 = false, list = false;
  add_common(bench, false);
  bench->add_flag("--table1", table1, "Run the built-in rows (default)");
  bench->add_option("--filter", filter, "Only rows whose label contains this text");
  bench->add_flag("--list", list, "Print the generated formulas instead of running");
  add_synth_flags(bench, sflags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*monitor)
      return cmd_monitor(common, mode, cut, merge, max_states);
    if (*evolve_cmd)
      return cmd_evolve(common);
    if (*mc)
      return cmd_mc(common, finite, universal, product);
    if (*synth)
      return cmd_synth(common, finite, universal, sflags, out_path);
    if (*bench)
      return cmd_bench(filter, list, common.json, sflags, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
