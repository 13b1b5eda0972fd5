#pragma once

// Parametric specification families and the live-update regression table.
//
// Robot patterns use mutually exclusive output atoms loc_0..loc_{n-1}.
// Arbiter, ABP and load-balancer families follow the usual synthesis
// competition shapes. README lists every formula.

#include <chrono>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "livesynth/ap_table.hpp"
#include "livesynth/monitor.hpp"
#include "livesynth/parser.hpp"
#include "livesynth/synthesis.hpp"

namespace livesynth {

enum class Family {
  Visit,
  SeqVisit,
  Patrolling,
  SeqPatrolling,
  OrderedVisit,
  Reactivity,
  Relay,
  ArbiterSimple,
  ArbiterFull,
  ArbiterPrioritized,
  AbpReceiver,
  AbpTransmitter,
  LoadBalancer,
};

inline const std::vector<std::pair<Family, std::string>>& family_names() {
  static const std::vector<std::pair<Family, std::string>> names{
      {Family::Visit, "visit"},
      {Family::SeqVisit, "seq-visit"},
      {Family::Patrolling, "patrolling"},
      {Family::SeqPatrolling, "seq-patrolling"},
      {Family::OrderedVisit, "ordered-visit"},
      {Family::Reactivity, "reactivity"},
      {Family::Relay, "relay"},
      {Family::ArbiterSimple, "arbiter-simple"},
      {Family::ArbiterFull, "arbiter-full"},
      {Family::ArbiterPrioritized, "arbiter-prioritized"},
      {Family::AbpReceiver, "abp-receiver"},
      {Family::AbpTransmitter, "abp-transmitter"},
      {Family::LoadBalancer, "load-balancer"},
  };
  return names;
}

inline std::string to_string(Family f) {
  for (auto& [k, n] : family_names())
    if (k == f)
      return n;
  return "?";
}

inline Family parse_family(const std::string& s) {
  for (auto& [k, n] : family_names())
    if (n == s)
      return k;
  throw Error("unknown benchmark family '" + s + "'");
}

/// A generated specification with its proposition partition.
struct Benchmark {
  Family family;
  int n;
  std::string text;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  ApTable aps() const { return ApTable(inputs, outputs); }
  Formula formula() const { return parse_formula(text, aps()); }
  std::string name() const { return to_string(family) + "(" + std::to_string(n) + ")"; }
};

namespace detail {

inline std::string indexed(const std::string& base, int i) { return base + std::to_string(i); }

inline std::vector<std::string> names(const std::string& base, int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i)
    v.push_back(indexed(base, i));
  return v;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i)
    out += (i ? sep : "") + parts[i];
  return out.empty() ? "true" : out;
}

inline std::string mutex(const std::vector<std::string>& atoms) {
  std::vector<std::string> pairs;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      pairs.push_back("!(" + atoms[i] + " && " + atoms[j] + ")");
  return pairs.empty() ? "true" : "G(" + join(pairs, " && ") + ")";
}

// F(a0 && F(a1 && ... F a_{n-1}))
inline std::string nested_eventually(const std::vector<std::string>& atoms, std::size_t from = 0) {
  if (from + 1 == atoms.size())
    return "F " + atoms[from];
  return "F(" + atoms[from] + " && " + nested_eventually(atoms, from + 1) + ")";
}

inline std::string per(int n, const std::function<std::string(int)>& f) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i)
    v.push_back(f(i));
  return join(v, " && ");
}

}  // namespace detail

inline Benchmark make_benchmark(Family family, int n) {
  using namespace detail;
  if (n < 1 || n > 4)
    throw Error("benchmark parameter must be in 1..4");
  Benchmark b{family, n, "", {}, {}};
  auto loc = names("loc_", n);
  auto with_mutex = [&](const std::string& body) { return mutex(loc) + " && " + body; };
  switch (family) {
  case Family::Visit:
    b.outputs = loc;
    b.text = with_mutex(per(n, [&](int i) { return "F " + loc[i]; }));
    break;
  case Family::SeqVisit:
    b.outputs = loc;
    b.text = with_mutex(nested_eventually(loc));
    break;
  case Family::Patrolling:
    b.outputs = loc;
    b.text = with_mutex(per(n, [&](int i) { return "G F " + loc[i]; }));
    break;
  case Family::SeqPatrolling:
    b.outputs = loc;
    b.text = with_mutex("G " + nested_eventually(loc));
    break;
  case Family::OrderedVisit:
    b.outputs = loc;
    b.text = with_mutex(nested_eventually(loc));
    for (int i = 0; i + 1 < n; ++i)
      b.text += " && (!" + loc[i + 1] + " U " + loc[i] + ")";
    break;
  case Family::Reactivity:
    b.inputs = {"event"};
    b.outputs = loc;
    b.text = with_mutex("G(event -> X(" + loc[0] + " || X " + loc[0] + "))");
    break;
  case Family::Relay: {
    b.inputs = names("m", n);
    b.outputs = names("i", n);
    b.outputs.push_back("r");
    std::vector<std::string> parts;
    for (int j = 0; j < n; ++j)
      parts.push_back("(" + indexed("m", j) + " -> X F " + indexed("i", j) + ")");
    for (int j = 0; j < n; ++j)
      parts.push_back("(G !" + indexed("m", j) + " -> F G !" + indexed("i", j) + ")");
    std::vector<std::string> all_m, some_silent;
    for (int j = 0; j < n; ++j) {
      all_m.push_back("F " + indexed("m", j));
      some_silent.push_back("G !" + indexed("m", j));
    }
    parts.push_back("((" + join(all_m, " && ") + ") -> F r)");
    parts.push_back("((" + join(some_silent, " || ") + ") -> F G !r)");
    b.text = "G(" + join(parts, " && ") + ")";
    break;
  }
  case Family::ArbiterSimple:
  case Family::ArbiterFull: {
    b.inputs = names("r", n);
    b.outputs = names("g", n);
    b.text = mutex(b.outputs) + " && " +
             per(n, [&](int i) { return "G(r" + std::to_string(i) + " -> F g" + std::to_string(i) + ")"; });
    if (family == Family::ArbiterFull)
      for (int i = 0; i < n; ++i) {
        std::string g = indexed("g", i), r = indexed("r", i);
        // no grant before a request, none after a grant until the next request
        std::string quiet = "(" + r + " R (!" + g + " || " + r + "))";
        b.text += " && " + quiet + " && G(" + g + " -> X " + quiet + ")";
      }
    break;
  }
  case Family::ArbiterPrioritized: {
    b.inputs = names("r", n);
    b.outputs = names("g", n);
    std::string guarantee = mutex(b.outputs) + " && G(r0 -> X g0)";
    for (int i = 1; i < n; ++i)
      guarantee += " && G(r" + std::to_string(i) + " -> F g" + std::to_string(i) + ")";
    b.text = "G F !r0 -> (" + guarantee + ")";
    break;
  }
  case Family::AbpReceiver: {
    // frame f_j on channel j must be acknowledged by a_j; no spurious acks
    b.inputs = names("f", n);
    b.outputs = names("a", n);
    b.text = per(n, [&](int j) {
      std::string f = indexed("f", j), a = indexed("a", j);
      std::string quiet = "(" + f + " R (!" + a + " || " + f + "))";
      return "G(" + f + " -> F " + a + ") && " + quiet + " && G(" + a + " -> X " + quiet + ")";
    });
    break;
  }
  case Family::AbpTransmitter: {
    // keep sending on every channel; toggle the channel bit after an ack
    b.inputs = names("k", n);
    b.outputs = names("s", n);
    for (auto& t : names("t", n))
      b.outputs.push_back(t);
    b.text = per(n, [&](int j) {
      return "G F " + indexed("s", j) + " && G(" + indexed("k", j) + " -> X F " +
             indexed("t", j) + ")";
    });
    break;
  }
  case Family::LoadBalancer: {
    b.inputs = {"idle"};
    for (auto& r : names("r", n))
      b.inputs.push_back(r);
    b.outputs = names("g", n);
    std::string none = "X(" + per(n, [&](int j) { return "!" + indexed("g", j); }) + ")";
    std::string guarantee = mutex(b.outputs) + " && G(!idle -> " + none + ")";
    for (int j = 0; j < n; ++j)
      guarantee += " && G(r" + std::to_string(j) + " -> F g" + std::to_string(j) + ")";
    b.text = "G F idle -> (" + guarantee + ")";
    break;
  }
  }
  return b;
}

/// One live-update row: initial spec, update spec, expected universal verdict.
struct UpdateRow {
  std::string group;
  Benchmark initial;
  Benchmark update;
  Outcome expected;

  std::string label() const {
    if (initial.family == update.family)
      return to_string(initial.family) + " " + std::to_string(initial.n) + "->" +
             std::to_string(update.n);
    return to_string(initial.family) + " -> " + to_string(update.family);
  }
  ApTable aps() const { return initial.aps().merged(update.aps()); }
};

inline std::vector<UpdateRow> update_rows() {
  constexpr int robots = 3;
  auto robot = [&](Family a, Family b) {
    return UpdateRow{"robot", make_benchmark(a, robots), make_benchmark(b, robots),
                     Outcome::Realizable};
  };
  auto same = [](Family a, int n, Family b, int m, Outcome o) {
    return UpdateRow{"syntcomp", make_benchmark(a, n), make_benchmark(b, m), o};
  };
  using F = Family;
  constexpr auto R = Outcome::Realizable, U = Outcome::Unrealizable;
  return {
      robot(F::Visit, F::SeqVisit),
      robot(F::Visit, F::Patrolling),
      robot(F::Visit, F::SeqPatrolling),
      robot(F::Visit, F::Reactivity),
      robot(F::SeqVisit, F::Patrolling),
      robot(F::SeqVisit, F::SeqPatrolling),
      robot(F::SeqVisit, F::Reactivity),
      robot(F::Patrolling, F::OrderedVisit),
      robot(F::Patrolling, F::Reactivity),
      same(F::Relay, 1, F::Relay, 2, R),
      same(F::Relay, 2, F::Relay, 1, R),
      same(F::ArbiterFull, 2, F::ArbiterFull, 3, U),
      same(F::ArbiterSimple, 2, F::ArbiterFull, 2, U),
      same(F::ArbiterSimple, 2, F::ArbiterSimple, 4, R),
      same(F::ArbiterSimple, 2, F::ArbiterPrioritized, 2, R),
      same(F::ArbiterFull, 2, F::ArbiterPrioritized, 2, R),
      same(F::ArbiterPrioritized, 2, F::ArbiterPrioritized, 3, R),
      same(F::AbpReceiver, 1, F::AbpReceiver, 2, U),
      same(F::AbpReceiver, 2, F::AbpReceiver, 3, U),
      same(F::AbpTransmitter, 1, F::AbpTransmitter, 2, R),
      same(F::LoadBalancer, 2, F::LoadBalancer, 4, R),
  };
}

struct RowReport {
  std::string label;
  Outcome expected;
  Outcome initial_outcome = Outcome::Unknown;  // synthesis of the initial machine
  std::size_t initial_size = 0;
  std::size_t monitor_states = 0;
  std::size_t obligations = 0;
  std::size_t finite_realizable = 0;
  std::size_t finite_unrealizable = 0;
  Outcome universal = Outcome::Unknown;
  double seconds_update = 0;     // update spec alone
  double seconds_universal = 0;  // obligations && update spec
  std::string error;

  bool matches() const { return error.empty() && universal == expected; }
};

/// Synthesizes the initial machine, cuts the exact monitor with it, and
/// runs the per-obligation and universal syntheses.
inline RowReport run_row(const UpdateRow& row, const SynthesisOptions& opt = {}) {
  RowReport rep;
  rep.label = row.label();
  rep.expected = row.expected;
  try {
    ApTable aps = row.aps();
    Formula phi = row.initial.formula(), psi = row.update.formula();
    auto init = synth_ltl(phi, aps, opt);
    rep.initial_outcome = init.outcome;
    if (!init.machine) {
      rep.error = "initial specification not synthesized";
      return rep;
    }
    rep.initial_size = init.machine->size();
    rep.seconds_update = synth_ltl(psi, aps, opt).seconds;
    auto uni = synth_universal_live(*init.machine, phi, psi, aps, opt, true);
    rep.monitor_states = uni.monitor_states;
    rep.obligations = uni.per_obligation.size();
    for (auto& o : uni.per_obligation) {
      rep.finite_realizable += o.outcome == Outcome::Realizable;
      rep.finite_unrealizable += o.outcome == Outcome::Unrealizable;
    }
    rep.universal = uni.universal.outcome;
    rep.seconds_universal = uni.universal.seconds;
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return rep;
}

}  // namespace livesynth
