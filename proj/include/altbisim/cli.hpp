#pragma once

// Command-line front end.  One binary, subcommand style; every command offers
// --json.  Exit codes: 0 = success / positive verdict, 1 = negative verdict
// (invalid system, not bisimilar, formula false or unknown, not-in-domain,
// unrealizable, transfer violations, bisimilar states given to distinguish),
// 2 = input, parse or usage errors.

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "altbisim/agent_system.hpp"
#include "altbisim/bisim.hpp"
#include "altbisim/common.hpp"
#include "altbisim/distinguish.hpp"
#include "altbisim/eval.hpp"
#include "altbisim/formula.hpp"
#include "altbisim/generator.hpp"
#include "altbisim/json_out.hpp"
#include "altbisim/labeled_system.hpp"
#include "altbisim/metric.hpp"
#include "altbisim/oracle.hpp"
#include "altbisim/parse.hpp"
#include "altbisim/relations.hpp"
#include "altbisim/synthesis.hpp"

namespace altbisim {
namespace detail {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AgentAts load_agent(const std::string& path) {
  ParsedSystem s = parse_system(slurp(path));
  if (auto* t = std::get_if<AgentAts>(&s)) return std::move(*t);
  throw input_error("'" + path + "' is a labeled system; an agent system (ats) is required");
}

inline LabelAts load_label(const std::string& path) {
  ParsedSystem s = parse_system(slurp(path));
  if (auto* t = std::get_if<LabelAts>(&s)) return std::move(*t);
  throw input_error("'" + path + "' is an agent system; a labeled system (lats) is required");
}

inline IntSet parse_agent_list(const std::string& text) {
  IntSet out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(cur, &pos);
    } catch (const std::exception&) {
      throw input_error("bad agent list entry '" + cur + "'");
    }
    if (pos != cur.size() || v < 1)
      throw input_error("bad agent list entry '" + cur + "'");
    out.push_back(v);
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ')
      flush();
    else
      cur += c;
  }
  flush();
  return set_sorted(out);
}

template <class System>
int need_state(const System& T, const std::string& name) {
  int q = T.state_index(name);
  if (q < 0)
    throw input_error("unknown state '" + name + "' in system '" + T.name + "'");
  return q;
}

// Inline text or @file, exactly one of the two.
inline std::string pick_text(const std::string& inline_text, const std::string& file,
                             const std::string& what) {
  if (!inline_text.empty() && !file.empty())
    throw input_error("give " + what + " either inline or as a file, not both");
  if (!inline_text.empty()) return inline_text;
  if (!file.empty()) return slurp(file);
  throw input_error("missing " + what);
}

template <class System>
FormulaOpts opts_for(const System& T) {
  FormulaOpts o;
  o.obs_names = T.obs.names;
  return o;
}

template <class S1, class S2>
void render_relation(std::ostream& out, const std::vector<std::pair<int, int>>& rel,
                     const S1& T1, const S2& T2) {
  for (auto [l, r] : rel)
    out << "  (" << T1.state_names[static_cast<size_t>(l)] << ", "
        << T2.state_names[static_cast<size_t>(r)] << ")\n";
}

inline std::pair<bool, bool> relation_covers(const std::vector<std::pair<int, int>>& rel,
                                             int n1, int n2) {
  std::vector<char> l(static_cast<size_t>(n1), 0), r(static_cast<size_t>(n2), 0);
  for (auto [a, b] : rel) {
    l[static_cast<size_t>(a)] = 1;
    r[static_cast<size_t>(b)] = 1;
  }
  auto all = [](const std::vector<char>& v) {
    for (char c : v)
      if (!c) return false;
    return true;
  };
  return {all(l), all(r)};
}

}  // namespace detail

// Runs one command; out receives results, err receives diagnostics.
inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"verification toolkit for alternating transition systems with metric observations",
               "altbisim"};
  app.require_subcommand(1);

  // validate ------------------------------------------------------------------
  struct {
    std::string sys;
    bool json = false;
  } v;
  auto* c_validate = app.add_subcommand("validate", "check a system file for well-formedness");
  c_validate->add_option("--sys", v.sys, "system file (.ats or .lats)")->required();
  c_validate->add_flag("--json", v.json, "JSON output");

  // bisim ---------------------------------------------------------------------
  struct {
    std::string sys1, sys2, agents;
    double eps = 0;
    std::vector<std::string> dist;
    bool json = false;
  } b;
  auto* c_bisim = app.add_subcommand(
      "bisim", "greatest alternating approximate bisimulation of two agent systems");
  c_bisim->add_option("--sys1", b.sys1, "left agent system")->required();
  c_bisim->add_option("--sys2", b.sys2, "right agent system")->required();
  c_bisim->add_option("--agents", b.agents, "coalition, e.g. 1,3")->required();
  c_bisim->add_option("--eps", b.eps, "observation tolerance")->required();
  c_bisim->add_option("--distinguish", b.dist,
                      "two state names; also emit a distinguishing formula pair")
      ->expected(2);
  c_bisim->add_flag("--json", b.json, "JSON output");

  // aea-bisim -----------------------------------------------------------------
  struct {
    std::string sys1, sys2;
    double eps = 0;
    bool json = false;
  } ab;
  auto* c_aea = app.add_subcommand(
      "aea-bisim", "greatest alternating approximate bisimulation of two labeled systems");
  c_aea->add_option("--sys1", ab.sys1, "left labeled system")->required();
  c_aea->add_option("--sys2", ab.sys2, "right labeled system")->required();
  c_aea->add_option("--eps", ab.eps, "observation tolerance")->required();
  c_aea->add_flag("--json", ab.json, "JSON output");

  // check ---------------------------------------------------------------------
  struct {
    std::string sys, state, formula, formula_file;
    double eps = 0;
    int bounded = 0;
    bool json = false;
  } ck;
  auto* c_check = app.add_subcommand("check", "model-check a state formula on an agent system");
  c_check->add_option("--sys", ck.sys, "agent system")->required();
  c_check->add_option("--state", ck.state, "state name")->required();
  c_check->add_option("--formula", ck.formula, "state formula");
  c_check->add_option("--formula-file", ck.formula_file, "file holding the formula");
  c_check->add_option("--eps", ck.eps, "observation tolerance")->required();
  auto* opt_bounded =
      c_check->add_option("--bounded", ck.bounded, "three-valued check with this horizon");
  c_check->add_flag("--json", ck.json, "JSON output");

  // partner -------------------------------------------------------------------
  struct {
    std::string formula, formula_file, agents;
    double eps = 0;
    bool path = false;
    bool json = false;
  } pa;
  auto* c_partner = app.add_subcommand("partner", "canonical partner formula, or not-in-domain");
  c_partner->add_option("--formula", pa.formula, "state (or, with --path, path) formula");
  c_partner->add_option("--formula-file", pa.formula_file, "file holding the formula");
  c_partner->add_option("--agents", pa.agents, "coalition the formula quantifies over")
      ->required();
  c_partner->add_option("--eps", pa.eps, "observation tolerance")->required();
  c_partner->add_flag("--path", pa.path, "treat the input as a path formula");
  c_partner->add_flag("--json", pa.json, "JSON output");

  // tr ------------------------------------------------------------------------
  struct {
    std::string formula, formula_file;
    double eps = 0;
    bool json = false;
  } tr;
  auto* c_tr = app.add_subcommand("tr", "blur a positive formula: atoms become <eps> atoms");
  c_tr->add_option("--formula", tr.formula, "positive temporal formula");
  c_tr->add_option("--formula-file", tr.formula_file, "file holding the formula");
  c_tr->add_option("--eps", tr.eps, "observation tolerance")->required();
  c_tr->add_flag("--json", tr.json, "JSON output");

  // distinguish -----------------------------------------------------------------
  struct {
    std::string sys1, sys2, agents, left, right;
    double eps = 0;
    bool json = false;
  } di;
  auto* c_dist = app.add_subcommand(
      "distinguish", "distinguishing formula pair for two non-bisimilar states");
  c_dist->add_option("--sys1", di.sys1, "left agent system")->required();
  c_dist->add_option("--sys2", di.sys2, "right agent system")->required();
  c_dist->add_option("--agents", di.agents, "coalition, e.g. 1,3")->required();
  c_dist->add_option("--eps", di.eps, "observation tolerance")->required();
  c_dist->add_option("--left", di.left, "state of the left system")->required();
  c_dist->add_option("--right", di.right, "state of the right system")->required();
  c_dist->add_flag("--json", di.json, "JSON output");

  // synth -----------------------------------------------------------------------
  struct {
    std::string sys, state, spec, spec_file;
    double eps = 0;
    bool use_tr = false;
    bool json = false;
  } sy;
  auto* c_synth = app.add_subcommand(
      "synth", "synthesize a control strategy for a co-safety specification");
  c_synth->add_option("--sys", sy.sys, "labeled system")->required();
  c_synth->add_option("--state", sy.state, "initial state")->required();
  c_synth->add_option("--spec", sy.spec, "positive temporal specification");
  c_synth->add_option("--spec-file", sy.spec_file, "file holding the specification");
  auto* opt_synth_eps = c_synth->add_option("--eps", sy.eps, "tolerance used by --tr");
  c_synth->add_flag("--tr", sy.use_tr, "blur the specification before synthesis");
  c_synth->add_flag("--json", sy.json, "JSON output");

  // transfer ----------------------------------------------------------------------
  struct {
    std::string sample, abs, spec, spec_file;
    double eps = 0;
    bool json = false;
  } tf;
  auto* c_transfer = app.add_subcommand(
      "transfer", "check strategy transfer from an abstraction to a sample system");
  c_transfer->add_option("--sample", tf.sample, "sample (refined) labeled system")->required();
  c_transfer->add_option("--abs", tf.abs, "abstraction labeled system")->required();
  c_transfer->add_option("--eps", tf.eps, "observation tolerance")->required();
  c_transfer->add_option("--spec", tf.spec, "positive temporal specification");
  c_transfer->add_option("--spec-file", tf.spec_file, "file holding the specification");
  c_transfer->add_flag("--json", tf.json, "JSON output");

  // gen ----------------------------------------------------------------------------
  struct {
    std::string kind = "ats", name = "G", out_file;
    int states = 3, agents = 2, controls = 2, disturbances = 2, obs = 3, dim = 2,
        max_menu = 2;
    double density = 0.4;
    bool chebyshev = false;
    bool json = false;
    std::uint64_t seed = 0;
  } g;
  auto* c_gen = app.add_subcommand("gen", "generate a random valid system (deterministic per seed)");
  c_gen->add_option("--kind", g.kind, "ats or lats")
      ->check(CLI::IsMember({"ats", "lats"}));
  c_gen->add_option("--states", g.states, "state count");
  c_gen->add_option("--agents", g.agents, "agent count (ats)");
  c_gen->add_option("--controls", g.controls, "control count (lats)");
  c_gen->add_option("--disturbances", g.disturbances, "disturbance count (lats)");
  c_gen->add_option("--obs", g.obs, "observation count");
  c_gen->add_flag("--chebyshev", g.chebyshev, "vector observations instead of a table");
  c_gen->add_option("--dim", g.dim, "vector dimension (with --chebyshev)");
  c_gen->add_option("--max-menu", g.max_menu, "per-agent choice-set cap (ats)");
  c_gen->add_option("--density", g.density, "extra-successor chance (lats)");
  c_gen->add_option("--name", g.name, "system name");
  c_gen->add_option("--seed", g.seed, "generator seed")->envname("ALTBISIM_SEED");
  c_gen->add_option("--out", g.out_file, "write the system file here instead of stdout");
  c_gen->add_flag("--json", g.json, "JSON output");

  // oracle ---------------------------------------------------------------------------
  auto* c_oracle = app.add_subcommand("oracle", "brute-force reference implementations");
  c_oracle->require_subcommand(1);

  struct {
    std::string sys1, sys2, agents;
    double eps = 0;
    bool json = false;
  } ob;
  auto* c_obisim = c_oracle->add_subcommand("bisim", "bisimulation by relation enumeration");
  c_obisim->add_option("--sys1", ob.sys1, "left agent system")->required();
  c_obisim->add_option("--sys2", ob.sys2, "right agent system")->required();
  c_obisim->add_option("--agents", ob.agents, "coalition, e.g. 1,3")->required();
  c_obisim->add_option("--eps", ob.eps, "observation tolerance")->required();
  c_obisim->add_flag("--json", ob.json, "JSON output");

  struct {
    std::string sys1, sys2;
    double eps = 0;
    bool json = false;
  } oa;
  auto* c_oaea = c_oracle->add_subcommand("aea-bisim",
                                          "labeled bisimulation by relation enumeration");
  c_oaea->add_option("--sys1", oa.sys1, "left labeled system")->required();
  c_oaea->add_option("--sys2", oa.sys2, "right labeled system")->required();
  c_oaea->add_option("--eps", oa.eps, "observation tolerance")->required();
  c_oaea->add_flag("--json", oa.json, "JSON output");

  struct {
    std::string sys, state, formula, formula_file;
    double eps = 0;
    int bounded = 0;
    bool json = false;
  } oc;
  auto* c_ocheck = c_oracle->add_subcommand("check", "bounded check by bare game-tree search");
  c_ocheck->add_option("--sys", oc.sys, "agent system")->required();
  c_ocheck->add_option("--state", oc.state, "state name")->required();
  c_ocheck->add_option("--formula", oc.formula, "state formula");
  c_ocheck->add_option("--formula-file", oc.formula_file, "file holding the formula");
  c_ocheck->add_option("--eps", oc.eps, "observation tolerance")->required();
  c_ocheck->add_option("--bounded", oc.bounded, "horizon")->required();
  c_ocheck->add_flag("--json", oc.json, "JSON output");

  struct {
    std::string sys, state, spec, spec_file;
    double eps = 0;
    bool use_tr = false;
    int memory_bound = 8;
    std::uint64_t table_cap = 2000000;
    bool json = false;
  } os;
  auto* c_osynth =
      c_oracle->add_subcommand("synth", "realizability by exhaustive strategy search");
  c_osynth->add_option("--sys", os.sys, "labeled system")->required();
  c_osynth->add_option("--state", os.state, "initial state")->required();
  c_osynth->add_option("--spec", os.spec, "positive temporal specification");
  c_osynth->add_option("--spec-file", os.spec_file, "file holding the specification");
  auto* opt_osynth_eps = c_osynth->add_option("--eps", os.eps, "tolerance used by --tr");
  c_osynth->add_flag("--tr", os.use_tr, "blur the specification before the search");
  c_osynth->add_option("--memory-bound", os.memory_bound, "obligation-space cap");
  c_osynth->add_option("--table-cap", os.table_cap, "strategy-table cap");
  c_osynth->add_flag("--json", os.json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    // ---- validate ----
    if (c_validate->parsed()) {
      ParsedSystem s = parse_system(detail::slurp(v.sys));
      std::vector<Violation> bad = std::holds_alternative<AgentAts>(s)
                                       ? validate(std::get<AgentAts>(s))
                                       : validate(std::get<LabelAts>(s));
      std::string kind = std::holds_alternative<AgentAts>(s) ? "ats" : "lats";
      if (v.json) {
        Json j{{"file", v.sys}, {"kind", kind}, {"valid", bad.empty()},
               {"violations", json_violations(bad)}};
        out << j.dump(2) << "\n";
      } else if (bad.empty()) {
        out << "valid " << kind << " system\n";
      } else {
        for (const Violation& x : bad) out << x.code << ": " << x.detail << "\n";
      }
      return bad.empty() ? 0 : 1;
    }

    // ---- bisim ----
    if (c_bisim->parsed()) {
      AgentAts T1 = detail::load_agent(b.sys1);
      AgentAts T2 = detail::load_agent(b.sys2);
      IntSet ag = detail::parse_agent_list(b.agents);
      BisimResult res = approx_bisim(T1, T2, ag, b.eps);
      Json j = json_bisim(res, T1, T2);
      if (!b.dist.empty()) {
        int q1 = detail::need_state(T1, b.dist[0]);
        int q2 = detail::need_state(T2, b.dist[1]);
        DistinguishResult d = distinguish(T1, T2, ag, b.eps, q1, q2, &res);
        j["distinguish"] = json_distinguish(d, T1, T2, q1, q2);
      }
      if (b.json) {
        out << j.dump(2) << "\n";
      } else {
        out << "epsilon " << fmt_double(res.eps) << ", coalition {" << join_ints(res.agents)
            << "}, " << res.rounds << " refinement round(s)\n";
        out << "relation (" << res.relation.size() << " pair(s)):\n";
        detail::render_relation(out, res.relation, T1, T2);
        out << "systems bisimilar: " << (res.systems_bisimilar ? "yes" : "no") << "\n";
        if (j.contains("distinguish")) {
          const Json& d = j["distinguish"];
          if (d["bisimilar"].get<bool>()) {
            out << "states " << b.dist[0] << ", " << b.dist[1] << " are bisimilar\n";
          } else {
            out << "phi:   " << d["phi"].get<std::string>() << "\n";
            out << "gamma: " << d["gamma"].get<std::string>() << "\n";
          }
        }
      }
      return res.systems_bisimilar ? 0 : 1;
    }

    // ---- aea-bisim ----
    if (c_aea->parsed()) {
      LabelAts T1 = detail::load_label(ab.sys1);
      LabelAts T2 = detail::load_label(ab.sys2);
      BisimResult res = aea_bisim(T1, T2, ab.eps);
      if (ab.json) {
        out << json_bisim(res, T1, T2).dump(2) << "\n";
      } else {
        out << "epsilon " << fmt_double(res.eps) << ", " << res.rounds
            << " refinement round(s)\n";
        out << "relation (" << res.relation.size() << " pair(s)):\n";
        detail::render_relation(out, res.relation, T1, T2);
        out << "systems bisimilar: " << (res.systems_bisimilar ? "yes" : "no") << "\n";
      }
      return res.systems_bisimilar ? 0 : 1;
    }

    // ---- check ----
    if (c_check->parsed()) {
      AgentAts T = detail::load_agent(ck.sys);
      int q = detail::need_state(T, ck.state);
      std::string text = detail::pick_text(ck.formula, ck.formula_file, "--formula");
      StatePtr f = parse_state_formula(text, detail::opts_for(T));
      Json j{{"system", T.name}, {"state", ck.state}, {"formula", to_string(f)},
             {"epsilon", ck.eps}};
      int code = 1;
      if (*opt_bounded) {
        V3 val = eval_bounded(T, q, f, ck.bounded, ck.eps);
        j["mode"] = "bounded";
        j["horizon"] = ck.bounded;
        j["value"] = to_string(val);
        code = val == V3::yes ? 0 : 1;
        if (!ck.json) out << to_string(val) << "\n";
      } else {
        EvalResult res = eval_state_full(T, q, f, ck.eps);
        j["mode"] = "exact";
        j["value"] = res.value ? "true" : "false";
        if (res.witness) j["witness"] = json_strategy(*res.witness, T);
        code = res.value ? 0 : 1;
        if (!ck.json) out << (res.value ? "true" : "false") << "\n";
      }
      if (ck.json) out << j.dump(2) << "\n";
      return code;
    }

    // ---- partner ----
    if (c_partner->parsed()) {
      IntSet ag = detail::parse_agent_list(pa.agents);
      std::string text = detail::pick_text(pa.formula, pa.formula_file, "--formula");
      std::string rendered, partner;
      bool in_domain = false;
      if (pa.path) {
        PathPtr f = parse_path_formula(text);
        rendered = to_string(f);
        if (auto p = e_partner(f, ag, pa.eps)) {
          in_domain = true;
          partner = to_string(*p);
        }
      } else {
        StatePtr f = parse_state_formula(text);
        rendered = to_string(f);
        if (auto p = h_partner(f, ag, pa.eps)) {
          in_domain = true;
          partner = to_string(*p);
        }
      }
      if (pa.json) {
        Json j{{"formula", rendered}, {"kind", pa.path ? "path" : "state"},
               {"agents", ag}, {"epsilon", pa.eps}, {"in_domain", in_domain}};
        if (in_domain) j["partner"] = partner;
        out << j.dump(2) << "\n";
      } else {
        out << (in_domain ? partner : "not-in-domain") << "\n";
      }
      return in_domain ? 0 : 1;
    }

    // ---- tr ----
    if (c_tr->parsed()) {
      std::string text = detail::pick_text(tr.formula, tr.formula_file, "--formula");
      LtlPtr f = parse_ltl(text);
      LtlPtr blurred = tr_epsilon(f, tr.eps);
      if (tr.json) {
        Json j{{"input", to_string(f)}, {"epsilon", tr.eps},
               {"output", to_string(blurred)}};
        out << j.dump(2) << "\n";
      } else {
        out << to_string(blurred) << "\n";
      }
      return 0;
    }

    // ---- distinguish ----
    if (c_dist->parsed()) {
      AgentAts T1 = detail::load_agent(di.sys1);
      AgentAts T2 = detail::load_agent(di.sys2);
      IntSet ag = detail::parse_agent_list(di.agents);
      int q1 = detail::need_state(T1, di.left);
      int q2 = detail::need_state(T2, di.right);
      DistinguishResult d = distinguish(T1, T2, ag, di.eps, q1, q2);
      if (di.json) {
        out << json_distinguish(d, T1, T2, q1, q2).dump(2) << "\n";
      } else if (d.bisimilar) {
        out << "states are bisimilar; no distinguishing formula exists\n";
      } else {
        out << "phi:   " << to_string(d.phi) << "\n";
        out << "gamma: " << to_string(d.gamma) << "\n";
        out << "refuted in round " << d.round << " (" << reason_str(d.source) << ")\n";
      }
      return d.bisimilar ? 1 : 0;
    }

    // ---- synth ----
    if (c_synth->parsed()) {
      LabelAts T = detail::load_label(sy.sys);
      int q0 = detail::need_state(T, sy.state);
      std::string text = detail::pick_text(sy.spec, sy.spec_file, "--spec");
      LtlPtr spec = parse_ltl(text, detail::opts_for(T));
      if (sy.use_tr) {
        if (!*opt_synth_eps) throw input_error("--tr requires --eps");
        spec = tr_epsilon(spec, sy.eps);
      }
      SynthResult res = synthesize(T, q0, spec);
      if (sy.json) {
        Json j = json_synth(res, T);
        j["spec"] = to_string(spec);
        out << j.dump(2) << "\n";
      } else if (res.realizable) {
        out << "realizable, horizon " << res.horizon << "\n";
        for (const SynthNodeInfo& n : res.nodes) {
          out << "  " << T.state_names[static_cast<size_t>(n.state)] << " | " << n.residual
              << " -> ";
          if (n.goal) {
            out << "discharged\n";
            continue;
          }
          std::vector<std::string> names;
          for (int a : n.actions)
            names.push_back(T.control_names[static_cast<size_t>(a)]);
          out << (names.empty() ? "-" : join(names, ",")) << "\n";
        }
      } else {
        out << "unrealizable\n";
      }
      return res.realizable ? 0 : 1;
    }

    // ---- transfer ----
    if (c_transfer->parsed()) {
      LabelAts sample = detail::load_label(tf.sample);
      LabelAts abs = detail::load_label(tf.abs);
      std::string text = detail::pick_text(tf.spec, tf.spec_file, "--spec");
      LtlPtr spec = parse_ltl(text, detail::opts_for(abs));
      TransferReport rep = transfer_harness(sample, abs, tf.eps, spec);
      if (tf.json) {
        out << json_transfer(rep, sample, abs).dump(2) << "\n";
      } else {
        out << "bisimilar at epsilon " << fmt_double(tf.eps) << ": "
            << (rep.bisim.systems_bisimilar ? "yes" : "no") << ", "
            << rep.bisim.relation.size() << " related pair(s)\n";
        for (const TransferRow& row : rep.rows)
          out << "  (" << sample.state_names[static_cast<size_t>(row.q_sample)] << ", "
              << abs.state_names[static_cast<size_t>(row.q_abs)] << "): abs "
              << (row.abs_realizable ? "realizable" : "unrealizable") << ", sample "
              << (row.sample_realizable ? "realizable" : "unrealizable")
              << (row.violation ? "  <-- VIOLATION" : "") << "\n";
        out << rep.violations << " violation(s)\n";
      }
      return rep.violations == 0 ? 0 : 1;
    }

    // ---- gen ----
    if (c_gen->parsed()) {
      Rng rng(g.seed);
      ObsGenSpec ospec;
      ospec.chebyshev = g.chebyshev;
      ospec.count = g.obs;
      ospec.dim = g.dim;
      MetricObsSpace space = gen_obs_space(ospec, rng);
      std::string dsl;
      if (g.kind == "ats") {
        AgentGenSpec as;
        as.name = g.name;
        as.states = g.states;
        as.agents = g.agents;
        as.max_menu = g.max_menu;
        dsl = to_dsl(gen_agent_ats(as, space, rng));
      } else {
        LabelGenSpec ls;
        ls.name = g.name;
        ls.states = g.states;
        ls.controls = g.controls;
        ls.disturbances = g.disturbances;
        ls.density = g.density;
        dsl = to_dsl(gen_label_ats(ls, space, rng));
      }
      if (!g.out_file.empty()) {
        std::ofstream f(g.out_file, std::ios::binary);
        if (!f) throw input_error("cannot write file '" + g.out_file + "'");
        f << dsl;
      }
      if (g.json) {
        Json j{{"kind", g.kind}, {"seed", g.seed}, {"dsl", dsl}};
        out << j.dump(2) << "\n";
      } else if (g.out_file.empty()) {
        out << dsl;
      } else {
        out << "wrote " << g.out_file << "\n";
      }
      return 0;
    }

    // ---- oracle bisim ----
    if (c_obisim->parsed()) {
      AgentAts T1 = detail::load_agent(ob.sys1);
      AgentAts T2 = detail::load_agent(ob.sys2);
      IntSet ag = detail::parse_agent_list(ob.agents);
      auto rel = enum_bisim(T1, T2, ag, ob.eps);
      auto [lc, rc] = detail::relation_covers(rel, T1.state_count(), T2.state_count());
      if (ob.json) {
        Json jr = Json::array();
        for (auto [l, r] : rel)
          jr.push_back({T1.state_names[static_cast<size_t>(l)],
                        T2.state_names[static_cast<size_t>(r)]});
        Json j{{"epsilon", ob.eps}, {"agents", ag}, {"relation", jr},
               {"systems_bisimilar", lc && rc}};
        out << j.dump(2) << "\n";
      } else {
        out << "relation (" << rel.size() << " pair(s)):\n";
        detail::render_relation(out, rel, T1, T2);
        out << "systems bisimilar: " << (lc && rc ? "yes" : "no") << "\n";
      }
      return lc && rc ? 0 : 1;
    }

    // ---- oracle aea-bisim ----
    if (c_oaea->parsed()) {
      LabelAts T1 = detail::load_label(oa.sys1);
      LabelAts T2 = detail::load_label(oa.sys2);
      auto rel = enum_aea_bisim(T1, T2, oa.eps);
      auto [lc, rc] = detail::relation_covers(rel, T1.state_count(), T2.state_count());
      if (oa.json) {
        Json jr = Json::array();
        for (auto [l, r] : rel)
          jr.push_back({T1.state_names[static_cast<size_t>(l)],
                        T2.state_names[static_cast<size_t>(r)]});
        Json j{{"epsilon", oa.eps}, {"relation", jr}, {"systems_bisimilar", lc && rc}};
        out << j.dump(2) << "\n";
      } else {
        out << "relation (" << rel.size() << " pair(s)):\n";
        detail::render_relation(out, rel, T1, T2);
        out << "systems bisimilar: " << (lc && rc ? "yes" : "no") << "\n";
      }
      return lc && rc ? 0 : 1;
    }

    // ---- oracle check ----
    if (c_ocheck->parsed()) {
      AgentAts T = detail::load_agent(oc.sys);
      int q = detail::need_state(T, oc.state);
      std::string text = detail::pick_text(oc.formula, oc.formula_file, "--formula");
      StatePtr f = parse_state_formula(text, detail::opts_for(T));
      V3 val = bounded_game(T, q, f, oc.bounded, oc.eps);
      if (oc.json) {
        Json j{{"system", T.name}, {"state", oc.state}, {"formula", to_string(f)},
               {"epsilon", oc.eps}, {"horizon", oc.bounded}, {"value", to_string(val)}};
        out << j.dump(2) << "\n";
      } else {
        out << to_string(val) << "\n";
      }
      return val == V3::yes ? 0 : 1;
    }

    // ---- oracle synth ----
    if (c_osynth->parsed()) {
      LabelAts T = detail::load_label(os.sys);
      int q0 = detail::need_state(T, os.state);
      std::string text = detail::pick_text(os.spec, os.spec_file, "--spec");
      LtlPtr spec = parse_ltl(text, detail::opts_for(T));
      if (os.use_tr) {
        if (!*opt_osynth_eps) throw input_error("--tr requires --eps");
        spec = tr_epsilon(spec, os.eps);
      }
      EnumStrategiesResult res =
          enum_strategies(T, q0, spec, os.memory_bound, os.table_cap);
      if (os.json) {
        Json j{{"spec", to_string(spec)}, {"realizable", res.realizable},
               {"tables_tried", res.tables_tried}};
        out << j.dump(2) << "\n";
      } else {
        out << (res.realizable ? "realizable" : "unrealizable") << " ("
            << res.tables_tried << " table(s) tried)\n";
      }
      return res.realizable ? 0 : 1;
    }
  } catch (const input_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const strategy_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const unsupported_exact& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable with require_subcommand(1)
}

// Convenience overload for in-process use (tests): args without the program
// name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  std::vector<const char*> argv{"altbisim"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace altbisim
