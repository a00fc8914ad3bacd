#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deonmf/ast.hpp"
#include "deonmf/corpus.hpp"
#include "deonmf/errors.hpp"
#include "deonmf/grounder.hpp"
#include "deonmf/parser.hpp"
#include "deonmf/semantics.hpp"
#include "deonmf/solver.hpp"
#include "deonmf/sortcheck.hpp"

namespace {

using namespace deonmf;

constexpr int kExitMet = 0;
constexpr int kExitContrary = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct CommonArgs {
  std::string file;
  std::string goal_name;
  std::string scope_str;
  std::vector<std::string> disable;
  std::vector<std::string> enable;
  std::uint64_t budget = kDefaultCellBudget;
  double timeout = 0;
  bool deterministic = false;
  std::string format = "text";
  int jobs = 1;
  bool learn = true;
};

std::uint64_t default_budget() {
  if (const char* env = std::getenv("DEONMF_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return kDefaultCellBudget;
}

void add_solver_opts(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--budget", a.budget,
                  "cell budget bounding value universes and tables");
  cmd->add_option("--timeout", a.timeout, "per-solve timeout in seconds");
  cmd->add_option("--jobs", a.jobs, "parallel workers for the search");
  cmd->add_flag("--learn,!--no-learn", a.learn,
                "conflict-driven search with clause learning (default on; "
                "--no-learn falls back to plain chronological search)");
  cmd->add_flag("--deterministic", a.deterministic,
                "stable output: no timings, single worker");
}

std::string condition_name_list() {
  std::string out;
  for (const std::string& n : ConditionSet::names()) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

void add_condition_opts(CLI::App* cmd, CommonArgs& a) {
  const std::string names = " (repeatable; one of: " + condition_name_list() +
                            ")";
  cmd->add_option("--disable", a.disable, "frame condition to turn off" + names);
  cmd->add_option("--enable", a.enable, "frame condition to turn on" + names);
}

ConditionSet conditions_from(const CommonArgs& a) {
  ConditionSet cs;
  for (const auto& n : a.disable) cs.set(n, false);
  for (const auto& n : a.enable) cs.set(n, true);
  return cs;
}

CorpusOptions corpus_options(const CommonArgs& a) {
  CorpusOptions o;
  o.conditions = conditions_from(a);
  o.cell_budget = a.budget;
  o.timeout_seconds = a.timeout;
  o.deterministic = a.deterministic;
  o.jobs = a.jobs;
  o.learn = a.learn;
  return o;
}

Theory load_theory(const std::string& file) {
  Theory t = parse_theory_file(file);
  sort_check(t);  // throws on ill-sorted input
  return t;
}

Scope scope_for(const CommonArgs& a, const Scope& fallback) {
  if (a.scope_str.empty()) return fallback;
  return parse_scope_string(a.scope_str);
}

nlohmann::ordered_json scope_json(const Scope& s) {
  return {{"c", s.nc}, {"e", s.ne}, {"w", s.nw}};
}

nlohmann::ordered_json stats_json(const SolverStats& st, bool timing) {
  nlohmann::ordered_json j;
  j["decisions"] = st.decisions;
  j["propagations"] = st.propagations;
  j["conflicts"] = st.conflicts;
  j["learned"] = st.learned;
  if (timing) j["seconds"] = st.seconds;
  return j;
}

void print_outcome(const CommonArgs& a, const std::string& command,
                   const std::string& status, const std::string& detail,
                   const std::optional<Interpretation>& model,
                   const SolverStats& stats,
                   const std::vector<Scope>& scopes_checked = {}) {
  if (a.format == "json") {
    nlohmann::ordered_json j;
    j["command"] = command;
    if (!a.goal_name.empty()) j["goal"] = a.goal_name;
    j["status"] = status;
    j["detail"] = detail;
    if (!scopes_checked.empty()) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const Scope& s : scopes_checked) arr.push_back(scope_json(s));
      j["scopes_checked"] = arr;
    }
    if (model.has_value()) {
      j["model"] = nlohmann::ordered_json::parse(render_model_json(*model));
    }
    j["stats"] = stats_json(stats, !a.deterministic);
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << status << ": " << detail << '\n';
  if (model.has_value()) std::cout << render_model_text(*model);
  std::cout << stats.to_string(!a.deterministic) << '\n';
}

int run_parse(const CommonArgs& a) {
  Theory t = load_theory(a.file);
  std::cout << print_theory(t);
  return kExitMet;
}

int run_check(const CommonArgs& a) {
  Theory t = load_theory(a.file);
  std::cout << "aliases: " << t.aliases.user_aliases().size() << '\n';
  std::cout << "consts: " << t.signature.user_entries().size() << '\n';
  std::cout << "defs: " << t.definitions.size() << '\n';
  std::cout << "axioms: " << t.axioms.size() << '\n';
  std::cout << "goals: " << t.goals.size() << '\n';
  for (const auto& g : t.goals) {
    std::cout << "goal " << g.name << " [" << expect_to_string(g.expect)
              << " at " << g.scope.to_string() << "]\n";
  }
  return kExitMet;
}

int run_consistency(const CommonArgs& a) {
  Theory t = load_theory(a.file);
  Scope scope = scope_for(a, Scope{1, 1, 2});
  CorpusOptions opts = corpus_options(a);
  std::vector<MetaPtr> premises;
  for (const auto& [n, m] : t.axioms) premises.push_back(m);
  MetaPtr trivial = mk_valid(mk_top());
  ScopeOutcome o =
      solve_goal_at_scope(t, premises, trivial, /*refute=*/false, scope, opts);
  if (o.status == SolveStatus::Timeout) {
    print_outcome(a, "consistency", "timeout",
                  "search timed out at " + scope.to_string(), std::nullopt,
                  o.stats);
    return kExitResource;
  }
  if (o.status == SolveStatus::Unsat) {
    print_outcome(a, "consistency", "unsat",
                  "axioms are jointly unsatisfiable at " + scope.to_string(),
                  std::nullopt, o.stats);
    return kExitContrary;
  }
  print_outcome(a, "consistency", "sat",
                "axioms satisfiable at " + scope.to_string() +
                    ", model verified by re-evaluation",
                o.model, o.stats);
  return kExitMet;
}

void keep_only_goal(Theory& t, const std::string& name) {
  std::vector<Goal> kept;
  for (auto& g : t.goals)
    if (g.name == name) kept.push_back(std::move(g));
  if (kept.empty())
    throw std::invalid_argument("no goal named " + name + " in this file");
  t.goals = std::move(kept);
}

const Goal& find_goal_or_die(const Theory& t, const std::string& name) {
  const Goal* g = t.find_goal(name);
  if (g == nullptr) {
    throw std::invalid_argument("no goal named " + name + " in this file");
  }
  return *g;
}

int run_countermodel(const CommonArgs& a) {
  Theory t = load_theory(a.file);
  const Goal& goal = find_goal_or_die(t, a.goal_name);
  Scope scope = scope_for(a, goal.scope);
  CorpusOptions opts = corpus_options(a);
  std::vector<MetaPtr> premises;
  for (const auto& [n, m] : axioms_for_goal(t, goal)) premises.push_back(m);
  ScopeOutcome o = solve_goal_at_scope(t, premises, goal.formula,
                                       /*refute=*/true, scope, opts);
  if (o.status == SolveStatus::Timeout) {
    print_outcome(a, "countermodel", "timeout",
                  "search timed out at " + scope.to_string(), std::nullopt,
                  o.stats);
    return kExitResource;
  }
  if (o.status == SolveStatus::Unsat) {
    print_outcome(a, "countermodel", "none",
                  "no countermodel exists at " + scope.to_string(),
                  std::nullopt, o.stats);
    return kExitContrary;
  }
  print_outcome(a, "countermodel", "found",
                "countermodel at " + scope.to_string() +
                    ", verified by re-evaluation",
                o.model, o.stats);
  return kExitMet;
}

int run_valid(const CommonArgs& a) {
  Theory t = load_theory(a.file);
  const Goal& goal = find_goal_or_die(t, a.goal_name);
  Scope limit = scope_for(a, goal.scope);
  CorpusOptions opts = corpus_options(a);
  std::vector<MetaPtr> premises;
  for (const auto& [n, m] : axioms_for_goal(t, goal)) premises.push_back(m);
  SolverStats stats;
  std::vector<Scope> checked;
  for (const Scope& s : scopes_upto(limit)) {
    checked.push_back(s);
    ScopeOutcome o = solve_goal_at_scope(t, premises, goal.formula,
                                         /*refute=*/true, s, opts);
    stats.accumulate(o.stats);
    if (o.status == SolveStatus::Timeout) {
      print_outcome(a, "valid", "timeout",
                    "refutation search timed out at " + s.to_string(),
                    std::nullopt, stats, checked);
      return kExitResource;
    }
    if (o.status == SolveStatus::Sat) {
      print_outcome(a, "valid", "counterexample",
                    "counterexample found at " + s.to_string(), o.model,
                    stats, checked);
      return kExitContrary;
    }
  }
  print_outcome(a, "valid", "bounded-valid",
                "bounded-valid up to (" + limit.to_string() + ")",
                std::nullopt, stats, checked);
  return kExitMet;
}

int run_corpus_cmd(const CommonArgs& a, const std::vector<std::string>& files) {
  CorpusOptions opts = corpus_options(a);
  bool all_passed = true;
  if (a.format == "json") {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& f : files) {
      Theory t = load_theory(f);
      if (!a.goal_name.empty()) keep_only_goal(t, a.goal_name);
      CorpusReport r = run_corpus(t, opts);
      all_passed = all_passed && r.all_passed;
      nlohmann::ordered_json e;
      e["file"] = f;
      e["report"] = nlohmann::ordered_json::parse(r.to_json());
      out.push_back(std::move(e));
    }
    std::cout << out.dump(2) << '\n';
  } else {
    for (const auto& f : files) {
      Theory t = load_theory(f);
      if (!a.goal_name.empty()) keep_only_goal(t, a.goal_name);
      CorpusReport r = run_corpus(t, opts);
      all_passed = all_passed && r.all_passed;
      std::cout << "== " << f << "\n" << r.to_text();
    }
  }
  return all_passed ? kExitMet : kExitContrary;
}

int run_emit_dimacs(const CommonArgs& a, const std::string& mode,
                    const std::string& out_path) {
  Theory t = load_theory(a.file);
  const Goal& goal = find_goal_or_die(t, a.goal_name);
  Scope scope = scope_for(a, goal.scope);
  Grounder g(t, scope, conditions_from(a), a.budget);
  for (const auto& [n, m] : axioms_for_goal(t, goal)) {
    g.require(g.ground_meta(m));
  }
  int lit = g.ground_meta(goal.formula);
  g.require(mode == "refute" ? -lit : lit);
  if (out_path.empty()) {
    g.to_dimacs(std::cout);
  } else {
    std::ofstream os(out_path);
    if (!os) {
      throw std::invalid_argument("cannot open output file " + out_path);
    }
    g.to_dimacs(os);
  }
  return kExitMet;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite model finder and bounded validity checker for a "
               "quantified dyadic deontic logic with two-dimensional "
               "contexts"};
  app.require_subcommand(1);

  CommonArgs a;
  a.budget = default_budget();
  std::vector<std::string> corpus_files;
  std::string dimacs_mode = "refute";
  std::string dimacs_out;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", a.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* parse_cmd = app.add_subcommand("parse",
                                           "parse a file and print it back");
  parse_cmd->add_option("file", a.file, "input file")->required();

  CLI::App* check_cmd =
      app.add_subcommand("check", "parse and sort-check a file");
  check_cmd->add_option("file", a.file, "input file")->required();

  CLI::App* cons_cmd = app.add_subcommand(
      "consistency", "search for a model of all axioms at a scope");
  cons_cmd->add_option("file", a.file, "input file")->required();
  cons_cmd->add_option("--scope", a.scope_str, "scope, e.g. c=1,e=1,w=2");
  add_condition_opts(cons_cmd, a);
  add_solver_opts(cons_cmd, a);
  add_format(cons_cmd);

  CLI::App* cm_cmd = app.add_subcommand(
      "countermodel", "search for a countermodel to a named goal");
  cm_cmd->add_option("file", a.file, "input file")->required();
  cm_cmd->add_option("--goal", a.goal_name, "goal name")->required();
  cm_cmd->add_option("--scope", a.scope_str, "scope override");
  add_condition_opts(cm_cmd, a);
  add_solver_opts(cm_cmd, a);
  add_format(cm_cmd);

  CLI::App* valid_cmd = app.add_subcommand(
      "valid", "check a named goal by iterative deepening refutation");
  valid_cmd->add_option("file", a.file, "input file")->required();
  valid_cmd->add_option("--goal", a.goal_name, "goal name")->required();
  valid_cmd->add_option("--scope", a.scope_str, "largest scope to search");
  add_condition_opts(valid_cmd, a);
  add_solver_opts(valid_cmd, a);
  add_format(valid_cmd);

  CLI::App* corpus_cmd = app.add_subcommand(
      "corpus", "run every goal of the given files as a regression corpus");
  corpus_cmd->add_option("files", corpus_files, "input files")->required();
  corpus_cmd->add_option("--goal", a.goal_name,
                         "run only the goal with this name");
  add_condition_opts(corpus_cmd, a);
  add_solver_opts(corpus_cmd, a);
  add_format(corpus_cmd);

  CLI::App* dimacs_cmd = app.add_subcommand(
      "emit-dimacs", "ground a goal to DIMACS CNF without solving");
  dimacs_cmd->add_option("file", a.file, "input file")->required();
  dimacs_cmd->add_option("--goal", a.goal_name, "goal name")->required();
  dimacs_cmd->add_option("--scope", a.scope_str, "scope override");
  dimacs_cmd->add_option("--mode", dimacs_mode, "satisfy or refute")
      ->check(CLI::IsMember({"satisfy", "refute"}));
  dimacs_cmd->add_option("-o,--output", dimacs_out, "output path");
  add_condition_opts(dimacs_cmd, a);
  dimacs_cmd->add_option("--budget", a.budget, "cell budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitMet : kExitUsage;
  }

  try {
    if (parse_cmd->parsed()) return run_parse(a);
    if (check_cmd->parsed()) return run_check(a);
    if (cons_cmd->parsed()) return run_consistency(a);
    if (cm_cmd->parsed()) return run_countermodel(a);
    if (valid_cmd->parsed()) return run_valid(a);
    if (corpus_cmd->parsed()) return run_corpus_cmd(a, corpus_files);
    if (dimacs_cmd->parsed()) {
      return run_emit_dimacs(a, dimacs_mode, dimacs_out);
    }
  } catch (const ScopeTooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  } catch (const SurfaceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedSort& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
