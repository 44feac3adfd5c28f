#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dessec/dessec.hpp"

using namespace dessec;

namespace {

constexpr int exit_safe = 0;
constexpr int exit_unsafe = 1;
constexpr int exit_error = 2;
constexpr int exit_disagreement = 3;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write '" + path + "'");
  out << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct BuildArgs {
  std::string plant, supervisor, mode, vulnerable, out;
};

int cmd_build(const BuildArgs& a) {
  auto mode = parse_mode(a.mode);
  if (!mode) throw InvalidInputError("mode must be ae, se or si");
  auto names = split(a.vulnerable, ',');
  if (names.empty()) throw InvalidInputError("vulnerable set empty");
  auto plant = load_model(a.plant);
  auto sup = load_model(a.supervisor);
  auto m = build_model(*mode, plant.automaton, sup.automaton, {names.begin(), names.end()}, plant.unsafe);
  write_output(a.out, serialize_attacked_model(m));
  return exit_safe;
}

struct CheckArgs {
  std::string model, method = "all";
};

int cmd_check(const CheckArgs& a) {
  auto m = load_attacked_model(a.model);
  auto deadlocks = reachable_deadlocks(m);
  if (!deadlocks.empty()) {
    std::cerr << "warning: closed loop deadlocks at plant states";
    for (const auto& d : deadlocks) std::cerr << ' ' << d;
    std::cerr << '\n';
  }
  nlohmann::ordered_json out;
  bool safe = true;
  int code = exit_safe;
  if (a.method == "all") {
    auto r = check_all(m);
    safe = r.diagnoser.safe;
    out["safe"] = safe;
    out["agree"] = r.agree();
    out["verdicts"] = {to_json(r.diagnoser), to_json(r.verifier), to_json(r.oracle)};
    if (!r.agree()) {
      std::cerr << "error: methods disagree\n";
      code = exit_disagreement;
    }
  } else {
    Verdict v;
    if (a.method == "diagnoser") v = check_gf_safe_diagnoser(m);
    else if (a.method == "verifier") v = check_ae_safe_verifier(m);
    else v = oracle_defense_simulation(m);
    safe = v.safe;
    out = to_json(v);
  }
  std::cout << out.dump(2) << '\n';
  if (code != exit_safe) return code;
  return safe ? exit_safe : exit_unsafe;
}

struct ExportArgs {
  std::string model, format = "dot";
};

int cmd_export(const ExportArgs& a) {
  auto text = read_file(a.model);
  auto doc = YAML::Load(text);
  if (doc.IsMap() && doc["format"]) {
    std::cout << to_dot(parse_attacked_model(text, a.model));
  } else {
    auto m = parse_model(text, a.model);
    std::cout << to_dot(m.automaton, m.unsafe);
  }
  return exit_safe;
}

AttackerPolicy parse_policy(const std::string& text) {
  if (text == "all-out") return AttackerPolicy::all_out();
  if (text.rfind("random:", 0) == 0) {
    double p = 0;
    std::size_t used = 0;
    try {
      p = std::stod(text.substr(7), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 7) throw InvalidInputError("bad policy '" + text + "'");
    return AttackerPolicy::random(p);
  }
  std::ifstream in(text);
  if (!in) throw InvalidInputError("unknown policy '" + text + "'");
  std::vector<bool> script;
  std::string word;
  while (in >> word) {
    if (word == "1" || word == "attack") script.push_back(true);
    else if (word == "0" || word == "pass") script.push_back(false);
    else throw InvalidInputError(text + ": script entries must be attack/pass or 1/0");
  }
  return AttackerPolicy::scripted(std::move(script));
}

struct SimulateArgs {
  std::string model, policy = "all-out";
  std::uint64_t seed = 0;
  std::size_t max_steps = 100;
};

int cmd_simulate(const SimulateArgs& a) {
  auto policy = parse_policy(a.policy);
  auto m = load_attacked_model(a.model);
  Simulator sim(m, policy, a.seed);
  auto s = sim.initial();
  std::cout << sim.log_line(0, s) << '\n';
  for (std::size_t i = 1; i <= a.max_steps; ++i) {
    auto next = sim.step(s);
    if (!next) break;
    s = std::move(*next);
    std::cout << sim.log_line(i, s) << '\n';
  }
  return exit_safe;
}

struct SynthesizeArgs {
  std::string plant, spec, out;
};

int cmd_synthesize(const SynthesizeArgs& a) {
  auto g = load_model(a.plant);
  auto spec = load_model(a.spec);
  const auto& ab = g.automaton.alphabet();
  auto k = supremal_controllable(g.automaton, spec.automaton, ab.uncontrollable());
  try {
    auto h = realize_supervisor(g.automaton, k, ab.observable());
    write_output(a.out, serialize_model(h));
  } catch (const RealizationRefusedError& e) {
    nlohmann::ordered_json w;
    w["event"] = e.witness().event;
    w["s1"] = e.witness().s1;
    w["s2"] = e.witness().s2;
    std::cerr << "error: " << e.what() << '\n';
    std::cout << w.dump() << '\n';
    return exit_unsafe;
  }
  return exit_safe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safety analysis of supervisory control systems under attack"};
  app.set_version_flag("--version", std::string(tool_version));
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build the attacked closed-loop model");
  b->add_option("plant", build.plant, "Plant model file")->required();
  b->add_option("supervisor", build.supervisor, "Supervisor model file")->required();
  b->add_option("--mode", build.mode, "Attack mode")->required()->check(CLI::IsMember({"ae", "se", "si"}));
  b->add_option("--vulnerable", build.vulnerable, "Comma-separated vulnerable events")->required();
  b->add_option("--out", build.out, "Output file (default stdout)");

  CheckArgs check;
  auto* c = app.add_subcommand("check", "Check safe controllability of an attacked model");
  c->add_option("model", check.model, "Attacked model file")->required();
  c->add_option("--method", check.method, "Decision procedure")
      ->check(CLI::IsMember({"diagnoser", "verifier", "oracle", "all"}));

  ExportArgs exp;
  auto* x = app.add_subcommand("export", "Render a model as a graph");
  x->add_option("model", exp.model, "Model or attacked model file")->required();
  x->add_option("--format", exp.format, "Output format")->check(CLI::IsMember({"dot"}));

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run the defended closed loop");
  s->add_option("model", sim.model, "Attacked model file")->required();
  s->add_option("--policy", sim.policy, "all-out, random:p or a script file");
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--max-steps", sim.max_steps, "Maximum number of events");

  SynthesizeArgs syn;
  auto* y = app.add_subcommand("synthesize", "Synthesize a supervisor realization");
  y->add_option("plant", syn.plant, "Plant model file")->required();
  y->add_option("spec", syn.spec, "Specification model file")->required();
  y->add_option("--out", syn.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_error;
  }

  try {
    if (*b) return cmd_build(build);
    if (*c) return cmd_check(check);
    if (*x) return cmd_export(exp);
    if (*s) return cmd_simulate(sim);
    if (*y) return cmd_synthesize(syn);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_error;
  }
  return exit_error;
}
