#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "actrchr/bisim.hpp"
#include "actrchr/parser.hpp"
#include "actrchr/semantics.hpp"
#include "actrchr/translator.hpp"

namespace {

struct RunConfig {
  std::string input;
  std::size_t depth = 16;
  std::uint64_t seed = 0;
  std::string dedup = "canonical";
  std::string fail_request = "nil";
  std::string format;
  std::string out;
};

std::optional<actr::Model> load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": error: cannot read file\n";
    return std::nullopt;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  actr::Model model;
  try {
    model = actr::parse_model(buf.str(), path);
  } catch (const actr::ParseError& e) {
    std::cerr << e.what() << "\n";
    return std::nullopt;
  }
  const auto diags = actr::validate(model);
  for (const auto& d : diags) std::cerr << d.str() << "\n";
  if (!diags.empty()) return std::nullopt;
  return model;
}

bool emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) {
    std::cerr << cfg.out << ": error: cannot write file\n";
    return false;
  }
  out << text;
  return true;
}

actr::FailRequest fail_mode(const RunConfig& cfg) {
  return cfg.fail_request == "stuck" ? actr::FailRequest::Stuck : actr::FailRequest::Nil;
}

actr::Semantics semantics(const actr::Model& model, const RunConfig& cfg) {
  return actr::Semantics(model, actr::ArchitectureConfig::abstract_semantics(model.buffer_names(), fail_mode(cfg)));
}

int cmd_parse(const RunConfig& cfg) {
  auto model = load(cfg.input);
  if (!model) return 1;
  std::cout << "ok: " << model->types.size() << " types, " << model->chunks.size() << " chunks, "
            << model->buffers.size() << " buffers, " << model->rules.size() << " rules\n";
  return 0;
}

int cmd_normalize(const RunConfig& cfg) {
  auto model = load(cfg.input);
  if (!model) return 1;
  const auto sem = semantics(*model, cfg);
  for (const auto& d : sem.dropped()) std::cerr << "note: rule '" << d << "' can never fire and was dropped\n";
  actr::Model normalized = *model;
  normalized.rules = sem.rules();
  return emit(cfg, actr::print_model(normalized)) ? 0 : 1;
}

int cmd_run(const RunConfig& cfg) {
  auto model = load(cfg.input);
  if (!model) return 1;
  const auto sem = semantics(*model, cfg);
  std::mt19937_64 rng(cfg.seed);
  actr::AbstractState state = actr::initial_state(*model);
  std::string out = "initial:\n" + actr::to_string(actr::canonical(state));
  std::string trace;
  for (std::size_t step = 1; step <= cfg.depth; ++step) {
    auto next = sem.successors(state);
    if (next.empty()) break;
    const auto& chosen = next[rng() % next.size()];
    out += "step " + std::to_string(step) + ": " + chosen.label.str() + " (" + std::to_string(next.size()) +
           " enabled)\n";
    trace += (trace.empty() ? "" : "; ") + chosen.label.str();
    state = chosen.target;
  }
  out += "final:\n" + actr::to_string(actr::canonical(state));
  out += "trace: " + trace + "\n";
  return emit(cfg, out) ? 0 : 1;
}

int cmd_explore(const RunConfig& cfg) {
  auto model = load(cfg.input);
  if (!model) return 1;
  const auto sem = semantics(*model, cfg);
  const auto mode = cfg.dedup == "exact" ? actr::DedupMode::Exact : actr::DedupMode::Canonical;
  const auto graph = sem.explore(actr::initial_state(*model), cfg.depth, mode);
  std::string text;
  if (cfg.format == "dot") {
    text = actr::to_dot(graph);
  } else if (cfg.format == "text") {
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
      const auto& n = graph.nodes[i];
      text += "node " + std::to_string(i) + " depth " + std::to_string(n.depth) + " " + n.hash + "\n";
      text += actr::to_string(actr::canonical(n.state));
    }
    for (const auto& e : graph.edges)
      text += "edge " + std::to_string(e.from) + " -> " + std::to_string(e.to) + " " + e.label.str() + "\n";
    if (graph.truncated) text += "truncated\n";
  } else {
    text = actr::to_trace(graph);
  }
  return emit(cfg, text) ? 0 : 1;
}

int cmd_translate(const RunConfig& cfg) {
  auto model = load(cfg.input);
  if (!model) return 1;
  const auto program = actr::chr::chr_of_model(*model);
  const auto initial = actr::chr::chr_of_state(actr::initial_state(*model));
  std::string text = "% initial state: " + actr::chr::to_string(initial) + "\n";
  text += actr::chr::print_program(program);
  RunConfig target = cfg;
  if (target.out.empty()) target.out = std::filesystem::path(cfg.input).replace_extension(".chr").string();
  return emit(target, text) ? 0 : 1;
}

int cmd_check(const RunConfig& cfg) {
  auto model = load(cfg.input);
  if (!model) return 1;
  actr::chr::BisimOptions options;
  options.fail_request = fail_mode(cfg);
  actr::chr::BisimReport report;
  try {
    report = actr::chr::bisim_check(*model, actr::initial_state(*model), cfg.depth, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!emit(cfg, cfg.format == "jsonl" ? report.records() : report.text())) return 1;
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ACT-R production systems and their CHR translation"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "model file (.actr)")->required();
    sub->add_option("--out", cfg.out, "output path ('-' for standard output)");
    sub->add_option("--fail-request", cfg.fail_request, "answer to unanswerable requests")
        ->check(CLI::IsMember({"nil", "stuck"}));
  };
  auto depth = [&](CLI::App* sub) {
    sub->add_option("--depth", cfg.depth, "step bound")->check(CLI::NonNegativeNumber);
  };

  auto* parse = app.add_subcommand("parse", "parse and validate a model");
  add_common(parse);
  auto* normalize = app.add_subcommand("normalize", "print the model with rules in set normal form");
  add_common(normalize);
  auto* run = app.add_subcommand("run", "follow one seeded random trace");
  add_common(run);
  depth(run);
  run->add_option("--seed", cfg.seed, "64-bit seed");
  auto* explore = app.add_subcommand("explore", "explore the transition graph breadth-first");
  add_common(explore);
  depth(explore);
  explore->add_option("--dedup", cfg.dedup, "state identification")->check(CLI::IsMember({"exact", "canonical"}));
  explore->add_option("--format", cfg.format, "dot, trace or text")->check(CLI::IsMember({"dot", "trace", "text"}));
  auto* translate = app.add_subcommand("translate", "emit the CHR program (default <model>.chr)");
  add_common(translate);
  auto* check = app.add_subcommand("check", "check bisimulation with the CHR translation");
  add_common(check);
  depth(check);
  check->add_option("--format", cfg.format, "text or jsonl")->check(CLI::IsMember({"text", "jsonl"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse) return cmd_parse(cfg);
    if (*normalize) return cmd_normalize(cfg);
    if (*run) return cmd_run(cfg);
    if (*explore) return cmd_explore(cfg);
    if (*translate) return cmd_translate(cfg);
    if (*check) return cmd_check(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
