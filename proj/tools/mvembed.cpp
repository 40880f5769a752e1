#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvembed/embedding_io.hpp"
#include "mvembed/manifest.hpp"
#include "mvembed/pipeline.hpp"
#include "mvembed/protocol.hpp"
#include "mvembed/simd/kernels.hpp"
#include "mvembed/synth.hpp"
#include "mvembed/viewstats.hpp"

namespace fs = std::filesystem;
using namespace mvembed;

namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("MVEMBED_THREADS")) {
    unsigned value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc() || ptr != end || value == 0) throw UsageError("MVEMBED_THREADS must be a positive integer");
    return value;
  }
  return 1;
}

struct EmbedFlags {
  std::string network;
  std::string variant = "independent";
  std::optional<double> theta;
  std::optional<double> gamma;
  std::size_t dim = 0;
  std::uint32_t walk_len = 20;
  std::uint32_t window = 3;
  std::uint32_t walks_mult = 50;
  std::uint32_t neg = 5;
  std::uint32_t epochs = 1;
  std::uint64_t seed = 1;
  std::optional<unsigned> threads;
  bool binarize = false;
  bool appendix_gradients = false;
  std::string view;
  bool verbose = false;
};

void add_embed_flags(CLI::App& cmd, EmbedFlags& f) {
  cmd.add_option("--network", f.network, "Multi-view edge list (view<TAB>src<TAB>dst[<TAB>weight])")->required();
  cmd.add_option("--variant", f.variant, "con, reg, independent, one-space, view-merging, single-view")
      ->check(CLI::IsMember({"con", "reg", "independent", "one-space", "view-merging", "single-view"}));
  cmd.add_option("--theta", f.theta, "Context sharing weight in [0, 1] (con)");
  cmd.add_option("--gamma", f.gamma, "Regularization strength >= 0 (reg)");
  cmd.add_option("--dim", f.dim, "Embedding dimension D (default 128*|V| per-view, 128 otherwise)");
  cmd.add_option("--walk-len", f.walk_len, "Walk length L");
  cmd.add_option("--window", f.window, "Context window B");
  cmd.add_option("--walks-mult", f.walks_mult, "Walk multiplier M");
  cmd.add_option("--neg", f.neg, "Negative samples K");
  cmd.add_option("--epochs", f.epochs, "Passes over the pair list");
  cmd.add_option("--seed", f.seed, "Random seed");
  cmd.add_option("--threads", f.threads, "Worker threads (default: MVEMBED_THREADS or 1)");
  cmd.add_flag("--binarize", f.binarize, "Treat every edge as weight 1");
  cmd.add_flag("--appendix-gradients", f.appendix_gradients, "Alternative con context coefficients");
  cmd.add_option("--view", f.view, "View to keep (single-view)");
  cmd.add_flag("-v,--verbose", f.verbose, "Progress on stderr");
}

MultiViewNetwork load(const EmbedFlags& f) { return load_network(f.network, LoadOptions{f.binarize}); }

EmbedConfig resolve(const EmbedFlags& f, const MultiViewNetwork& net) {
  EmbedConfig cfg;
  cfg.train.variant = parse_variant(f.variant);
  const Variant v = cfg.train.variant;
  if (f.theta && v != Variant::con) throw UsageError("--theta only applies to --variant con");
  if (f.gamma && v != Variant::reg) throw UsageError("--gamma only applies to --variant reg");
  if (f.appendix_gradients && v != Variant::con) throw UsageError("--appendix-gradients only applies to --variant con");
  if (!f.view.empty() && v != Variant::single_view) throw UsageError("--view only applies to --variant single-view");
  if (v == Variant::single_view) {
    if (f.view.empty()) throw UsageError("--variant single-view needs --view");
    auto id = net.views().find(f.view);
    if (!id) throw UsageError("unknown view '" + f.view + "'");
    cfg.view = *id;
  }
  cfg.train.theta = f.theta.value_or(0.0);
  cfg.train.gamma = f.gamma.value_or(0.0);
  cfg.train.dim = f.dim;
  cfg.train.negatives = f.neg;
  cfg.train.epochs = f.epochs;
  cfg.train.seed = f.seed;
  cfg.train.threads = f.threads.value_or(default_threads());
  cfg.train.appendix_gradients = f.appendix_gradients;
  cfg.train.verbose = f.verbose;
  cfg.walk.walk_length = f.walk_len;
  cfg.walk.window = f.window;
  cfg.walk.walks_multiplier = f.walks_mult;
  cfg.train.validate();
  cfg.walk.validate();
  return cfg;
}

nlohmann::json describe(const EmbedConfig& cfg, const MultiViewNetwork& net, bool binarize) {
  nlohmann::json j;
  j["variant"] = std::string(to_string(cfg.train.variant));
  j["theta"] = cfg.train.theta;
  j["gamma"] = cfg.train.gamma;
  j["dim"] = cfg.train.resolved_dim(net.num_views());
  j["walk_len"] = cfg.walk.walk_length;
  j["window"] = cfg.walk.window;
  j["walks_mult"] = cfg.walk.walks_multiplier;
  j["neg"] = cfg.train.negatives;
  j["epochs"] = cfg.train.epochs;
  j["alpha0"] = cfg.train.alpha0;
  j["alpha_min"] = cfg.train.alpha_min;
  j["seed"] = cfg.train.seed;
  j["threads"] = cfg.train.threads;
  j["binarize"] = binarize;
  j["appendix_gradients"] = cfg.train.appendix_gradients;
  if (cfg.view) j["view"] = net.view_name(*cfg.view);
  j["simd"] = std::string(simd::name(simd::active().isa));
  return j;
}

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

template <class Fn>
void write_file(const fs::path& path, Fn fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  fn(out);
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad grid value '" + item + "'");
    }
  }
  if (values.empty()) throw UsageError("empty grid");
  return values;
}

struct TaskFlags {
  std::string spec;
  std::string kind;
  std::string labels;
  std::string edges;
  std::optional<std::uint32_t> negatives;
  std::optional<std::uint32_t> runs;
  std::optional<std::uint64_t> seed;
};

void add_task_flags(CLI::App& cmd, TaskFlags& f) {
  cmd.add_option("--task-spec", f.spec, "Task spec file (key = value lines)");
  cmd.add_option("--task", f.kind, "Task type when no spec file is given: link, multi-label, multi-class");
  cmd.add_option("--labels", f.labels, "Label file (classification)");
  cmd.add_option("--edges", f.edges, "Positive records (link prediction)");
  cmd.add_option("--negatives", f.negatives, "Negatives per positive record");
  cmd.add_option("--runs", f.runs, "Shuffle-split repetitions");
  cmd.add_option("--eval-seed", f.seed, "Split seed");
}

TaskSpec resolve_task(const TaskFlags& f, RunManifest& manifest) {
  TaskSpec task;
  if (!f.spec.empty()) {
    if (!f.kind.empty() || !f.labels.empty() || !f.edges.empty())
      throw UsageError("--task-spec cannot be combined with --task, --labels or --edges");
    task = load_task_spec(f.spec);
    manifest.add_input(f.spec);
  } else {
    if (f.kind.empty()) throw UsageError("give --task-spec or --task");
    task.kind = parse_task_kind(f.kind);
    task.labels = f.labels;
    task.edges = f.edges;
    if (task.kind == TaskKind::link_prediction && task.edges.empty()) throw UsageError("--task link needs --edges");
    if (task.kind != TaskKind::link_prediction && task.labels.empty()) throw UsageError("classification needs --labels");
  }
  if (f.negatives) task.negatives = *f.negatives;
  if (f.runs) task.runs = *f.runs;
  if (f.seed) task.seed = *f.seed;
  if (task.runs == 0) throw UsageError("--runs must be positive");
  if (!task.labels.empty()) manifest.add_input(task.labels);
  if (!task.edges.empty()) manifest.add_input(task.edges);
  manifest.config["task"] = {{"type", to_string(task.kind)},
                             {"labels", task.labels.string()},
                             {"edges", task.edges.string()},
                             {"negatives", task.negatives},
                             {"runs", task.runs},
                             {"seed", task.seed}};
  return task;
}

int cmd_embed(const EmbedFlags& f, const std::string& out, const std::string& format, const std::string& dump) {
  auto net = load(f);
  auto cfg = resolve(f, net);
  const auto dir = prepare_out(out);
  RunManifest manifest;
  manifest.command = "embed";
  manifest.add_input(f.network);
  manifest.config = describe(cfg, net, f.binarize);
  std::optional<std::ofstream> walk_out;
  if (!dump.empty()) {
    walk_out.emplace(dir / dump);
    if (!*walk_out) throw Error("cannot open walk dump for writing");
  }
  auto result = embed(net, cfg, walk_out ? &*walk_out : nullptr);
  const std::string name = format == "bin" ? "embedding.bin" : "embedding.txt";
  save_embedding(dir / name, result.table);
  manifest.outputs.push_back(name);
  if (walk_out) manifest.outputs.push_back(dump);
  manifest.config["pairs"] = result.num_pairs;
  manifest.config["walks_per_view"] = result.walks_per_view;
  write_manifest(dir, manifest);
  std::cerr << "embedded " << result.table.size() << " nodes x " << result.table.dim << " in "
            << result.stats.seconds << " s\n";
  return 0;
}

int cmd_sweep(EmbedFlags f, const TaskFlags& tf, const std::string& param, const std::string& grid,
              const std::string& out) {
  const auto values = parse_values(grid);
  auto net = load(f);
  const auto dir = prepare_out(out);
  RunManifest manifest;
  manifest.command = "sweep";
  manifest.add_input(f.network);
  auto task = resolve_task(tf, manifest);
  if (param == "theta" && f.variant != "con") throw UsageError("a theta sweep needs --variant con");
  if (param == "gamma" && f.variant != "reg") throw UsageError("a gamma sweep needs --variant reg");
  if ((param == "theta" && f.theta) || (param == "gamma" && f.gamma) || (param == "dim" && f.dim != 0))
    throw UsageError("the swept parameter cannot also be fixed");

  ProtocolOptions popt;
  popt.threads = f.threads.value_or(default_threads());
  std::ostringstream csv;
  csv.precision(17);
  csv << "variant,param,value,split,metric,mean,stderr\n";
  for (double value : values) {
    EmbedFlags point = f;
    if (param == "theta") point.theta = value;
    else if (param == "gamma") point.gamma = value;
    else point.dim = static_cast<std::size_t>(value);
    if (param == "dim" && (value <= 0 || value != static_cast<double>(point.dim)))
      throw UsageError("dimension grid values must be positive integers");
    auto cfg = resolve(point, net);
    if (manifest.config.find("embed") == manifest.config.end()) manifest.config["embed"] = describe(cfg, net, f.binarize);
    auto result = embed(net, cfg);
    auto report = run_protocol(result.table, task, &net, popt);
    auto emit = [&](const char* split, const std::vector<MetricSummary>& metrics) {
      for (const auto& m : metrics)
        csv << f.variant << ',' << param << ',' << value << ',' << split << ',' << m.metric << ',' << m.mean() << ','
            << m.standard_error() << '\n';
    };
    emit("test", report.test);
    emit("validation", report.validation);
    std::cerr << param << '=' << value << " done\n";
  }
  manifest.config["param"] = param;
  manifest.config["values"] = values;
  write_file(dir / "sweep.csv", [&](std::ostream& o) { o << csv.str(); });
  manifest.outputs.push_back("sweep.csv");
  write_manifest(dir, manifest);
  return 0;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out) {
  auto data = generate(cfg);
  const auto dir = prepare_out(out);
  save_network(dir / "network.tsv", data.net);
  save_labels(dir / "labels.tsv", data);
  RunManifest manifest;
  manifest.command = "synth";
  manifest.config = {{"p", cfg.p}, {"nodes_per_class", cfg.nodes_per_class}, {"m", cfg.m}, {"seed", cfg.seed}};
  manifest.config["generated_edges"] = data.generated_edges;
  manifest.config["intruded_edges"] = data.intruded_edges;
  manifest.outputs = {"network.tsv", "labels.tsv"};
  write_manifest(dir, manifest);
  return 0;
}

int cmd_jaccard(const std::string& network, bool binarize, double threshold, bool histogram, const std::string& out) {
  auto net = load_network(network, LoadOptions{binarize});
  auto report = agreement_report(net, threshold);
  const auto dir = prepare_out(out);
  RunManifest manifest;
  manifest.command = "jaccard";
  manifest.add_input(network);
  manifest.config = {{"threshold", threshold}, {"binarize", binarize}, {"histogram", histogram}};
  write_file(dir / "agreement.csv", [&](std::ostream& o) { write_agreement_csv(o, net, report); });
  manifest.outputs.push_back("agreement.csv");
  if (histogram) {
    write_file(dir / "histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, net, report); });
    manifest.outputs.push_back("histogram.csv");
  }
  write_manifest(dir, manifest);
  write_agreement_csv(std::cout, net, report);
  return 0;
}

int cmd_eval(const std::string& embedding, const std::string& network, bool binarize, const TaskFlags& tf,
             const std::string& model, std::optional<unsigned> threads, const std::string& out) {
  RunManifest manifest;
  manifest.command = "eval";
  auto table = load_embedding(embedding);
  manifest.add_input(embedding);
  std::optional<MultiViewNetwork> net;
  if (!network.empty()) {
    net = load_network(network, LoadOptions{binarize});
    manifest.add_input(network);
  }
  auto task = resolve_task(tf, manifest);
  ProtocolOptions popt;
  popt.threads = threads.value_or(default_threads());
  auto result = run_protocol(table, task, net ? &*net : nullptr, popt);
  if (result.excluded_runs > 0) std::cerr << "warning: " << result.excluded_runs << " runs had undefined metrics\n";
  const auto dir = prepare_out(out);
  write_file(dir / "results.csv", [&](std::ostream& o) {
    write_results_header(o, task.runs - static_cast<std::uint32_t>(result.excluded_runs));
    write_results(o, model, result);
  });
  manifest.config["model"] = model;
  manifest.config["threads"] = popt.threads;
  manifest.config["nodes_evaluated"] = result.nodes_evaluated;
  manifest.outputs.push_back("results.csv");
  write_manifest(dir, manifest);
  write_results(std::cout, model, result);
  return 0;
}

// Whitespace-separated `src dst [weight]` files, one per view, into the multi-view edge list.
int cmd_convert(const std::vector<std::string>& views, bool binarize, const std::string& out) {
  NetworkBuilder builder;
  RunManifest manifest;
  manifest.command = "convert";
  for (const auto& spec : views) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--view-file expects NAME=PATH");
    const std::string name = spec.substr(0, eq);
    const std::string path = spec.substr(eq + 1);
    builder.add_view(name);
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    manifest.add_input(path);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (line.empty() || line[0] == '#' || line[0] == '%') continue;
      std::istringstream fields(line);
      std::string src, dst;
      double weight = 1.0;
      if (!(fields >> src >> dst)) throw ParseError(path, number, "expected two node ids");
      if (!(fields >> weight)) weight = 1.0;
      if (src == dst) continue;
      builder.add_edge(name, src, dst, weight);
    }
  }
  if (binarize) builder.binarize();
  auto net = builder.build();
  const fs::path target(out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  save_network(target, net);
  manifest.config = {{"binarize", binarize}, {"self_loops", "dropped"}};
  manifest.outputs.push_back(target.filename().string());
  write_manifest(target.has_parent_path() ? target.parent_path() : fs::path("."), manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view network embedding"};
  app.require_subcommand(1);

  EmbedFlags embed_flags;
  std::string embed_out, embed_format = "text", dump_walks;
  auto* embed_cmd = app.add_subcommand("embed", "Train an embedding");
  add_embed_flags(*embed_cmd, embed_flags);
  embed_cmd->add_option("--out", embed_out, "Output directory")->required();
  embed_cmd->add_option("--format", embed_format, "text or bin")->check(CLI::IsMember({"text", "bin"}));
  embed_cmd->add_option("--dump-walks", dump_walks, "Also write the walks to this file in the output directory");

  EmbedFlags sweep_flags;
  TaskFlags sweep_task;
  std::string sweep_param, sweep_values, sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate over a hyperparameter grid");
  add_embed_flags(*sweep_cmd, sweep_flags);
  add_task_flags(*sweep_cmd, sweep_task);
  sweep_cmd->add_option("--param", sweep_param, "theta, gamma or dim")
      ->required()
      ->check(CLI::IsMember({"theta", "gamma", "dim"}));
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated grid")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();

  SynthConfig synth_cfg;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic two-view network");
  synth_cmd->add_option("--p", synth_cfg.p, "Intrusion probability in [0, 0.5]");
  synth_cmd->add_option("--nodes-per-class", synth_cfg.nodes_per_class, "Nodes in each of the four classes");
  synth_cmd->add_option("--m", synth_cfg.m, "Edges per attached node");
  synth_cmd->add_option("--seed", synth_cfg.seed, "Random seed");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();

  std::string jac_network, jac_out;
  double jac_threshold = 0.5;
  bool jac_hist = false, jac_binarize = false;
  auto* jac_cmd = app.add_subcommand("jaccard", "Cross-view neighbor agreement");
  jac_cmd->add_option("--network", jac_network, "Multi-view edge list")->required();
  jac_cmd->add_option("--threshold", jac_threshold, "Agreement threshold");
  jac_cmd->add_flag("--histogram", jac_hist, "Also write the 20-bin histogram");
  jac_cmd->add_flag("--binarize", jac_binarize, "Treat every edge as weight 1");
  jac_cmd->add_option("--out", jac_out, "Output directory")->required();

  std::string eval_embedding, eval_network, eval_model = "model", eval_out;
  bool eval_binarize = false;
  std::optional<unsigned> eval_threads;
  TaskFlags eval_task;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate an embedding on a downstream task");
  eval_cmd->add_option("--embedding", eval_embedding, "Embedding file")->required();
  eval_cmd->add_option("--network", eval_network, "Network used to drop nodes isolated in any view");
  eval_cmd->add_flag("--binarize", eval_binarize, "Treat every edge as weight 1");
  add_task_flags(*eval_cmd, eval_task);
  eval_cmd->add_option("--model", eval_model, "Model name for the results table");
  eval_cmd->add_option("--threads", eval_threads, "Parallel runs (default: MVEMBED_THREADS or 1)");
  eval_cmd->add_option("--out", eval_out, "Output directory")->required();

  std::vector<std::string> conv_views;
  std::string conv_out;
  bool conv_binarize = false;
  auto* conv_cmd = app.add_subcommand("convert", "Combine per-view edge lists into one multi-view file");
  conv_cmd->add_option("--view-file", conv_views, "NAME=PATH, repeatable")->required();
  conv_cmd->add_flag("--binarize", conv_binarize, "Collapse duplicate edges to weight 1");
  conv_cmd->add_option("--out", conv_out, "Output edge list path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*embed_cmd) return cmd_embed(embed_flags, embed_out, embed_format, dump_walks);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep_task, sweep_param, sweep_values, sweep_out);
    if (*synth_cmd) return cmd_synth(synth_cfg, synth_out);
    if (*jac_cmd) return cmd_jaccard(jac_network, jac_binarize, jac_threshold, jac_hist, jac_out);
    if (*eval_cmd)
      return cmd_eval(eval_embedding, eval_network, eval_binarize, eval_task, eval_model, eval_threads, eval_out);
    if (*conv_cmd) return cmd_convert(conv_views, conv_binarize, conv_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
