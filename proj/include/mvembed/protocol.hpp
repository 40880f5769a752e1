#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvembed/embedding.hpp"
#include "mvembed/graph.hpp"
#include "mvembed/logreg.hpp"
#include "mvembed/metrics.hpp"

namespace mvembed {

// Scales every row to unit l2 norm. Zero rows stay zero; returns how many there were.
std::size_t normalize_embeddings(EmbeddingTable& table);

// Element-wise product of two embeddings.
std::vector<double> pair_features(std::span<const double> a, std::span<const double> b);

enum class TaskKind { link_prediction, multi_label, multi_class };

std::string to_string(TaskKind kind);
TaskKind parse_task_kind(const std::string& text);

struct TaskSpec {
  TaskKind kind = TaskKind::multi_class;
  // multi-class: `node<TAB>class`; multi-label: `node<TAB>label`, one line per (node, label).
  std::filesystem::path labels;
  // link prediction: `source<TAB>target` positive records.
  std::filesystem::path edges;
  std::uint32_t negatives = 5;
  std::uint32_t runs = 20;
  std::uint64_t seed = 1;
  LogregMode multi_class_mode = LogregMode::softmax;
};

// `key = value` lines; '#' comments. Relative paths resolve against `base_dir`.
TaskSpec parse_task_spec(std::istream& in, const std::filesystem::path& base_dir = {});
TaskSpec load_task_spec(const std::filesystem::path& path);

// Shuffled 80/10/10 partition of [0, n).
struct Split {
  std::vector<std::size_t> train, validation, test;
};
Split shuffle_split(std::size_t n, std::uint64_t seed);

struct ProtocolOptions {
  unsigned threads = 1;
  std::vector<double> l2_grid{std::begin(kL2Grid), std::end(kL2Grid)};
  LogregOptions logreg;
};

struct ProtocolResult {
  TaskKind kind = TaskKind::multi_class;
  std::vector<MetricSummary> test;        // per-run test metrics
  std::vector<MetricSummary> validation;  // per-run validation metrics at the selected l2
  std::vector<double> chosen_l2;          // per run (per label averaged in log space for multi-label)
  std::size_t excluded_runs = 0;
  std::size_t nodes_evaluated = 0;

  const MetricSummary& test_metric(const std::string& name) const;
  const MetricSummary& validation_metric(const std::string& name) const;
};

// Rows of `table` are matched to network nodes and task files by label. With a network, nodes that
// are isolated in any view are left out.
ProtocolResult run_protocol(const EmbeddingTable& table, const TaskSpec& task, const MultiViewNetwork* net,
                            const ProtocolOptions& options = {});

// In-memory variant for multi-class tasks: labels[i] is the class of table row i, or -1 to skip it.
ProtocolResult run_multiclass_protocol(const EmbeddingTable& table, std::span<const int> labels, std::size_t classes,
                                       std::uint32_t runs, std::uint64_t seed, const ProtocolOptions& options = {},
                                       LogregMode mode = LogregMode::softmax);

// Header `model,task,metric,mean,stderr,run_values...`.
void write_results_header(std::ostream& out, std::uint32_t runs);
void write_results(std::ostream& out, const std::string& model, const ProtocolResult& result);

}  // namespace mvembed
