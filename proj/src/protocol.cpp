#include "mvembed/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace mvembed {

std::size_t normalize_embeddings(EmbeddingTable& table) {
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto row = table.row(i);
    double ss = 0.0;
    for (double x : row) ss += x * x;
    if (ss == 0.0) {
      ++zeros;
      continue;
    }
    const double norm = std::sqrt(ss);
    for (double& x : row) x /= norm;
  }
  return zeros;
}

std::vector<double> pair_features(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("pair features need equal dimensions");
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::link_prediction: return "link";
    case TaskKind::multi_label: return "multi-label";
    case TaskKind::multi_class: return "multi-class";
  }
  return "?";
}

TaskKind parse_task_kind(const std::string& text) {
  if (text == "link" || text == "link-prediction") return TaskKind::link_prediction;
  if (text == "multi-label" || text == "multi-label-classification") return TaskKind::multi_label;
  if (text == "multi-class" || text == "multi-class-classification") return TaskKind::multi_class;
  throw ConfigError("unknown task type '" + text + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& source, std::size_t line) {
  try {
    if (text.empty() || !std::isdigit(static_cast<unsigned char>(text[0]))) throw std::invalid_argument(text);
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw ParseError(source, line, "expected a non-negative integer, got '" + text + "'");
  }
}

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TaskSpec parse_task_spec(std::istream& in, const std::filesystem::path& base_dir) {
  TaskSpec spec;
  bool have_task = false;
  std::string line;
  std::size_t number = 0;
  const std::string source = "task spec";
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, number, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "task") {
      spec.kind = parse_task_kind(value);
      have_task = true;
    } else if (key == "labels") {
      spec.labels = resolve(value);
    } else if (key == "edges") {
      spec.edges = resolve(value);
    } else if (key == "negatives") {
      spec.negatives = parse_number<std::uint32_t>(value, source, number);
    } else if (key == "runs") {
      spec.runs = parse_number<std::uint32_t>(value, source, number);
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(value, source, number);
    } else if (key == "multi_class_mode") {
      if (value == "softmax") spec.multi_class_mode = LogregMode::softmax;
      else if (value == "one-vs-rest") spec.multi_class_mode = LogregMode::one_vs_rest;
      else throw ParseError(source, number, "unknown multi_class_mode '" + value + "'");
    } else {
      throw ParseError(source, number, "unknown key '" + key + "'");
    }
  }
  if (!have_task) throw ConfigError("task spec does not name a task");
  if (spec.runs == 0) throw ConfigError("runs must be positive");
  if (spec.kind == TaskKind::link_prediction) {
    if (spec.edges.empty()) throw ConfigError("link prediction needs an edges file");
    if (spec.negatives == 0) throw ConfigError("negatives must be positive");
  } else if (spec.labels.empty()) {
    throw ConfigError("classification needs a labels file");
  }
  return spec;
}

TaskSpec load_task_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_task_spec(in, path.parent_path());
}

Split shuffle_split(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, 0x53504c54));
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  return s;
}

const MetricSummary& ProtocolResult::test_metric(const std::string& name) const {
  for (const auto& m : test)
    if (m.metric == name) return m;
  throw UsageError("no test metric named " + name);
}

const MetricSummary& ProtocolResult::validation_metric(const std::string& name) const {
  for (const auto& m : validation)
    if (m.metric == name) return m;
  throw UsageError("no validation metric named " + name);
}

namespace {

struct Dataset {
  FeatureMatrix x;
  std::vector<int> y;
};

Dataset gather(const FeatureMatrix& all, std::span<const int> labels, std::span<const std::size_t> idx) {
  Dataset d;
  d.x = FeatureMatrix(idx.size(), all.cols);
  d.y.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = all.row(idx[i]);
    std::copy(src.begin(), src.end(), d.x.row(i).begin());
    d.y[i] = labels[idx[i]];
  }
  return d;
}

std::vector<double> probabilities(const LogisticModel& model, const FeatureMatrix& x) {
  std::vector<double> out;
  out.reserve(x.rows * model.classes);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto p = model.predict_proba(x.row(i));
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<double> positive_scores(const LogisticModel& model, const FeatureMatrix& x) {
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = model.predict_proba(x.row(i))[1];
  return out;
}

bool two_classes(std::span<const int> y) {
  return std::any_of(y.begin(), y.end(), [&](int l) { return l != y[0]; });
}

// Sweeps the l2 grid from strongest to weakest penalty with warm starts and keeps the
// model with the best validation score (earlier, stronger penalties win ties).
template <class Score>
std::pair<LogisticModel, double> select_l2(const Dataset& train, std::size_t classes, LogregMode mode,
                                           const ProtocolOptions& opt, Score score) {
  std::vector<double> grid = opt.l2_grid;
  if (grid.empty()) throw UsageError("empty l2 grid");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  LogisticModel best;
  double best_score = -INFINITY;
  std::vector<double> warm;
  for (double l2 : grid) {
    auto model = train_logreg(train.x, train.y, classes, l2, mode, opt.logreg, warm);
    warm = model.params;
    const double s = score(model);
    if (s > best_score || best.params.empty()) {
      best_score = s;
      best = std::move(model);
    }
  }
  return {std::move(best), best_score};
}

// Per-run metric values keyed by name, in insertion order.
struct RunMetrics {
  bool ok = false;
  std::vector<std::pair<std::string, double>> test, validation;
  double l2 = 0.0;
};

template <class RunFn>
ProtocolResult execute_runs(TaskKind kind, std::uint32_t runs, unsigned threads, RunFn run) {
  std::vector<RunMetrics> per_run(runs);
  std::atomic<std::uint32_t> next{0};
  auto worker = [&] {
    for (std::uint32_t r; (r = next.fetch_add(1)) < runs;) per_run[r] = run(r);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, runs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ProtocolResult result;
  result.kind = kind;
  auto add = [](std::vector<MetricSummary>& into, const std::string& name, double value) {
    for (auto& m : into)
      if (m.metric == name) {
        m.runs.push_back(value);
        return;
      }
    into.push_back({name, {value}});
  };
  for (const auto& r : per_run) {
    if (!r.ok) {
      ++result.excluded_runs;
      continue;
    }
    for (const auto& [name, v] : r.test) add(result.test, name, v);
    for (const auto& [name, v] : r.validation) add(result.validation, name, v);
    result.chosen_l2.push_back(r.l2);
  }
  return result;
}

FeatureMatrix table_features(const EmbeddingTable& table, std::span<const std::size_t> rows) {
  FeatureMatrix x(rows.size(), table.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = table.row(rows[i]);
    std::copy(src.begin(), src.end(), x.row(i).begin());
  }
  return x;
}

// Row indices of `table` that are evaluable: present in the network and active in every view.
std::vector<bool> core_rows(const EmbeddingTable& table, const MultiViewNetwork* net) {
  std::vector<bool> core(table.size(), true);
  if (!net) return core;
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto id = net->nodes().find(table.labels[i]);
    core[i] = id && net->active_view_count(*id) == net->num_views();
  }
  return core;
}

ProtocolResult multiclass_runs(const FeatureMatrix& x, const std::vector<int>& y, std::size_t classes,
                               std::uint32_t runs, std::uint64_t seed, const ProtocolOptions& opt, LogregMode mode) {
  auto result = execute_runs(TaskKind::multi_class, runs, opt.threads, [&](std::uint32_t r) {
    RunMetrics out;
    auto split = shuffle_split(x.rows, derive_seed(seed, r));
    auto train = gather(x, y, split.train);
    auto val = gather(x, y, split.validation);
    auto test = gather(x, y, split.test);
    if (!two_classes(train.y) || val.y.empty() || test.y.empty()) return out;
    auto [model, score] = select_l2(train, classes, mode, opt, [&](const LogisticModel& m) {
      auto p = probabilities(m, val.x);
      // Accuracy first; cross-entropy breaks ties.
      return accuracy(p, classes, val.y) - 1e-6 * cross_entropy(p, classes, val.y);
    });
    auto pv = probabilities(model, val.x);
    auto pt = probabilities(model, test.x);
    out.ok = true;
    out.l2 = model.l2;
    out.validation = {{"accuracy", accuracy(pv, classes, val.y)}, {"cross_entropy", cross_entropy(pv, classes, val.y)}};
    out.test = {{"accuracy", accuracy(pt, classes, test.y)}, {"cross_entropy", cross_entropy(pt, classes, test.y)}};
    return out;
  });
  result.nodes_evaluated = x.rows;
  return result;
}

ProtocolResult multiclass_task(const EmbeddingTable& table, const TaskSpec& task, const std::vector<bool>& core,
                               const ProtocolOptions& opt) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < table.size(); ++i) row_of.emplace(table.labels[i], i);
  std::map<std::string, int> class_ids;
  std::vector<std::size_t> rows;
  std::vector<int> y;
  for (const auto& f : read_tsv(task.labels)) {
    if (f.size() != 2) throw ValidationError(task.labels.string() + ": expected node<TAB>class");
    auto it = row_of.find(f[0]);
    if (it == row_of.end() || !core[it->second]) continue;
    auto [cls, fresh] = class_ids.emplace(f[1], static_cast<int>(class_ids.size()));
    (void)fresh;
    rows.push_back(it->second);
    y.push_back(cls->second);
  }
  if (class_ids.size() < 2) throw ValidationError("multi-class task needs at least two classes");
  return multiclass_runs(table_features(table, rows), y, class_ids.size(), task.runs, task.seed, opt,
                         task.multi_class_mode);
}

ProtocolResult multilabel_task(const EmbeddingTable& table, const TaskSpec& task, const std::vector<bool>& core,
                               const ProtocolOptions& opt) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < table.size(); ++i) row_of.emplace(table.labels[i], i);
  std::map<std::string, std::size_t> label_ids;
  std::vector<std::pair<std::size_t, std::size_t>> memberships;  // (table row, label)
  for (const auto& f : read_tsv(task.labels)) {
    if (f.size() != 2) throw ValidationError(task.labels.string() + ": expected node<TAB>label");
    auto [it, fresh] = label_ids.emplace(f[1], label_ids.size());
    (void)fresh;
    auto row = row_of.find(f[0]);
    if (row != row_of.end() && core[row->second]) memberships.emplace_back(row->second, it->second);
  }
  std::vector<std::size_t> rows;
  std::unordered_map<std::size_t, std::size_t> position;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (core[i]) {
      position.emplace(i, rows.size());
      rows.push_back(i);
    }
  const std::size_t num_labels = label_ids.size();
  std::vector<std::vector<int>> y(num_labels, std::vector<int>(rows.size(), 0));
  for (auto [row, label] : memberships) y[label][position.at(row)] = 1;
  const FeatureMatrix x = table_features(table, rows);

  auto result = execute_runs(TaskKind::multi_label, task.runs, opt.threads, [&](std::uint32_t r) {
    RunMetrics out;
    auto split = shuffle_split(x.rows, derive_seed(task.seed, r));
    double sums[4] = {0, 0, 0, 0};
    std::size_t counted = 0;
    double log_l2 = 0.0;
    for (std::size_t l = 0; l < num_labels; ++l) {
      auto train = gather(x, y[l], split.train);
      auto val = gather(x, y[l], split.validation);
      auto test = gather(x, y[l], split.test);
      if (!two_classes(train.y)) continue;
      auto [model, score] = select_l2(train, 2, LogregMode::binary, opt, [&](const LogisticModel& m) {
        auto auc = roc_auc(positive_scores(m, val.x), val.y);
        return auc ? *auc : -cross_entropy(probabilities(m, val.x), 2, val.y);
      });
      auto st = positive_scores(model, test.x);
      auto sv = positive_scores(model, val.x);
      auto t_auc = roc_auc(st, test.y);
      auto t_pr = auprc(st, test.y);
      auto v_auc = roc_auc(sv, val.y);
      auto v_pr = auprc(sv, val.y);
      if (!t_auc || !t_pr || !v_auc || !v_pr) continue;
      sums[0] += *t_auc;
      sums[1] += *t_pr;
      sums[2] += *v_auc;
      sums[3] += *v_pr;
      log_l2 += std::log10(model.l2);
      ++counted;
    }
    if (counted == 0) return out;
    const double c = static_cast<double>(counted);
    out.ok = true;
    out.l2 = std::pow(10.0, log_l2 / c);
    out.test = {{"roc_auc", sums[0] / c}, {"auprc", sums[1] / c}};
    out.validation = {{"roc_auc", sums[2] / c}, {"auprc", sums[3] / c}};
    return out;
  });
  result.nodes_evaluated = x.rows;
  return result;
}

ProtocolResult link_task(const EmbeddingTable& table, const TaskSpec& task, const std::vector<bool>& core,
                         const ProtocolOptions& opt) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < table.size(); ++i) row_of.emplace(table.labels[i], i);
  std::map<std::size_t, std::vector<std::size_t>> positives;  // source row -> target rows
  std::unordered_map<std::size_t, std::unordered_set<std::size_t>> friends;
  for (const auto& f : read_tsv(task.edges)) {
    if (f.size() < 2) throw ValidationError(task.edges.string() + ": expected source<TAB>target");
    auto s = row_of.find(f[0]);
    auto t = row_of.find(f[1]);
    if (s == row_of.end() || t == row_of.end() || s->second == t->second) continue;
    if (!core[s->second] || !core[t->second]) continue;
    if (!friends[s->second].insert(t->second).second) continue;
    friends[t->second].insert(s->second);
    positives[s->second].push_back(t->second);
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (core[i]) candidates.push_back(i);
  std::vector<std::size_t> sources;
  for (const auto& [s, targets] : positives) sources.push_back(s);
  if (sources.empty()) throw ValidationError("link prediction task has no usable records");

  auto result = execute_runs(TaskKind::link_prediction, task.runs, opt.threads, [&](std::uint32_t r) {
    RunMetrics out;
    const std::uint64_t run_seed = derive_seed(task.seed, r);
    auto split = shuffle_split(sources.size(), run_seed);
    std::mt19937_64 rng(derive_seed(run_seed, 0x4e4547));
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    auto build = [&](std::span<const std::size_t> picked) {
      Dataset d;
      for (std::size_t si : picked) {
        const std::size_t s = sources[si];
        const auto& fr = friends.at(s);
        for (std::size_t t : positives.at(s)) {
          d.x.append(pair_features(table.row(s), table.row(t)));
          d.y.push_back(1);
        }
        // Non-friends of s, uniform over core nodes, without repeats.
        const std::size_t available = candidates.size() - 1 - fr.size();
        const std::size_t want = std::min<std::size_t>(available, task.negatives * positives.at(s).size());
        std::unordered_set<std::size_t> drawn;
        while (drawn.size() < want) {
          const std::size_t t = candidates[pick(rng)];
          if (t == s || fr.count(t) || !drawn.insert(t).second) continue;
          d.x.append(pair_features(table.row(s), table.row(t)));
          d.y.push_back(0);
        }
      }
      return d;
    };
    auto train = build(split.train);
    auto val = build(split.validation);
    auto test = build(split.test);
    if (train.y.empty() || !two_classes(train.y)) return out;
    auto [model, score] = select_l2(train, 2, LogregMode::binary, opt, [&](const LogisticModel& m) {
      auto auc = roc_auc(positive_scores(m, val.x), val.y);
      return auc ? *auc : -INFINITY;
    });
    auto st = positive_scores(model, test.x);
    auto sv = positive_scores(model, val.x);
    auto t_auc = roc_auc(st, test.y);
    auto t_pr = auprc(st, test.y);
    auto v_auc = roc_auc(sv, val.y);
    auto v_pr = auprc(sv, val.y);
    if (!t_auc || !t_pr || !v_auc || !v_pr) return out;
    out.ok = true;
    out.l2 = model.l2;
    out.test = {{"roc_auc", *t_auc}, {"auprc", *t_pr}};
    out.validation = {{"roc_auc", *v_auc}, {"auprc", *v_pr}};
    return out;
  });
  result.nodes_evaluated = candidates.size();
  return result;
}

}  // namespace

ProtocolResult run_protocol(const EmbeddingTable& table, const TaskSpec& task, const MultiViewNetwork* net,
                            const ProtocolOptions& options) {
  EmbeddingTable normalized = table;
  normalize_embeddings(normalized);
  const auto core = core_rows(normalized, net);
  switch (task.kind) {
    case TaskKind::multi_class: return multiclass_task(normalized, task, core, options);
    case TaskKind::multi_label: return multilabel_task(normalized, task, core, options);
    case TaskKind::link_prediction: return link_task(normalized, task, core, options);
  }
  throw UsageError("unknown task");
}

ProtocolResult run_multiclass_protocol(const EmbeddingTable& table, std::span<const int> labels, std::size_t classes,
                                       std::uint32_t runs, std::uint64_t seed, const ProtocolOptions& options,
                                       LogregMode mode) {
  if (labels.size() != table.size()) throw UsageError("one label per table row is required");
  EmbeddingTable normalized = table;
  normalize_embeddings(normalized);
  std::vector<std::size_t> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) {
      if (static_cast<std::size_t>(labels[i]) >= classes) throw UsageError("label out of range");
      rows.push_back(i);
      y.push_back(labels[i]);
    }
  return multiclass_runs(table_features(normalized, rows), y, classes, runs, seed, options, mode);
}

void write_results_header(std::ostream& out, std::uint32_t runs) {
  out << "model,task,metric,mean,stderr";
  for (std::uint32_t r = 1; r <= runs; ++r) out << ",run_" << r;
  out << '\n';
}

void write_results(std::ostream& out, const std::string& model, const ProtocolResult& result) {
  const auto precision = out.precision(17);
  for (const auto& m : result.test) {
    out << model << ',' << to_string(result.kind) << ',' << m.metric << ',' << m.mean() << ',' << m.standard_error();
    for (double v : m.runs) out << ',' << v;
    out << '\n';
  }
  out.precision(precision);
}

}  // namespace mvembed
