#include "biascrowd/dataset.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>
#include <tuple>
#include <unordered_map>

namespace biascrowd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' ||
                        s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<long long> as_integer(const std::string& s) {
  long long v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) return std::nullopt;
  return v;
}

// Dense index over tokens: numeric order when every token is an integer,
// first-appearance order otherwise.
class TokenIndex {
 public:
  explicit TokenIndex(const std::vector<std::string>& tokens_in_order) {
    bool numeric = true;
    for (const auto& t : tokens_in_order) {
      if (index_.contains(t)) continue;
      index_.emplace(t, static_cast<int>(names_.size()));
      names_.push_back(t);
      numeric = numeric && as_integer(t).has_value();
    }
    if (numeric) {
      std::ranges::sort(names_, [](const std::string& a, const std::string& b) {
        return *as_integer(a) < *as_integer(b);
      });
      for (std::size_t i = 0; i < names_.size(); ++i) {
        index_[names_[i]] = static_cast<int>(i);
      }
    }
  }

  int at(const std::string& token) const { return index_.at(token); }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> names_;
};

struct CsvRow {
  std::vector<std::string> fields;
  int line = 0;
};

std::vector<CsvRow> read_csv_rows(const std::string& text, std::string_view what,
                                  const std::vector<std::string>& header) {
  constexpr std::string_view kBom = "\xEF\xBB\xBF";
  std::istringstream in(text.starts_with(kBom) ? text.substr(kBom.size()) : text);
  std::string line;
  std::vector<CsvRow> rows;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (!saw_header) {
      saw_header = true;
      std::vector<std::string> lowered = fields;
      for (auto& f : lowered) {
        std::ranges::transform(f, f.begin(), [](unsigned char c) { return std::tolower(c); });
      }
      if (lowered != header) {
        throw ParseError(std::string(what) + ": line " + std::to_string(line_no) +
                         ": expected header '" + [&] {
                           std::string h;
                           for (std::size_t i = 0; i < header.size(); ++i) {
                             h += (i ? "," : "") + header[i];
                           }
                           return h;
                         }() + "'");
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError(std::string(what) + ": line " + std::to_string(line_no) +
                       ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      if (f.empty()) {
        throw ParseError(std::string(what) + ": line " + std::to_string(line_no) +
                         ": empty field");
      }
    }
    rows.push_back({std::move(fields), line_no});
  }
  if (!saw_header) throw ParseError(std::string(what) + ": missing header");
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> index_names(int n) {
  std::vector<std::string> names(n);
  for (int i = 0; i < n; ++i) names[i] = std::to_string(i);
  return names;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

LabelDataset::LabelDataset(int n_workers, int n_tasks, int n_classes,
                           std::vector<Observation> labels,
                           std::vector<std::optional<int>> gold)
    : n_workers_(n_workers),
      n_tasks_(n_tasks),
      n_classes_(n_classes),
      labels_(std::move(labels)),
      gold_(std::move(gold)) {
  if (n_workers < 0 || n_tasks < 0) throw DomainError("negative dataset dimension");
  if (n_classes < 2) throw DomainError("need at least 2 classes");
  if (!gold_.empty() && static_cast<int>(gold_.size()) != n_tasks) {
    throw DomainError("gold vector must have one entry per task");
  }
  for (const auto& g : gold_) {
    if (g && (*g < 0 || *g >= n_classes)) {
      throw DomainError("gold label " + std::to_string(*g) + " outside [0, K)");
    }
  }
  for (const auto& o : labels_) {
    if (o.worker < 0 || o.worker >= n_workers) {
      throw DomainError("worker index " + std::to_string(o.worker) + " out of range");
    }
    if (o.task < 0 || o.task >= n_tasks) {
      throw DomainError("task index " + std::to_string(o.task) + " out of range");
    }
    if (o.label < 0 || o.label >= n_classes) {
      throw DomainError("label " + std::to_string(o.label) + " outside [0, K)");
    }
  }
  std::ranges::sort(labels_, [](const Observation& a, const Observation& b) {
    return std::tie(a.task, a.worker) < std::tie(b.task, b.worker);
  });
  for (std::size_t i = 1; i < labels_.size(); ++i) {
    if (labels_[i].task == labels_[i - 1].task &&
        labels_[i].worker == labels_[i - 1].worker) {
      throw DuplicateObservationError(
          "duplicate observation for worker " + std::to_string(labels_[i].worker) +
          ", task " + std::to_string(labels_[i].task));
    }
  }

  task_begin_.assign(n_tasks_ + 1, 0);
  for (const auto& o : labels_) ++task_begin_[o.task + 1];
  std::partial_sum(task_begin_.begin(), task_begin_.end(), task_begin_.begin());

  worker_begin_.assign(n_workers_ + 1, 0);
  for (const auto& o : labels_) ++worker_begin_[o.worker + 1];
  std::partial_sum(worker_begin_.begin(), worker_begin_.end(), worker_begin_.begin());
  worker_index_.resize(labels_.size());
  std::vector<std::size_t> fill(worker_begin_.begin(), worker_begin_.end() - 1);
  for (std::size_t idx = 0; idx < labels_.size(); ++idx) {
    worker_index_[fill[labels_[idx].worker]++] = idx;
  }

  worker_names_ = index_names(n_workers_);
  task_names_ = index_names(n_tasks_);
  class_names_ = index_names(n_classes_);
}

std::span<const Observation> LabelDataset::task_labels(int task) const {
  return std::span<const Observation>(labels_).subspan(
      task_begin_[task], task_begin_[task + 1] - task_begin_[task]);
}

std::span<const std::size_t> LabelDataset::worker_label_indices(int worker) const {
  return std::span<const std::size_t>(worker_index_)
      .subspan(worker_begin_[worker], worker_begin_[worker + 1] - worker_begin_[worker]);
}

bool LabelDataset::has_gold() const {
  return std::ranges::any_of(gold_, [](const auto& g) { return g.has_value(); });
}

std::optional<int> LabelDataset::gold_label(int task) const {
  if (gold_.empty()) return std::nullopt;
  return gold_[task];
}

Eigen::MatrixXd LabelDataset::observation_matrix() const {
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(n_workers_, n_tasks_);
  for (const auto& obs : labels_) o(obs.worker, obs.task) = 1.0;
  return o;
}

void LabelDataset::set_names(std::vector<std::string> workers,
                             std::vector<std::string> tasks,
                             std::vector<std::string> classes) {
  if (static_cast<int>(workers.size()) != n_workers_ ||
      static_cast<int>(tasks.size()) != n_tasks_ ||
      static_cast<int>(classes.size()) != n_classes_) {
    throw DomainError("name vectors do not match dataset dimensions");
  }
  worker_names_ = std::move(workers);
  task_names_ = std::move(tasks);
  class_names_ = std::move(classes);
}

LabelDataset LabelDataset::with_labels(int n_workers, std::vector<Observation> labels,
                                       std::vector<std::string> extra_worker_names) const {
  if (n_workers < n_workers_) throw DomainError("cannot drop workers");
  LabelDataset out(n_workers, n_tasks_, n_classes_, std::move(labels), gold_);
  auto workers = worker_names_;
  for (int i = n_workers_; i < n_workers; ++i) {
    const auto extra = static_cast<std::size_t>(i - n_workers_);
    workers.push_back(extra < extra_worker_names.size() ? extra_worker_names[extra]
                                                        : std::to_string(i));
  }
  out.set_names(std::move(workers), task_names_, class_names_);
  return out;
}

LabelDataset parse_dataset(const std::string& labels_csv,
                           const std::optional<std::string>& gold_csv,
                           int n_classes) {
  if (n_classes < 2) throw DomainError("need at least 2 classes");
  const auto label_rows = read_csv_rows(labels_csv, "labels", {"worker", "task", "label"});
  std::vector<CsvRow> gold_rows;
  if (gold_csv) gold_rows = read_csv_rows(*gold_csv, "gold", {"task", "label"});

  std::vector<std::string> worker_tokens, task_tokens, class_tokens;
  for (const auto& r : gold_rows) {
    task_tokens.push_back(r.fields[0]);
    class_tokens.push_back(r.fields[1]);
  }
  for (const auto& r : label_rows) {
    worker_tokens.push_back(r.fields[0]);
    task_tokens.push_back(r.fields[1]);
    class_tokens.push_back(r.fields[2]);
  }
  const TokenIndex workers(worker_tokens), tasks(task_tokens), classes(class_tokens);
  if (classes.size() > n_classes) {
    throw DomainError("found " + std::to_string(classes.size()) +
                      " distinct labels but K = " + std::to_string(n_classes) +
                      " (label '" + classes.names().back() + "' maps to index >= K)");
  }

  std::vector<std::optional<int>> gold;
  if (gold_csv) {
    gold.assign(tasks.size(), std::nullopt);
    for (const auto& r : gold_rows) {
      auto& slot = gold[tasks.at(r.fields[0])];
      const int label = classes.at(r.fields[1]);
      if (slot && *slot != label) {
        throw ParseError("gold: line " + std::to_string(r.line) +
                         ": conflicting gold label for task '" + r.fields[0] + "'");
      }
      slot = label;
    }
  }

  std::vector<Observation> obs;
  obs.reserve(label_rows.size());
  for (const auto& r : label_rows) {
    obs.push_back({workers.at(r.fields[0]), tasks.at(r.fields[1]), classes.at(r.fields[2])});
  }

  LabelDataset ds(workers.size(), tasks.size(), n_classes, std::move(obs), std::move(gold));
  auto class_names = classes.names();
  for (int k = classes.size(); k < n_classes; ++k) class_names.push_back(std::to_string(k));
  ds.set_names(workers.names(), tasks.names(), std::move(class_names));
  return ds;
}

LabelDataset load_dataset(const std::filesystem::path& labels_path,
                          const std::optional<std::filesystem::path>& gold_path,
                          int n_classes) {
  std::optional<std::string> gold_text;
  if (gold_path) gold_text = read_file(*gold_path);
  return parse_dataset(read_file(labels_path), gold_text, n_classes);
}

void write_labels_csv(const LabelDataset& ds, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "worker,task,label\n";
  for (const auto& o : ds.labels()) {
    out << ds.worker_names()[o.worker] << ',' << ds.task_names()[o.task] << ','
        << ds.class_names()[o.label] << '\n';
  }
}

void write_gold_csv(const LabelDataset& ds, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "task,label\n";
  for (int j = 0; j < ds.n_tasks(); ++j) {
    if (const auto g = ds.gold_label(j)) {
      out << ds.task_names()[j] << ',' << ds.class_names()[*g] << '\n';
    }
  }
}

void write_class_map_csv(const LabelDataset& ds, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "index,name\n";
  for (int k = 0; k < ds.n_classes(); ++k) out << k << ',' << ds.class_names()[k] << '\n';
}

void convert_tsv_to_csv(const std::filesystem::path& tsv_path,
                        const std::filesystem::path& csv_path) {
  const std::string text = read_file(tsv_path);
  std::istringstream in(text);
  auto out = open_for_write(csv_path);
  out << "worker,task,label\n";
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == '!') continue;
    const auto fields = split(t, '\t');
    if (fields.size() != 3) {
      throw ParseError(tsv_path.string() + ": line " + std::to_string(line_no) +
                       ": expected 3 tab-separated fields");
    }
    if (line_no == 1 && fields[0] == "worker" && fields[1] == "task") continue;
    for (const auto& f : fields) {
      if (f.empty() || f.find(',') != std::string::npos) {
        throw ParseError(tsv_path.string() + ": line " + std::to_string(line_no) +
                         ": empty field or field containing ','");
      }
    }
    out << fields[0] << ',' << fields[1] << ',' << fields[2] << '\n';
  }
}

void convert_annotation_tsv(const std::filesystem::path& tsv_path,
                            const std::filesystem::path& labels_path,
                            const std::filesystem::path& gold_path) {
  const std::string text = read_file(tsv_path);
  std::istringstream in(text);
  auto labels = open_for_write(labels_path);
  auto gold = open_for_write(gold_path);
  labels << "worker,task,label\n";
  gold << "task,label\n";
  std::unordered_map<std::string, std::string> gold_seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == '!') continue;
    const auto fields = split(t, '\t');
    const auto where = tsv_path.string() + ": line " + std::to_string(line_no);
    if (fields.size() != 5) throw ParseError(where + ": expected 5 tab-separated fields");
    for (std::size_t f = 1; f < 5; ++f) {
      if (fields[f].empty() || fields[f].find(',') != std::string::npos) {
        throw ParseError(where + ": empty field or field containing ','");
      }
    }
    labels << fields[1] << ',' << fields[2] << ',' << fields[3] << '\n';
    const auto [it, inserted] = gold_seen.try_emplace(fields[2], fields[4]);
    if (inserted) {
      gold << fields[2] << ',' << fields[4] << '\n';
    } else if (it->second != fields[4]) {
      throw ParseError(where + ": conflicting gold label for task " + fields[2]);
    }
  }
}

PropensityMatrix::PropensityMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      const double v = values_(i, j);
      if (!(v > 0.0 && v <= 1.0)) {
        throw DomainError("propensity (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") = " + std::to_string(v) + " outside (0, 1]");
      }
    }
  }
}

PropensityMatrix PropensityMatrix::constant(int n_workers, int n_tasks, double value) {
  return PropensityMatrix(Eigen::MatrixXd::Constant(n_workers, n_tasks, value));
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  std::array<char, 32> buf{};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), m(i, j));
      out.write(buf.data(), end - buf.data());
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split(t, ',')) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                         ": not a number: '" + f + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<double> unit_weights(const LabelDataset& ds) {
  return std::vector<double>(ds.n_labels(), 1.0);
}

std::vector<double> ips_weights(const LabelDataset& ds, const PropensityMatrix& e) {
  if (e.n_workers() != ds.n_workers() || e.n_tasks() != ds.n_tasks()) {
    throw DomainError("propensity matrix is " + std::to_string(e.n_workers()) + "x" +
                      std::to_string(e.n_tasks()) + ", dataset is " +
                      std::to_string(ds.n_workers()) + "x" + std::to_string(ds.n_tasks()));
  }
  std::vector<double> w;
  w.reserve(ds.n_labels());
  for (const auto& o : ds.labels()) {
    const double p = e(o.worker, o.task);
    if (!(p > 0.0)) throw DomainError("non-positive propensity on an observed cell");
    w.push_back(1.0 / p);
  }
  return w;
}

std::vector<int> LabelPosterior::predictions() const {
  std::vector<int> out(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index j = 0; j < q.rows(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < q.cols(); ++k) {
      if (q(j, k) > q(j, best)) best = k;
    }
    out[j] = static_cast<int>(best);
  }
  return out;
}

}  // namespace biascrowd
