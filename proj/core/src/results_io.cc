#include "biascrowd/results.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "biascrowd/dataset.h"

namespace biascrowd {
namespace {

constexpr std::array<std::string_view, 6> kMethodOrder = {"mv",   "ips-mv",   "ds",
                                                          "ips-ds", "glad", "ips-glad"};

int method_rank(const std::string& id) {
  const auto it = std::ranges::find(kMethodOrder, id);
  return static_cast<int>(it - kMethodOrder.begin());
}

std::string format_number(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

// Shortest text that parses back to the same double.
std::string format_exact(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_exact(*v) : std::string();
}

// Method ordering key independent of the label text.
std::tuple<int, double> method_key(const std::string& method, const std::optional<double>& gamma) {
  return {method_rank(method), gamma.value_or(-1.0)};
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void check_token(const std::string& s, std::string_view what) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw DomainError(std::string(what) + " must not contain commas or newlines: " + s);
  }
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

}  // namespace

std::string ResultRecord::method_label() const {
  std::string base;
  if (method == "mv") return "MV";
  if (method == "ds") return "D&S";
  if (method == "glad") return "GLAD";
  if (method == "ips-mv") base = "IPS-MV";
  else if (method == "ips-ds") base = "IPS-D&S";
  else if (method == "ips-glad") base = "IPS-GLAD";
  else return method;
  return base + (gamma ? " (gamma=" + format_number(*gamma) + ")" : " (oracle)");
}

bool record_key_less(const ResultRecord& a, const ResultRecord& b) {
  return std::forward_as_tuple(a.experiment, a.dataset, method_key(a.method, a.gamma),
                               a.axis_value, a.seed) <
         std::forward_as_tuple(b.experiment, b.dataset, method_key(b.method, b.gamma),
                               b.axis_value, b.seed);
}

void sort_records(std::vector<ResultRecord>& records) {
  std::ranges::stable_sort(records, record_key_less);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::tuple<int, double>, double>;
  struct Acc {
    SummaryRow row;
    double sum = 0.0;
  };
  std::map<Key, Acc> groups;
  for (const auto& r : records) {
    auto [it, inserted] = groups.try_emplace(
        Key{r.experiment, r.dataset, method_key(r.method, r.gamma), r.axis_value});
    auto& acc = it->second;
    if (inserted) {
      acc.row = {r.experiment, r.dataset, r.method_label(), r.axis, r.axis_value, 0.0, 0,
                 r.malicious_fraction};
    }
    acc.sum += r.accuracy;
    ++acc.row.n_seeds;
  }
  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (auto& [key, acc] : groups) {
    acc.row.mean_accuracy = acc.sum / acc.row.n_seeds;
    out.push_back(std::move(acc.row));
  }
  return out;
}

void write_records_csv(const std::vector<ResultRecord>& records,
                       const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "experiment,dataset,method,gamma,axis,axis_value,malicious_fraction,seed,accuracy,"
         "wall_time\n";
  for (const auto& r : records) {
    check_token(r.experiment, "experiment");
    check_token(r.dataset, "dataset");
    check_token(r.method, "method");
    check_token(r.axis, "axis");
    out << r.experiment << ',' << r.dataset << ',' << r.method << ','
        << format_optional(r.gamma) << ',' << r.axis << ',' << format_exact(r.axis_value)
        << ',' << format_optional(r.malicious_fraction) << ',' << r.seed << ','
        << format_exact(r.accuracy) << ',' << format_exact(r.wall_time) << '\n';
  }
}

std::vector<ResultRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header");
  std::vector<ResultRecord> out;
  int line_no = 1;
  auto optional_double = [](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 10) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": expected 10 fields");
    }
    try {
      out.push_back({f[0], f[1], f[2], optional_double(f[3]), f[4], std::stod(f[5]),
                     optional_double(f[6]), std::stoull(f[7]), std::stod(f[8]),
                     std::stod(f[9])});
    } catch (const std::logic_error&) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": malformed number");
    }
  }
  return out;
}

void emit_results(std::vector<ResultRecord> records, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  sort_records(records);
  write_records_csv(records, dir / "results_long.csv");

  const auto summary = summarize(records);
  {
    auto out = open_csv(dir / "summary.csv");
    out << "experiment,dataset,method,axis,axis_value,mean_accuracy,n_seeds,"
           "malicious_fraction\n";
    for (const auto& s : summary) {
      out << s.experiment << ',' << s.dataset << ',' << s.method_label << ',' << s.axis << ','
          << format_exact(s.axis_value) << ',' << format_exact(s.mean_accuracy) << ','
          << s.n_seeds << ',' << format_optional(s.malicious_fraction) << '\n';
    }
  }

  // Blocks per (experiment, dataset), with rows in method order and columns
  // in axis order. summarize() already yields that order.
  std::map<std::pair<std::string, std::string>, std::vector<const SummaryRow*>> blocks;
  for (const auto& s : summary) blocks[{s.experiment, s.dataset}].push_back(&s);
  for (const auto& [key, rows] : blocks) {
    std::vector<std::string> methods;
    std::set<double> axis_values;
    std::map<std::pair<std::string, double>, const SummaryRow*> cell;
    std::map<double, std::optional<double>> fraction;
    for (const auto* r : rows) {
      if (std::ranges::find(methods, r->method_label) == methods.end()) {
        methods.push_back(r->method_label);
      }
      axis_values.insert(r->axis_value);
      cell[{r->method_label, r->axis_value}] = r;
      if (r->malicious_fraction) fraction[r->axis_value] = r->malicious_fraction;
    }
    const std::string& axis = rows.front()->axis;
    const std::string stem = sanitize(key.first) + "_" + sanitize(key.second);

    auto table = open_csv(dir / ("table_" + stem + ".csv"));
    table << "method";
    for (const double v : axis_values) table << ',' << axis << '=' << format_number(v);
    table << '\n';
    for (const auto& m : methods) {
      table << m;
      for (const double v : axis_values) {
        table << ',';
        if (const auto it = cell.find({m, v}); it != cell.end()) {
          table << format_exact(it->second->mean_accuracy);
        }
      }
      table << '\n';
    }

    auto plot = open_csv(dir / ("plot_" + stem + ".csv"));
    plot << axis;
    if (!fraction.empty()) plot << ",malicious_fraction";
    for (const auto& m : methods) plot << ',' << m;
    plot << '\n';
    for (const double v : axis_values) {
      plot << format_exact(v);
      if (!fraction.empty()) plot << ',' << format_optional(fraction[v]);
      for (const auto& m : methods) {
        plot << ',';
        if (const auto it = cell.find({m, v}); it != cell.end()) {
          plot << format_exact(it->second->mean_accuracy);
        }
      }
      plot << '\n';
    }
  }
}

}  // namespace biascrowd
