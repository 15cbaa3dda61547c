#include "biascrowd/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "biascrowd/majority.h"

namespace biascrowd {
namespace {

struct MethodInfo {
  Method method;
  std::string_view id;
};

constexpr MethodInfo kMethods[] = {
    {Method::kMV, "mv"},     {Method::kIpsMV, "ips-mv"},   {Method::kDS, "ds"},
    {Method::kIpsDS, "ips-ds"}, {Method::kGLAD, "glad"}, {Method::kIpsGLAD, "ips-glad"},
};

struct ExperimentInfo {
  Experiment experiment;
  std::string_view id;
};

constexpr ExperimentInfo kExperiments[] = {
    {Experiment::kSyntheticSweep, "synthetic-sweep"},
    {Experiment::kRealSubsample, "real-subsample"},
    {Experiment::kSpamRobustness, "spam-robustness"},
    {Experiment::kCollusionRobustness, "collusion-robustness"},
    {Experiment::kWorkerCorrelation, "worker-correlation"},
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool any_ips(const std::vector<Method>& methods) {
  return std::ranges::any_of(methods, is_ips);
}

// Runs every configured method on `ds`; IPS methods once per gamma with
// propensities estimated from ds's observation pattern.
std::vector<ResultRecord> evaluate_methods(const LabelDataset& ds, const ExperimentConfig& cfg,
                                           const ResultRecord& proto) {
  std::vector<std::pair<double, PropensityMatrix>> estimates;
  if (any_ips(cfg.methods)) {
    const Eigen::MatrixXd observed = ds.observation_matrix();
    for (const double gamma : cfg.gammas) {
      MCConfig mc = cfg.mc;
      mc.gamma = gamma;
      estimates.emplace_back(gamma, fit_1bit_mc(observed, mc));
    }
  }
  std::vector<ResultRecord> out;
  for (const Method m : cfg.methods) {
    auto record = [&](const PropensityMatrix* e, std::optional<double> gamma) {
      const auto start = std::chrono::steady_clock::now();
      const auto predictions = aggregate(ds, m, e, cfg);
      ResultRecord r = proto;
      r.method = std::string(method_id(m));
      r.gamma = gamma;
      r.accuracy = accuracy(predictions, ds.gold());
      r.wall_time = seconds_since(start);
      out.push_back(std::move(r));
    };
    if (is_ips(m)) {
      for (const auto& [gamma, e] : estimates) record(&e, gamma);
    } else {
      record(nullptr, std::nullopt);
    }
  }
  return out;
}

std::vector<ResultRecord> flatten(std::vector<std::vector<ResultRecord>> chunks) {
  std::vector<ResultRecord> out;
  for (auto& c : chunks) std::ranges::move(c, std::back_inserter(out));
  sort_records(out);
  return out;
}

}  // namespace

std::string_view method_id(Method m) {
  for (const auto& info : kMethods) {
    if (info.method == m) return info.id;
  }
  return "unknown";
}

Method parse_method(std::string_view id) {
  for (const auto& info : kMethods) {
    if (info.id == id) return info.method;
  }
  throw ConfigError("unknown method '" + std::string(id) +
                    "' (expected mv, ips-mv, ds, ips-ds, glad, ips-glad)");
}

bool is_ips(Method m) {
  return m == Method::kIpsMV || m == Method::kIpsDS || m == Method::kIpsGLAD;
}

Method base_method(Method m) {
  switch (m) {
    case Method::kIpsMV: return Method::kMV;
    case Method::kIpsDS: return Method::kDS;
    case Method::kIpsGLAD: return Method::kGLAD;
    default: return m;
  }
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t pos = std::min(list.find(',', start), list.size());
    const auto token = list.substr(start, pos - start);
    if (!token.empty()) {
      const Method m = parse_method(token);
      if (std::ranges::find(out, m) == out.end()) out.push_back(m);
    }
    start = pos + 1;
  }
  if (out.empty()) throw ConfigError("empty method list");
  return out;
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (const auto& info : kMethods) out.push_back(info.method);
  return out;
}

std::string_view experiment_id(Experiment e) {
  for (const auto& info : kExperiments) {
    if (info.experiment == e) return info.id;
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view id) {
  for (const auto& info : kExperiments) {
    if (info.id == id) return info.experiment;
  }
  throw ConfigError("unknown experiment '" + std::string(id) + "'");
}

std::vector<double> rho_grid(int points) {
  if (points < 2) throw ConfigError("rho grid needs at least 2 points");
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) out[i] = (2.0 * i - (points - 1)) / (points - 1);
  return out;
}

void ExperimentConfig::validate() const {
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (methods.empty()) throw ConfigError("no methods selected");
  if (experiment == Experiment::kSyntheticSweep) {
    for (const Method m : methods) {
      if (m != Method::kMV && m != Method::kIpsMV) {
        throw ConfigError("synthetic-sweep supports only mv and ips-mv");
      }
    }
    if (rhos.empty()) throw ConfigError("rho grid is empty");
    for (const double r : rhos) {
      if (!(r >= -1.0 && r <= 1.0)) throw ConfigError("rho values must lie in [-1, 1]");
    }
  } else if (any_ips(methods)) {
    if (gammas.empty()) throw ConfigError("IPS methods need at least one gamma");
    for (const double g : gammas) {
      if (!(g > 0.0)) throw ConfigError("gamma values must be positive");
    }
  }
  if (experiment == Experiment::kRealSubsample) {
    if (labels_per_task.empty()) throw ConfigError("labels-per-task list is empty");
    for (const int k : labels_per_task) {
      if (k < 1) throw ConfigError("labels-per-task values must be >= 1");
    }
  }
  for (const int c : inject_counts) {
    if (c < 0) throw ConfigError("injection counts must be nonnegative");
  }
  if (!(mc.clip_floor > 0.0 && mc.clip_floor < 0.5)) {
    throw ConfigError("clip floor must lie in (0, 0.5)");
  }
  if (ds.em.max_iters < 0 || glad.em.max_iters < 0 || glad.max_steps < 0 || mc.max_iters < 0) {
    throw ConfigError("iteration limits must be nonnegative");
  }
  if (ds.smoothing < 0.0) throw ConfigError("smoothing must be nonnegative");
  if (!(glad.shrink > 0.0 && glad.shrink < 1.0)) throw ConfigError("shrink must lie in (0, 1)");
  if (dataset_name.find_first_of(",\n") != std::string::npos) {
    throw ConfigError("dataset name must not contain commas");
  }
}

std::vector<int> aggregate(const LabelDataset& ds, Method method, const PropensityMatrix* e,
                           const ExperimentConfig& cfg) {
  if (is_ips(method) && e == nullptr) {
    throw ConfigError(std::string(method_id(method)) + " needs propensities");
  }
  switch (method) {
    case Method::kMV: return majority_vote(ds).predictions;
    case Method::kIpsMV: return ips_majority_vote(ds, *e).predictions;
    case Method::kDS: return ds_run(ds, nullptr, cfg.ds).predictions();
    case Method::kIpsDS: return ds_run(ds, e, cfg.ds).predictions();
    case Method::kGLAD: return glad_run(ds, nullptr, cfg.glad).predictions();
    case Method::kIpsGLAD: return glad_run(ds, e, cfg.glad).predictions();
  }
  throw ConfigError("unknown method");
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<ResultRecord> run_synthetic_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n_rho = static_cast<int>(cfg.rhos.size());
  std::vector<std::vector<ResultRecord>> chunks(static_cast<std::size_t>(n_rho) * cfg.reps);
  parallel_for(static_cast<int>(chunks.size()), cfg.threads, [&](int item) {
    const double rho = cfg.rhos[item / cfg.reps];
    const int rep = item % cfg.reps;
    SynthConfig synth = cfg.synth;
    synth.rho = rho;
    synth.seed = cfg.seed + static_cast<std::uint64_t>(rep);
    const SyntheticData data = generate_synthetic(synth);
    for (const Method m : cfg.methods) {
      const auto start = std::chrono::steady_clock::now();
      const auto predictions = aggregate(data.dataset, m, &data.propensity, cfg);
      ResultRecord r;
      r.experiment = std::string(experiment_id(Experiment::kSyntheticSweep));
      r.dataset = "synthetic";
      r.method = std::string(method_id(m));
      r.axis = "rho";
      r.axis_value = rho;
      r.seed = synth.seed;
      r.accuracy = accuracy(predictions, data.dataset.gold());
      r.wall_time = seconds_since(start);
      chunks[item].push_back(std::move(r));
    }
  });
  return flatten(std::move(chunks));
}

std::vector<ResultRecord> run_real_subsample(const LabelDataset& ds, const ExperimentConfig& cfg) {
  cfg.validate();
  if (!ds.has_gold()) throw MissingGoldError("real-subsample needs gold labels");
  const int n_k = static_cast<int>(cfg.labels_per_task.size());
  std::vector<std::vector<ResultRecord>> chunks(static_cast<std::size_t>(n_k) * cfg.reps);
  parallel_for(static_cast<int>(chunks.size()), cfg.threads, [&](int item) {
    const int k = cfg.labels_per_task[item / cfg.reps];
    const int rep = item % cfg.reps;
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
    const LabelDataset sub = subsample_labels(ds, k, seed);
    ResultRecord proto;
    proto.experiment = std::string(experiment_id(Experiment::kRealSubsample));
    proto.dataset = cfg.dataset_name;
    proto.axis = "labels_per_task";
    proto.axis_value = k;
    proto.seed = seed;
    chunks[item] = evaluate_methods(sub, cfg, proto);
  });
  return flatten(std::move(chunks));
}

std::vector<ResultRecord> run_injection(const LabelDataset& ds, const ExperimentConfig& cfg,
                                        InjectionKind kind) {
  cfg.validate();
  if (!ds.has_gold()) throw MissingGoldError("injection experiments need gold labels");
  std::vector<int> counts = cfg.inject_counts;
  if (counts.empty()) {
    for (int c = 0; c <= max_injection_count(ds); ++c) counts.push_back(c);
  }
  const int n_c = static_cast<int>(counts.size());
  std::vector<std::vector<ResultRecord>> chunks(static_cast<std::size_t>(n_c) * cfg.reps);
  parallel_for(static_cast<int>(chunks.size()), cfg.threads, [&](int item) {
    const int count = counts[item / cfg.reps];
    const int rep = item % cfg.reps;
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
    const LabelDataset injected = inject(ds, {kind, count, seed});
    ResultRecord proto;
    proto.experiment = std::string(experiment_id(
        kind == InjectionKind::kSpam ? Experiment::kSpamRobustness
                                     : Experiment::kCollusionRobustness));
    proto.dataset = cfg.dataset_name;
    proto.axis = "injected_count";
    proto.axis_value = count;
    proto.malicious_fraction = malicious_fraction(ds, count);
    proto.seed = seed;
    chunks[item] = evaluate_methods(injected, cfg, proto);
  });
  return flatten(std::move(chunks));
}

WorkerCorrelation run_worker_correlation(const LabelDataset& ds) {
  WorkerCorrelation out;
  out.stats = worker_stats(ds);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < out.stats.propensity.size(); ++i) {
    if (!out.stats.accuracy[i]) continue;
    x.push_back(out.stats.propensity[i]);
    y.push_back(*out.stats.accuracy[i]);
  }
  out.pearson = pearson_correlation(x, y);
  out.spearman = spearman_correlation(x, y);
  return out;
}

void write_worker_stats_csv(const LabelDataset& ds, const WorkerCorrelation& wc,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream stats(dir / "worker_stats.csv");
  if (!stats) throw std::runtime_error("cannot write " + (dir / "worker_stats.csv").string());
  stats.precision(17);
  stats << "worker,n_labels,propensity,accuracy\n";
  for (int i = 0; i < ds.n_workers(); ++i) {
    stats << ds.worker_names()[i] << ',' << ds.worker_label_indices(i).size() << ','
          << wc.stats.propensity[i] << ',';
    if (wc.stats.accuracy[i]) stats << *wc.stats.accuracy[i];
    stats << '\n';
  }
  std::ofstream corr(dir / "correlation.csv");
  if (!corr) throw std::runtime_error("cannot write " + (dir / "correlation.csv").string());
  corr.precision(17);
  const auto used = std::ranges::count_if(wc.stats.accuracy, [](const auto& a) { return a.has_value(); });
  corr << "pearson,spearman,n_workers_used\n" << wc.pearson << ',' << wc.spearman << ',' << used
       << '\n';
}

}  // namespace biascrowd
