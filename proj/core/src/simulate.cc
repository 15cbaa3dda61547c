#include "biascrowd/simulate.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

namespace biascrowd {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int wrong_label(int truth, int n_classes, Rng& rng) {
  if (n_classes == 2) return 1 - truth;
  std::uniform_int_distribution<int> pick(0, n_classes - 2);
  const int k = pick(rng);
  return k >= truth ? k + 1 : k;
}

void check_injection(const LabelDataset& ds, const InjectionConfig& cfg) {
  if (cfg.count < 0) throw DomainError("injection count must be nonnegative");
  if (cfg.count > max_injection_count(ds)) {
    throw DomainError("injecting " + std::to_string(cfg.count) +
                      " workers would exceed a malicious-label fraction of 0.5 (max " +
                      std::to_string(max_injection_count(ds)) + ")");
  }
}

LabelDataset append_workers(const LabelDataset& ds, const InjectionConfig& cfg,
                            const std::vector<std::vector<int>>& labels_by_worker,
                            const std::string& prefix) {
  std::vector<Observation> obs(ds.labels().begin(), ds.labels().end());
  std::vector<std::string> names;
  for (int w = 0; w < cfg.count; ++w) {
    const int worker = ds.n_workers() + w;
    for (int j = 0; j < ds.n_tasks(); ++j) obs.push_back({worker, j, labels_by_worker[w][j]});
    names.push_back(prefix + std::to_string(w));
  }
  return ds.with_labels(ds.n_workers() + cfg.count, std::move(obs), std::move(names));
}

}  // namespace

Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

SyntheticData generate_synthetic(const SynthConfig& cfg) {
  if (cfg.n_workers < 1 || cfg.n_tasks < 1) throw DomainError("need at least one worker and task");
  if (cfg.n_classes < 2) throw DomainError("need at least 2 classes");
  if (!(cfg.sd_e > 0.0 && cfg.sd_c > 0.0)) throw DomainError("standard deviations must be positive");
  if (!(cfg.rho >= -1.0 && cfg.rho <= 1.0)) throw DomainError("rho must lie in [-1, 1]");

  Rng rng = make_rng(cfg.seed);
  std::uniform_int_distribution<int> uniform_class(0, cfg.n_classes - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::optional<int>> gold(cfg.n_tasks);
  for (auto& g : gold) g = uniform_class(rng);

  const int n = cfg.n_workers;
  const int m = cfg.n_tasks;
  Eigen::MatrixXd raw_e(n, m), raw_c(n, m), e(n, m), c(n, m);
  const double ortho = std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));
  std::vector<Observation> obs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      raw_e(i, j) = cfg.mean_e + cfg.sd_e * z1;
      raw_c(i, j) = cfg.mean_c + cfg.sd_c * (cfg.rho * z1 + ortho * z2);
      e(i, j) = std::clamp(raw_e(i, j), 0.0, 1.0);
      c(i, j) = std::clamp(raw_c(i, j), 0.0, 1.0);
      if (unit(rng) < e(i, j)) {
        const int truth = *gold[j];
        const int label = unit(rng) < c(i, j) ? truth : wrong_label(truth, cfg.n_classes, rng);
        obs.push_back({i, j, label});
      }
    }
  }
  Eigen::MatrixXd floored = e.unaryExpr([&](double v) { return v > 0.0 ? v : cfg.clip_floor; });
  return {LabelDataset(n, m, cfg.n_classes, std::move(obs), std::move(gold)),
          PropensityMatrix(std::move(floored)), std::move(raw_e), std::move(raw_c),
          std::move(c)};
}

LabelDataset subsample_labels(const LabelDataset& ds, int labels_per_task, std::uint64_t seed) {
  if (labels_per_task < 1) throw DomainError("labels_per_task must be >= 1");
  Rng rng = make_rng(seed);
  std::vector<Observation> kept;
  kept.reserve(ds.n_labels());
  for (int j = 0; j < ds.n_tasks(); ++j) {
    const auto task = ds.task_labels(j);
    if (static_cast<int>(task.size()) <= labels_per_task) {
      kept.insert(kept.end(), task.begin(), task.end());
    } else {
      std::sample(task.begin(), task.end(), std::back_inserter(kept), labels_per_task, rng);
    }
  }
  return ds.with_labels(ds.n_workers(), std::move(kept));
}

int max_injection_count(const LabelDataset& ds) {
  if (ds.n_tasks() == 0) return 0;
  return static_cast<int>(ds.n_labels() / static_cast<std::size_t>(ds.n_tasks()));
}

double malicious_fraction(const LabelDataset& original, int count) {
  const double injected = static_cast<double>(count) * original.n_tasks();
  const double total = injected + static_cast<double>(original.n_labels());
  return total > 0.0 ? injected / total : 0.0;
}

LabelDataset inject_spam(const LabelDataset& ds, const InjectionConfig& cfg) {
  check_injection(ds, cfg);
  Rng rng = make_rng(cfg.seed);
  std::uniform_int_distribution<int> uniform_class(0, ds.n_classes() - 1);
  std::vector<std::vector<int>> labels(cfg.count, std::vector<int>(ds.n_tasks()));
  for (auto& row : labels) {
    for (auto& l : row) l = uniform_class(rng);
  }
  return append_workers(ds, cfg, labels, "spam_");
}

LabelDataset inject_collusion(const LabelDataset& ds, const InjectionConfig& cfg) {
  check_injection(ds, cfg);
  Rng rng = make_rng(cfg.seed);
  std::uniform_int_distribution<int> uniform_class(0, ds.n_classes() - 1);
  std::vector<int> shared(ds.n_tasks());
  for (auto& l : shared) l = uniform_class(rng);
  return append_workers(ds, cfg, std::vector<std::vector<int>>(cfg.count, shared), "collude_");
}

LabelDataset inject(const LabelDataset& ds, const InjectionConfig& cfg) {
  return cfg.kind == InjectionKind::kSpam ? inject_spam(ds, cfg) : inject_collusion(ds, cfg);
}

}  // namespace biascrowd
