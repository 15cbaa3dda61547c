#include "biascrowd/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace biascrowd {

WorkerStats worker_stats(const LabelDataset& ds) {
  if (!ds.has_gold()) throw MissingGoldError("worker_stats needs gold labels");
  const auto n = static_cast<std::size_t>(ds.n_workers());
  WorkerStats out;
  out.propensity.assign(n, 0.0);
  out.accuracy.assign(n, std::nullopt);
  const auto labels = ds.labels();
  for (int i = 0; i < ds.n_workers(); ++i) {
    const auto idx = ds.worker_label_indices(i);
    out.propensity[i] =
        ds.n_tasks() > 0 ? static_cast<double>(idx.size()) / ds.n_tasks() : 0.0;
    int graded = 0;
    int correct = 0;
    for (const std::size_t l : idx) {
      const auto g = ds.gold_label(labels[l].task);
      if (!g) continue;
      ++graded;
      correct += (*g == labels[l].label);
    }
    if (graded > 0) out.accuracy[i] = static_cast<double>(correct) / graded;
  }
  return out;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("correlation inputs differ in length");
  if (x.size() < 2) throw DomainError("correlation needs at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw ZeroVarianceError("correlation input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("correlation inputs differ in length");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson_correlation(rx, ry);
}

double propensity_accuracy_correlation(const WorkerStats& stats) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < stats.propensity.size(); ++i) {
    if (!stats.accuracy[i]) continue;
    x.push_back(stats.propensity[i]);
    y.push_back(*stats.accuracy[i]);
  }
  return pearson_correlation(x, y);
}

double accuracy(std::span<const int> predictions,
                const std::vector<std::optional<int>>& gold) {
  int graded = 0;
  int correct = 0;
  for (std::size_t j = 0; j < gold.size(); ++j) {
    if (!gold[j]) continue;
    if (j >= predictions.size() || predictions[j] < 0) {
      throw CoverageError("no prediction for gold-labeled task " + std::to_string(j));
    }
    ++graded;
    correct += (predictions[j] == *gold[j]);
  }
  if (graded == 0) throw MissingGoldError("accuracy needs at least one gold label");
  return static_cast<double>(correct) / graded;
}

}  // namespace biascrowd
