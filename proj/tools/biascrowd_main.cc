#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biascrowd/dawid_skene.h"
#include "biascrowd/glad.h"
#include "biascrowd/harness.h"
#include "biascrowd/majority.h"
#include "biascrowd/propensity.h"
#include "biascrowd/results.h"
#include "biascrowd/simulate.h"
#include "biascrowd/stats.h"

namespace fs = std::filesystem;
using namespace biascrowd;

namespace {

constexpr const char* kDataRootEnv = "BIASCROWD_DATA_ROOT";

struct DataOptions {
  std::string dataset;
  std::string labels;
  std::string gold;
  int k = 0;
};

struct ModelOptions {
  int em_max_iters = 100;
  double em_tol = 1e-6;
  double ds_smoothing = 0.01;
  int glad_max_iters = 100;
  double glad_tol = 1e-6;
  int glad_max_steps = 25;
  double glad_step = 1.0;
  double glad_shrink = 0.5;
  double glad_armijo = 1e-4;
  int mc_max_iters = 500;
  double mc_tol = 1e-7;
  double mc_step = 4.0;
  double clip_floor = 0.01;
};

std::optional<fs::path> data_root() {
  const char* root = std::getenv(kDataRootEnv);
  if (root == nullptr || *root == '\0') return std::nullopt;
  return fs::path(root);
}

// Relative paths that do not exist from the working directory are looked up
// under the data root.
fs::path resolve(const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !fs::exists(path)) {
    if (const auto root = data_root(); root && fs::exists(*root / path)) return *root / path;
  }
  return path;
}

void add_data_options(CLI::App* app, DataOptions& d, bool gold_required_hint) {
  app->add_option("--dataset", d.dataset,
                  std::string("Dataset directory name under $") + kDataRootEnv +
                      " holding labels.csv and gold.csv");
  app->add_option("--labels", d.labels, "Labels CSV (worker,task,label)");
  app->add_option("--gold", d.gold,
                  gold_required_hint ? "Gold CSV (task,label), required for accuracy"
                                     : "Gold CSV (task,label)");
  app->add_option("--k", d.k, "Number of classes")->check(CLI::Range(2, 1 << 20));
}

void add_model_options(CLI::App* app, ModelOptions& m) {
  app->add_option("--em-max-iters", m.em_max_iters, "D&S EM iteration cap")->capture_default_str();
  app->add_option("--em-tol", m.em_tol, "D&S absolute lower-bound tolerance")->capture_default_str();
  app->add_option("--ds-smoothing", m.ds_smoothing, "D&S confusion pseudo-count")
      ->capture_default_str();
  app->add_option("--glad-max-iters", m.glad_max_iters, "GLAD EM iteration cap")
      ->capture_default_str();
  app->add_option("--glad-tol", m.glad_tol, "GLAD absolute objective tolerance")
      ->capture_default_str();
  app->add_option("--glad-max-steps", m.glad_max_steps, "GLAD gradient steps per M-step")
      ->capture_default_str();
  app->add_option("--glad-step", m.glad_step, "GLAD initial line-search step")
      ->capture_default_str();
  app->add_option("--glad-shrink", m.glad_shrink, "GLAD backtracking factor")->capture_default_str();
  app->add_option("--glad-armijo", m.glad_armijo, "GLAD Armijo constant")->capture_default_str();
  app->add_option("--mc-max-iters", m.mc_max_iters, "1-bit MC iteration cap")->capture_default_str();
  app->add_option("--mc-tol", m.mc_tol, "1-bit MC relative decrease tolerance")
      ->capture_default_str();
  app->add_option("--mc-step", m.mc_step, "1-bit MC initial step")->capture_default_str();
  app->add_option("--clip-floor", m.clip_floor, "Lower clip for estimated propensities")
      ->capture_default_str();
}

void apply_model_options(const ModelOptions& m, ExperimentConfig& cfg) {
  cfg.ds.em.max_iters = m.em_max_iters;
  cfg.ds.em.tol = m.em_tol;
  cfg.ds.smoothing = m.ds_smoothing;
  cfg.glad.em.max_iters = m.glad_max_iters;
  cfg.glad.em.tol = m.glad_tol;
  cfg.glad.max_steps = m.glad_max_steps;
  cfg.glad.initial_step = m.glad_step;
  cfg.glad.shrink = m.glad_shrink;
  cfg.glad.armijo = m.glad_armijo;
  cfg.mc.max_iters = m.mc_max_iters;
  cfg.mc.tol = m.mc_tol;
  cfg.mc.step_init = m.mc_step;
  cfg.mc.clip_floor = m.clip_floor;
}

struct LoadedData {
  LabelDataset dataset;
  std::string name;
};

LoadedData load(const DataOptions& d, bool need_gold) {
  fs::path labels, gold;
  std::string name;
  if (!d.dataset.empty()) {
    const auto root = data_root();
    const fs::path dir = root ? *root / d.dataset : fs::path(d.dataset);
    labels = dir / "labels.csv";
    gold = dir / "gold.csv";
    name = fs::path(d.dataset).filename().string();
  }
  if (!d.labels.empty()) labels = resolve(d.labels);
  if (!d.gold.empty()) gold = resolve(d.gold);
  if (labels.empty()) throw ConfigError("either --dataset or --labels is required");
  if (d.k < 2) throw ConfigError("--k (number of classes, >= 2) is required");
  if (name.empty()) {
    name = labels.parent_path().filename().string();
    if (name.empty() || name == ".") name = labels.stem().string();
  }
  std::optional<fs::path> gold_path;
  if (!gold.empty() && (fs::exists(gold) || !d.gold.empty())) gold_path = gold;
  if (need_gold && !gold_path) throw ConfigError("a gold CSV is required (--gold)");
  return {load_dataset(labels, gold_path, d.k), name};
}

std::string format_gamma(double g) {
  std::ostringstream ss;
  ss << g;
  return ss.str();
}

void dump_propensities(const LabelDataset& ds, const ExperimentConfig& cfg, const fs::path& out) {
  const Eigen::MatrixXd observed = ds.observation_matrix();
  for (const double g : cfg.gammas) {
    MCConfig mc = cfg.mc;
    mc.gamma = g;
    write_matrix_csv(fit_1bit_mc(observed, mc).values(),
                     out / ("propensity_gamma_" + format_gamma(g) + ".csv"));
  }
}

void print_summary(const std::vector<ResultRecord>& records) {
  for (const auto& s : summarize(records)) {
    std::cout << s.dataset << '\t' << s.method_label << '\t' << s.axis << '=' << s.axis_value
              << '\t' << s.mean_accuracy << '\n';
  }
}

void write_trace(const std::vector<double>& trace, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "iteration,objective\n";
  for (std::size_t t = 0; t < trace.size(); ++t) out << t << ',' << trace[t] << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd label aggregation with inverse-propensity weighting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "biascrowd 0.1.0");

  // Shared experiment options.
  DataOptions data;
  ModelOptions model;
  std::string methods = "mv,ips-mv,ds,ips-ds,glad,ips-glad";
  std::vector<double> gammas = {0.1, 1.0, 10.0};
  std::vector<int> lpt = {2, 5, 8};
  std::vector<double> rhos;
  int rho_points = 21;
  std::vector<int> inject_counts;
  int reps = 5;
  std::uint64_t seed = 42;
  std::string out_dir = "results";
  int threads = 0;
  bool dump_ehat = false;
  SynthConfig synth;

  std::vector<std::pair<CLI::App*, Experiment>> experiments;
  for (const auto e : {Experiment::kSyntheticSweep, Experiment::kRealSubsample,
                       Experiment::kSpamRobustness, Experiment::kCollusionRobustness,
                       Experiment::kWorkerCorrelation}) {
    auto* sub = app.add_subcommand(std::string(experiment_id(e)), "Run the " +
                                                                       std::string(experiment_id(e)) +
                                                                       " experiment");
    experiments.emplace_back(sub, e);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    if (e != Experiment::kSyntheticSweep) add_data_options(sub, data, true);
    if (e == Experiment::kWorkerCorrelation) continue;
    sub->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
    sub->add_option("--reps", reps, "Replications per grid point")->capture_default_str();
    sub->add_option("--seed", seed, "Base seed; replication r uses seed + r")
        ->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
    if (e == Experiment::kSyntheticSweep) {
      sub->add_option("--rho", rhos, "Explicit rho values")->delimiter(',');
      sub->add_option("--rho-points", rho_points, "Evenly spaced rho grid size over [-1, 1]")
          ->capture_default_str();
      sub->add_option("--workers", synth.n_workers)->capture_default_str();
      sub->add_option("--tasks", synth.n_tasks)->capture_default_str();
      sub->add_option("--classes", synth.n_classes)->capture_default_str();
      continue;
    }
    sub->add_option("--gamma", gammas, "Comma-separated 1-bit MC radii")->delimiter(',')
        ->capture_default_str();
    sub->add_flag("--dump-propensity", dump_ehat,
                  "Write the propensity estimate of the full dataset per gamma");
    add_model_options(sub, model);
    if (e == Experiment::kRealSubsample) {
      sub->add_option("--labels-per-task", lpt, "Comma-separated label counts per task")
          ->delimiter(',')
          ->capture_default_str();
    } else {
      sub->add_option("--inject-count", inject_counts,
                      "Comma-separated injected worker counts (default: 0..cap)")
          ->delimiter(',');
    }
  }

  // Single aggregation run.
  auto* agg = app.add_subcommand("aggregate", "Aggregate one dataset with one method");
  DataOptions agg_data;
  ModelOptions agg_model;
  std::string agg_method = "mv";
  double agg_gamma = 1.0;
  std::string agg_out = "aggregate";
  std::string agg_propensity;
  add_data_options(agg, agg_data, false);
  add_model_options(agg, agg_model);
  agg->add_option("--method", agg_method, "mv, ips-mv, ds, ips-ds, glad or ips-glad")
      ->capture_default_str();
  agg->add_option("--gamma", agg_gamma, "1-bit MC radius for IPS methods")->capture_default_str();
  agg->add_option("--propensity", agg_propensity,
                  "Propensity matrix CSV to use instead of estimating one");
  agg->add_option("--out", agg_out, "Output directory")->capture_default_str();

  // Synthetic dataset generation.
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
  SynthConfig gen_cfg;
  std::string gen_out = "synthetic";
  std::string gen_inject;
  int gen_inject_count = 0;
  gen->add_option("--rho", gen_cfg.rho, "Propensity/correctness correlation")
      ->capture_default_str();
  gen->add_option("--seed", gen_cfg.seed)->capture_default_str();
  gen->add_option("--workers", gen_cfg.n_workers)->capture_default_str();
  gen->add_option("--tasks", gen_cfg.n_tasks)->capture_default_str();
  gen->add_option("--classes", gen_cfg.n_classes)->capture_default_str();
  gen->add_option("--inject", gen_inject, "Append malicious workers")
      ->check(CLI::IsMember({"spam", "colluding"}));
  gen->add_option("--inject-count", gen_inject_count, "Number of injected workers")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();

  // Format conversion.
  auto* conv = app.add_subcommand("convert", "Convert tab-separated labels to CSV");
  std::string conv_in, conv_labels = "labels.csv", conv_gold = "gold.csv";
  bool conv_annotation = false;
  conv->add_option("input", conv_in, "Input TSV")->required();
  conv->add_option("--labels-out", conv_labels)->capture_default_str();
  conv->add_option("--gold-out", conv_gold, "Gold output (annotation format only)")
      ->capture_default_str();
  conv->add_flag("--annotation", conv_annotation,
                 "Input is id<TAB>worker<TAB>task<TAB>response<TAB>gold");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [sub, experiment] : experiments) {
      if (!sub->parsed()) continue;
      ExperimentConfig cfg;
      cfg.experiment = experiment;
      cfg.methods = parse_methods(methods);
      cfg.gammas = gammas;
      cfg.labels_per_task = lpt;
      cfg.rhos = rhos.empty() ? rho_grid(rho_points) : rhos;
      cfg.inject_counts = inject_counts;
      cfg.reps = reps;
      cfg.seed = seed;
      cfg.threads = threads;
      cfg.synth = synth;
      apply_model_options(model, cfg);
      const fs::path out(out_dir);

      if (experiment == Experiment::kSyntheticSweep) {
        if (sub->get_option("--methods")->count() == 0) {
          cfg.methods = {Method::kMV, Method::kIpsMV};
        }
        cfg.dataset_name = "synthetic";
        cfg.validate();
        const auto records = run_synthetic_sweep(cfg);
        emit_results(records, out);
        print_summary(records);
        return 0;
      }

      const bool need_gold = true;
      const auto loaded = load(data, need_gold);
      cfg.dataset_name = loaded.name;
      cfg.validate();
      fs::create_directories(out);
      write_class_map_csv(loaded.dataset, out / "class_map.csv");

      if (experiment == Experiment::kWorkerCorrelation) {
        const auto wc = run_worker_correlation(loaded.dataset);
        write_worker_stats_csv(loaded.dataset, wc, out);
        std::cout << loaded.name << "\tpearson=" << wc.pearson << "\tspearman=" << wc.spearman
                  << '\n';
        return 0;
      }
      if (dump_ehat && std::ranges::any_of(cfg.methods, is_ips)) {
        dump_propensities(loaded.dataset, cfg, out);
      }
      std::vector<ResultRecord> records;
      if (experiment == Experiment::kRealSubsample) {
        records = run_real_subsample(loaded.dataset, cfg);
      } else {
        records = run_injection(loaded.dataset, cfg,
                                experiment == Experiment::kSpamRobustness
                                    ? InjectionKind::kSpam
                                    : InjectionKind::kColluding);
      }
      emit_results(records, out);
      print_summary(records);
      return 0;
    }

    if (agg->parsed()) {
      const auto loaded = load(agg_data, false);
      const auto& ds = loaded.dataset;
      ExperimentConfig cfg;
      apply_model_options(agg_model, cfg);
      const Method method = parse_method(agg_method);
      const fs::path out(agg_out);
      fs::create_directories(out);
      std::optional<PropensityMatrix> e;
      if (is_ips(method)) {
        if (!agg_propensity.empty()) {
          e.emplace(read_matrix_csv(resolve(agg_propensity)));
        } else {
          MCConfig mc = cfg.mc;
          mc.gamma = agg_gamma;
          e.emplace(fit_1bit_mc(ds.observation_matrix(), mc));
        }
        if (e->n_workers() != ds.n_workers() || e->n_tasks() != ds.n_tasks()) {
          throw DomainError("propensity matrix shape does not match the dataset");
        }
        write_matrix_csv(e->values(), out / "propensity.csv");
      }
      const PropensityMatrix* ep = e ? &*e : nullptr;
      std::vector<int> predictions;
      switch (base_method(method)) {
        case Method::kDS: {
          const auto r = ds_run(ds, ep, cfg.ds);
          write_trace(r.trace, out / "trace.csv");
          predictions = r.predictions();
          break;
        }
        case Method::kGLAD: {
          const auto r = glad_run(ds, ep, cfg.glad);
          write_trace(r.trace, out / "trace.csv");
          predictions = r.predictions();
          break;
        }
        default:
          predictions = aggregate(ds, method, ep, cfg);
      }
      {
        std::ofstream pred(out / "predictions.csv");
        if (!pred) throw std::runtime_error("cannot write predictions");
        pred << "task,label\n";
        for (int j = 0; j < ds.n_tasks(); ++j) {
          pred << ds.task_names()[j] << ',' << ds.class_names()[predictions[j]] << '\n';
        }
      }
      write_class_map_csv(ds, out / "class_map.csv");
      if (ds.has_gold()) std::cout << "accuracy\t" << accuracy(predictions, ds.gold()) << '\n';
      return 0;
    }

    if (gen->parsed()) {
      const auto data_out = generate_synthetic(gen_cfg);
      LabelDataset ds = data_out.dataset;
      if (!gen_inject.empty()) {
        ds = inject(ds, {gen_inject == "spam" ? InjectionKind::kSpam : InjectionKind::kColluding,
                         gen_inject_count, gen_cfg.seed});
      }
      const fs::path out(gen_out);
      fs::create_directories(out);
      write_labels_csv(ds, out / "labels.csv");
      write_gold_csv(ds, out / "gold.csv");
      // Injected workers label every task, so their propensity is 1.
      Eigen::MatrixXd e = Eigen::MatrixXd::Ones(ds.n_workers(), ds.n_tasks());
      e.topRows(gen_cfg.n_workers) = data_out.propensity.values();
      write_matrix_csv(e, out / "propensity.csv");
      std::cout << "wrote " << ds.n_labels() << " labels for " << ds.n_tasks() << " tasks to "
                << out.string() << '\n';
      return 0;
    }

    if (conv->parsed()) {
      if (conv_annotation) {
        convert_annotation_tsv(resolve(conv_in), conv_labels, conv_gold);
      } else {
        convert_tsv_to_csv(resolve(conv_in), conv_labels);
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "biascrowd: error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
