// Command line front end: estimate-k, compare, bench, gen.
//
// Exit codes: 0 success, 1 runtime or data errors, 2 usage errors.
// Option precedence: explicit flags, then a --config JSON file, then the
// built-in defaults. Relative output names without a directory component
// resolve into $KSELECT_OUT_DIR when that variable is set.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kselect/bench.hpp"
#include "kselect/serialize.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j;
  in >> j;
  if (!j.is_object()) throw std::runtime_error("config file '" + path + "' is not a JSON object");
  return j;
}

// flags > config > defaults: a value coming from the config file only
// lands when its flag was not given on the command line.
template <typename T>
void apply_config(const CLI::Option* opt, const json& cfg, const std::string& key, T& target) {
  if (opt != nullptr && opt->count() == 0 && cfg.contains(key)) target = cfg.at(key).get<T>();
}

std::string resolve_out(const std::string& name) {
  if (name.empty()) return name;
  std::filesystem::path p(name);
  if (p.is_absolute() || p.has_parent_path()) return name;
  if (const char* dir = std::getenv("KSELECT_OUT_DIR"); dir != nullptr && *dir != '\0')
    return (std::filesystem::path(dir) / p).string();
  return name;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

kselect::DataMatrix load_input(const std::string& path, bool header) {
  kselect::CsvOptions opts;
  opts.has_header = header;
  return kselect::load_csv(path, opts);
}

void write_or_print(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  const std::string resolved = resolve_out(out_path);
  std::ofstream out(resolved, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + resolved + "' for writing");
  out << body;
}

struct EstimateArgs {
  std::string input;
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::vector<double> weights{0.25, 0.25, 0.25, 0.25};
  bool header = false;
  bool cluster = false;
  bool as_json = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* weights_opt = nullptr;
};

int run_estimate(const EstimateArgs& a) {
  if (a.weights.size() != 4) {
    std::cerr << "error: --weights needs exactly 4 values (density, local "
                 "structure, compactness scan, gap)\n";
    return 2;
  }

  const kselect::DataMatrix X = load_input(a.input, a.header);
  kselect::PipelineConfig cfg;
  cfg.seed = a.seed;
  for (std::size_t i = 0; i < 4; ++i) cfg.fusion.weights[i] = a.weights[i];

  const kselect::PipelineResult result = kselect::estimate_k(X, cfg);

  std::ostringstream body;
  if (a.as_json) {
    json j = kselect::to_json(result);
    if (a.cluster && result.k_final >= 1) {
      kselect::KMeansConfig km = cfg.kmeans;
      km.seed = cfg.seed;
      j["clustering"] = kselect::to_json(kselect::fit_kmeans(X, result.k_final, km));
    }
    body << j.dump(2) << "\n";
  } else {
    for (const kselect::KEstimate& e : result.estimates)
      body << kselect::method_name(e.method) << ": " << e.k
           << (e.degenerate_data ? " (degenerate input)" : "") << "\n";
    body << "weights:";
    for (double w : result.weights) body << ' ' << fmt(w);
    body << "\nk_final: " << result.k_final << "\n";

    if (a.cluster) {
      kselect::KMeansConfig km = cfg.kmeans;
      km.seed = cfg.seed;
      const kselect::ClusteringResult fit = kselect::fit_kmeans(X, result.k_final, km);
      std::vector<std::size_t> sizes(fit.k, 0);
      for (std::size_t c : fit.assignments) ++sizes[c];
      body << "clustering: k=" << fit.k << " iterations=" << fit.iterations_run
           << " dispersion=" << fmt(fit.dispersion) << " sizes=";
      for (std::size_t i = 0; i < sizes.size(); ++i) body << (i ? "," : "") << sizes[i];
      body << "\n";
    }
  }
  write_or_print(body.str(), a.out_path);
  return 0;
}

struct CompareArgs {
  std::string input;
  std::string config_path;
  std::string out_path;
  std::string methods = "proposed,wcss,dbi,silhouette";
  std::string format = "csv";
  std::string dataset_id;
  std::uint64_t seed = 0;
  std::size_t k_min = 2, k_max = 10;
  std::size_t trials = 3;
  bool header = false;

  CLI::Option *seed_opt = nullptr, *methods_opt = nullptr, *format_opt = nullptr,
              *kmin_opt = nullptr, *kmax_opt = nullptr, *trials_opt = nullptr;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

kselect::BenchReport compare_on(const kselect::DataMatrix& X, const CompareArgs& a) {
  kselect::ComparisonConfig cfg;
  cfg.k_range = {a.k_min, a.k_max};
  cfg.seed = a.seed;
  cfg.kmeans.seed = a.seed;
  cfg.pipeline.seed = a.seed;
  cfg.timing_trials = a.trials;
  cfg.dataset_id = a.dataset_id;
  return kselect::run_comparison(X, split_list(a.methods), cfg);
}

bool check_format(const std::string& format) {
  if (format == "json" || format == "csv") return true;
  std::cerr << "error: --format must be json or csv\n";
  return false;
}

int emit(const kselect::BenchReport& report, const std::string& format,
         const std::string& out_path) {
  const std::string body = format == "json"
                               ? kselect::report_to_json(report).dump(2) + "\n"
                               : kselect::report_to_csv(report);
  write_or_print(body, out_path);
  return 0;
}

int run_compare(CompareArgs& a) {
  if (!check_format(a.format)) return 2;
  if (a.dataset_id.empty())
    a.dataset_id = std::filesystem::path(a.input).filename().string();
  const kselect::DataMatrix X = load_input(a.input, a.header);
  return emit(compare_on(X, a), a.format, a.out_path);
}

struct BenchArgs {
  std::string config_path;
  std::string out_path;
  std::string methods = "proposed,wcss,dbi,silhouette,silhouette_condensed";
  std::string format = "csv";
  std::size_t k = 3, n_per = 100, d = 2;
  double spread = 30.0, sd = 1.0;
  std::uint64_t seed = 0;
  std::size_t k_min = 2, k_max = 10;
  std::size_t trials = 3;

  CLI::Option *seed_opt = nullptr, *methods_opt = nullptr, *format_opt = nullptr,
              *k_opt = nullptr, *nper_opt = nullptr, *d_opt = nullptr,
              *spread_opt = nullptr, *sd_opt = nullptr;
};

int run_bench(const BenchArgs& a) {
  if (!check_format(a.format)) return 2;
  kselect::BlobSpec spec;
  spec.k_true = a.k;
  spec.n_per_cluster = a.n_per;
  spec.d = a.d;
  spec.center_spread = a.spread;
  spec.cluster_sd = a.sd;
  spec.seed = a.seed;
  auto [X, labels] = kselect::generate_blobs(spec);

  kselect::ComparisonConfig cfg;
  cfg.k_range = {a.k_min, a.k_max};
  cfg.seed = a.seed;
  cfg.kmeans.seed = a.seed;
  cfg.pipeline.seed = a.seed;
  cfg.timing_trials = a.trials;
  std::ostringstream id;
  id << "blobs-k" << a.k << "-d" << a.d << "-seed" << a.seed;
  cfg.dataset_id = id.str();

  return emit(kselect::run_comparison(X, split_list(a.methods), cfg), a.format,
              a.out_path);
}

struct GenArgs {
  std::string config_path;
  std::string out_path = "blobs.csv";
  std::size_t k = 3, n_per = 100, d = 2;
  double spread = 30.0, sd = 1.0;
  std::uint64_t seed = 0;
  bool with_labels = false;

  CLI::Option *seed_opt = nullptr, *k_opt = nullptr, *nper_opt = nullptr,
              *d_opt = nullptr, *spread_opt = nullptr, *sd_opt = nullptr;
};

int run_gen(const GenArgs& a) {
  kselect::BlobSpec spec;
  spec.k_true = a.k;
  spec.n_per_cluster = a.n_per;
  spec.d = a.d;
  spec.center_spread = a.spread;
  spec.cluster_sd = a.sd;
  spec.seed = a.seed;
  auto [X, labels] = kselect::generate_blobs(spec);

  const std::string path = resolve_out(a.out_path);
  kselect::write_csv(X, path, a.with_labels ? &labels : nullptr);
  std::cout << "wrote " << X.n_rows << " rows to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k estimation toolkit: fused cluster-count estimation, baseline "
               "comparisons, and synthetic benchmark data"};
  app.require_subcommand(1);

  EstimateArgs est;
  CLI::App* cmd_est = app.add_subcommand(
      "estimate-k", "Estimate the number of clusters in a CSV dataset");
  cmd_est->add_option("input", est.input, "input CSV file, rows = samples")->required();
  cmd_est->add_option("--config", est.config_path, "JSON config file (flags win)");
  est.seed_opt = cmd_est->add_option("--seed", est.seed, "master seed")
                     ->capture_default_str();
  est.weights_opt =
      cmd_est
          ->add_option("--weights", est.weights,
                       "fusion weights: density, local structure, compactness "
                       "scan, gap")
          ->delimiter(',')
          ->capture_default_str();
  cmd_est->add_flag("--header", est.header, "skip a header row in the input");
  cmd_est->add_flag("--cluster", est.cluster,
                    "also fit k-means at the fused k and print a summary");
  cmd_est->add_flag("--json", est.as_json, "emit the full result as JSON");
  cmd_est->add_option("-o,--out", est.out_path,
                      "write output to this file instead of stdout");

  CompareArgs cmp;
  CLI::App* cmd_cmp = app.add_subcommand(
      "compare", "Run several selection methods on one dataset and report "
                 "selected k, quality and cost per method");
  cmd_cmp->add_option("input", cmp.input, "input CSV file")->required();
  cmd_cmp->add_option("--config", cmp.config_path, "JSON config file (flags win)");
  cmp.methods_opt = cmd_cmp
                        ->add_option("--methods", cmp.methods,
                                     "comma list of: proposed, wcss, dbi, "
                                     "silhouette, silhouette_condensed")
                        ->capture_default_str();
  cmp.seed_opt = cmd_cmp->add_option("--seed", cmp.seed, "master seed")
                     ->capture_default_str();
  cmp.kmin_opt = cmd_cmp->add_option("--k-min", cmp.k_min, "smallest k scanned")
                     ->capture_default_str();
  cmp.kmax_opt = cmd_cmp->add_option("--k-max", cmp.k_max, "largest k scanned")
                     ->capture_default_str();
  cmp.trials_opt = cmd_cmp->add_option("--trials", cmp.trials, "timing trials per method")
                       ->capture_default_str();
  cmp.format_opt = cmd_cmp->add_option("--format", cmp.format, "report format: csv or json")
                       ->capture_default_str();
  cmd_cmp->add_option("--id", cmp.dataset_id, "dataset id in the report (default: file name)");
  cmd_cmp->add_flag("--header", cmp.header, "skip a header row in the input");
  cmd_cmp->add_option("-o,--out", cmp.out_path,
                      "write the report to this file instead of stdout");

  BenchArgs ben;
  CLI::App* cmd_ben = app.add_subcommand(
      "bench", "Generate a Gaussian-blob dataset and compare methods on it");
  cmd_ben->add_option("--config", ben.config_path, "JSON config file (flags win)");
  ben.k_opt = cmd_ben->add_option("--k", ben.k, "true cluster count")->capture_default_str();
  ben.nper_opt = cmd_ben->add_option("--n-per", ben.n_per, "points per cluster")
                     ->capture_default_str();
  ben.d_opt = cmd_ben->add_option("--d", ben.d, "dimensions")->capture_default_str();
  ben.spread_opt = cmd_ben->add_option("--spread", ben.spread, "center box side")
                       ->capture_default_str();
  ben.sd_opt = cmd_ben->add_option("--sd", ben.sd, "cluster standard deviation")
                   ->capture_default_str();
  ben.seed_opt = cmd_ben->add_option("--seed", ben.seed, "master seed")
                     ->capture_default_str();
  ben.methods_opt = cmd_ben
                        ->add_option("--methods", ben.methods,
                                     "comma list of methods to compare")
                        ->capture_default_str();
  cmd_ben->add_option("--k-min", ben.k_min, "smallest k scanned")->capture_default_str();
  cmd_ben->add_option("--k-max", ben.k_max, "largest k scanned")->capture_default_str();
  cmd_ben->add_option("--trials", ben.trials, "timing trials per method")
      ->capture_default_str();
  ben.format_opt = cmd_ben->add_option("--format", ben.format, "report format: csv or json")
                       ->capture_default_str();
  cmd_ben->add_option("-o,--out", ben.out_path,
                      "write the report to this file instead of stdout");

  GenArgs gen;
  CLI::App* cmd_gen = app.add_subcommand(
      "gen", "Generate a Gaussian-blob dataset and write it as CSV");
  cmd_gen->add_option("--config", gen.config_path, "JSON config file (flags win)");
  gen.k_opt = cmd_gen->add_option("--k", gen.k, "true cluster count")->capture_default_str();
  gen.nper_opt = cmd_gen->add_option("--n-per", gen.n_per, "points per cluster")
                     ->capture_default_str();
  gen.d_opt = cmd_gen->add_option("--d", gen.d, "dimensions")->capture_default_str();
  gen.spread_opt = cmd_gen->add_option("--spread", gen.spread, "center box side")
                       ->capture_default_str();
  gen.sd_opt = cmd_gen->add_option("--sd", gen.sd, "cluster standard deviation")
                   ->capture_default_str();
  gen.seed_opt = cmd_gen->add_option("--seed", gen.seed, "master seed")
                     ->capture_default_str();
  cmd_gen->add_flag("--with-labels", gen.with_labels,
                    "append the true cluster label as a final integer column");
  cmd_gen->add_option("-o,--out", gen.out_path, "output CSV file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_est)) {
      const json cfg = load_config(est.config_path);
      apply_config(est.seed_opt, cfg, "seed", est.seed);
      apply_config(est.weights_opt, cfg, "weights", est.weights);
      return run_estimate(est);
    }
    if (app.got_subcommand(cmd_cmp)) {
      const json cfg = load_config(cmp.config_path);
      apply_config(cmp.seed_opt, cfg, "seed", cmp.seed);
      apply_config(cmp.methods_opt, cfg, "methods", cmp.methods);
      apply_config(cmp.format_opt, cfg, "format", cmp.format);
      apply_config(cmp.kmin_opt, cfg, "k-min", cmp.k_min);
      apply_config(cmp.kmax_opt, cfg, "k-max", cmp.k_max);
      apply_config(cmp.trials_opt, cfg, "trials", cmp.trials);
      return run_compare(cmp);
    }
    if (app.got_subcommand(cmd_ben)) {
      const json cfg = load_config(ben.config_path);
      apply_config(ben.seed_opt, cfg, "seed", ben.seed);
      apply_config(ben.methods_opt, cfg, "methods", ben.methods);
      apply_config(ben.format_opt, cfg, "format", ben.format);
      apply_config(ben.k_opt, cfg, "k", ben.k);
      apply_config(ben.nper_opt, cfg, "n-per", ben.n_per);
      apply_config(ben.d_opt, cfg, "d", ben.d);
      apply_config(ben.spread_opt, cfg, "spread", ben.spread);
      apply_config(ben.sd_opt, cfg, "sd", ben.sd);
      return run_bench(ben);
    }
    if (app.got_subcommand(cmd_gen)) {
      const json cfg = load_config(gen.config_path);
      apply_config(gen.seed_opt, cfg, "seed", gen.seed);
      apply_config(gen.k_opt, cfg, "k", gen.k);
      apply_config(gen.nper_opt, cfg, "n-per", gen.n_per);
      apply_config(gen.d_opt, cfg, "d", gen.d);
      apply_config(gen.spread_opt, cfg, "spread", gen.spread);
      apply_config(gen.sd_opt, cfg, "sd", gen.sd);
      return run_gen(gen);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
