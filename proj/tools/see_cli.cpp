#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "see/dataset.hpp"
#include "see/tuning.hpp"

namespace {

using namespace see;

struct FunctionalArgs {
  std::string kind = "mean";
  int moment_k = 2;
  double quantile_p = 0.5;

  FunctionalSpec build() const {
    if (kind == "mean") return FunctionalSpec::mean();
    if (kind == "moment") return FunctionalSpec::moment(moment_k);
    if (kind == "variance") return FunctionalSpec::variance();
    if (kind == "quantile") return FunctionalSpec::quantile(quantile_p);
    throw CLI::ValidationError("--functional",
                               "expected mean|moment|variance|quantile");
  }
};

void add_functional_flags(CLI::App* cmd, FunctionalArgs& args) {
  cmd->add_option("--functional", args.kind,
                  "target functional: mean|moment|variance|quantile");
  cmd->add_option("--k", args.moment_k, "moment order (moment functional)");
  cmd->add_option("--p", args.quantile_p, "quantile level in (0,1)");
}

struct DataArgs {
  std::string input;
  std::string response = "y";
  std::vector<std::string> predictors;
  std::vector<std::string> filters;  // col=value
  std::vector<long> drop_rows;       // 1-based, applied after filters

  Sample load() const {
    DatasetOptions opts;
    opts.response = response;
    opts.predictors = predictors;
    for (const auto& f : filters) {
      auto eq = f.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--filter", "expected column=value");
      opts.filters.push_back(
          DatasetFilter::equals(f.substr(0, eq), f.substr(eq + 1)));
    }
    for (long r : drop_rows) opts.filters.push_back(DatasetFilter::drop_row(r));
    return parse_dataset(input, opts);
  }
};

void add_data_flags(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--input", args.input, "input CSV with header row")
      ->required();
  cmd->add_option("--response", args.response, "response column name or index");
  cmd->add_option("--predictors", args.predictors,
                  "predictor column names (default: all other numeric columns)");
  cmd->add_option("--filter", args.filters,
                  "keep rows where column=value (repeatable, applied in order)");
  cmd->add_option("--drop-row", args.drop_rows,
                  "1-based row index to drop after filters (repeatable)");
}

struct ConfigArgs {
  SeeConfig defaults;
  double c1 = defaults.c_step1, c2 = defaults.c_step2, c3 = defaults.c_step3,
         c4 = defaults.c_step4, cq2 = defaults.c_q2,
         cdens = defaults.c_density;
  std::uint64_t seed = 0;
  int newton_steps = 1;

  SeeConfig build() const {
    SeeConfig cfg;
    cfg.c_step1 = c1;
    cfg.c_step2 = c2;
    cfg.c_step3 = c3;
    cfg.c_step4 = c4;
    cfg.c_q2 = cq2;
    cfg.c_density = cdens;
    cfg.seed = seed;
    cfg.newton_steps = newton_steps;
    return cfg;
  }
  void echo(std::ostream& os) const {
    os << "# c1=" << c1 << " c2=" << c2 << " c3=" << c3 << " c4=" << c4
       << " cq2=" << cq2 << " cdensity=" << cdens << " seed=" << seed
       << " newton_steps=" << newton_steps << "\n";
  }
};

void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--c1", args.c1, "bandwidth constant, step 1");
  cmd->add_option("--c2", args.c2,
                  "bandwidth constant, step 2 (0 = per-functional default)");
  cmd->add_option("--c3", args.c3, "bandwidth constant, step 3");
  cmd->add_option("--c4", args.c4, "bandwidth constant, step 4 smoothers");
  cmd->add_option("--cq2", args.cq2,
                  "bandwidth constant, conditional-variance smoother");
  cmd->add_option("--cdensity", args.cdens,
                  "bandwidth constant, response-axis density");
  cmd->add_option("--seed", args.seed, "RNG seed");
  cmd->add_option("--newton-steps", args.newton_steps,
                  "Newton-Raphson steps (default 1)");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

int run_estimate(const DataArgs& data, const FunctionalArgs& fn,
                 const ConfigArgs& cfg, long s, long d_hat,
                 const std::string& out_prefix) {
  Sample sample = data.load();
  FunctionalSpec spec = fn.build();
  EstimateResult result =
      see_estimate(sample.x, sample.y, spec, s, d_hat, cfg.build());

  auto basis_os = open_out(out_prefix + "_basis.csv");
  cfg.echo(basis_os);
  basis_os << "# functional=" << fn.kind << " s=" << s << " d_hat=" << d_hat
           << "\n";
  const MatrixXd& b = result.beta_hat.entries();
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      basis_os << (j ? "," : "") << b(i, j);
    basis_os << "\n";
  }

  auto pred_os = open_out(out_prefix + "_predictors.csv");
  cfg.echo(pred_os);
  MatrixXd sp = sample.x * b;
  for (Eigen::Index j = 0; j < sp.cols(); ++j)
    pred_os << (j ? "," : "") << "sp" << j + 1;
  pred_os << ",y\n";
  for (Eigen::Index i = 0; i < sp.rows(); ++i) {
    for (Eigen::Index j = 0; j < sp.cols(); ++j) pred_os << sp(i, j) << ",";
    pred_os << sample.y(i) << "\n";
  }

  auto diag_os = open_out(out_prefix + "_diagnostics.txt");
  cfg.echo(diag_os);
  const auto& d = result.diagnostics;
  diag_os << "h_step1=" << d.h_step1 << "\nh_step2=" << d.h_step2
          << "\nh_step3=" << d.h_step3 << "\nh_step4_x=" << d.h_step4_x
          << "\nh_step4_s=" << d.h_step4_s
          << "\nstep3_iterations=" << d.step3_iterations << "\n";
  for (const auto& w : d.warnings) diag_os << "warning: " << w << "\n";
  std::cout << "wrote " << out_prefix << "_{basis,predictors,diagnostics}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"T-central subspace estimation and simulation benchmarks"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate a T-central subspace");
  DataArgs est_data;
  FunctionalArgs est_fn;
  ConfigArgs est_cfg;
  long est_s = 1, est_dhat = 3;
  std::string est_out = "estimate";
  add_data_flags(est, est_data);
  add_functional_flags(est, est_fn);
  add_config_flags(est, est_cfg);
  est->add_option("--s", est_s, "target subspace dimension");
  est->add_option("--dhat", est_dhat, "working central-subspace dimension");
  est->add_option("--output", est_out, "output file prefix");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate data from a model");
  std::string sim_model = "I", sim_cov = "identity", sim_out = "sample.csv";
  long sim_n = 200;
  std::uint64_t sim_seed = 0;
  sim->add_option("--model", sim_model, "model id I..VII")->required();
  sim->add_option("--n", sim_n, "sample size");
  sim->add_option("--cov", sim_cov, "identity|ar_half");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--output", sim_out, "output CSV path");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "replicate error tables");
  std::string bench_models = "I", bench_cov = "identity",
              bench_estimator = "see", bench_out = "benchmark";
  FunctionalArgs bench_fn;
  ConfigArgs bench_cfg;
  long bench_n = 200, bench_reps = 100, bench_dhat = 3;
  bench->add_option("--models", bench_models, "comma-separated model ids")
      ->required();
  add_functional_flags(bench, bench_fn);
  add_config_flags(bench, bench_cfg);
  bench->add_option("--n", bench_n, "sample size");
  bench->add_option("--reps", bench_reps, "replicates");
  bench->add_option("--cov", bench_cov, "identity|ar_half");
  bench->add_option("--estimator", bench_estimator, "see|rmave");
  bench->add_option("--dhat", bench_dhat, "working dimension for step 1");
  bench->add_option("--output", bench_out, "output file prefix");

  // tune
  auto* tune = app.add_subcommand("tune", "cross-validate bandwidth constants");
  DataArgs tune_data;
  FunctionalArgs tune_fn;
  ConfigArgs tune_cfg;
  std::string tune_stage = "step3";
  std::vector<double> tune_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  long tune_s = 1, tune_dhat = 3;
  std::string tune_out = "tuned_c.txt";
  add_data_flags(tune, tune_data);
  add_functional_flags(tune, tune_fn);
  add_config_flags(tune, tune_cfg);
  tune->add_option("--stage", tune_stage, "step1|step2|step3|step4");
  tune->add_option("--grid", tune_grid, "candidate constants");
  tune->add_option("--s", tune_s, "target dimension");
  tune->add_option("--dhat", tune_dhat, "working dimension");
  tune->add_option("--output", tune_out, "output path");

  // bootstrap-error
  auto* boot = app.add_subcommand("bootstrap-error",
                                  "bootstrap stability of the estimator");
  DataArgs boot_data;
  FunctionalArgs boot_fn;
  ConfigArgs boot_cfg;
  long boot_b = 500, boot_s = 1, boot_dhat = 3;
  std::string boot_out = "bootstrap.csv";
  add_data_flags(boot, boot_data);
  add_functional_flags(boot, boot_fn);
  add_config_flags(boot, boot_cfg);
  boot->add_option("--B", boot_b, "bootstrap resamples (default 500)");
  boot->add_option("--s", boot_s, "target dimension");
  boot->add_option("--dhat", boot_dhat, "working dimension");
  boot->add_option("--output", boot_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (est->parsed())
      return run_estimate(est_data, est_fn, est_cfg, est_s, est_dhat, est_out);

    if (sim->parsed()) {
      ModelSpec spec{model_from_string(sim_model), sim_n,
                     sim_cov == "ar_half" ? CovarianceKind::ArHalf
                                          : CovarianceKind::Identity,
                     sim_seed};
      GeneratedModel gen = generate_model(spec);
      auto os = open_out(sim_out);
      os << "# model=" << sim_model << " n=" << sim_n << " cov=" << sim_cov
         << " seed=" << sim_seed << "\n";
      for (Eigen::Index j = 0; j < gen.sample.x.cols(); ++j)
        os << "x" << j + 1 << ",";
      os << "y\n";
      for (Eigen::Index i = 0; i < gen.sample.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < gen.sample.x.cols(); ++j)
          os << gen.sample.x(i, j) << ",";
        os << gen.sample.y(i) << "\n";
      }
      std::cout << "wrote " << sim_out << "\n";
      return 0;
    }

    if (bench->parsed()) {
      std::vector<ModelId> models;
      std::stringstream ss(bench_models);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) models.push_back(model_from_string(tok));
      BenchmarkSettings settings;
      settings.n = bench_n;
      settings.replicates = static_cast<int>(bench_reps);
      settings.covariance = bench_cov == "ar_half" ? CovarianceKind::ArHalf
                                                   : CovarianceKind::Identity;
      settings.estimator = bench_estimator == "rmave" ? EstimatorKind::RMAVE
                                                      : EstimatorKind::SEE;
      settings.d_hat = bench_dhat;
      settings.config = bench_cfg.build();
      BenchmarkReport report = run_benchmark(models, {bench_fn.build()},
                                             settings, bench_cfg.seed);
      auto csv = open_out(bench_out + ".csv");
      bench_cfg.echo(csv);
      csv << "# models=" << bench_models << " functional=" << bench_fn.kind
          << " estimator=" << bench_estimator << " n=" << bench_n
          << " reps=" << bench_reps << " cov=" << bench_cov << "\n";
      report.write_csv(csv);
      auto txt = open_out(bench_out + ".txt");
      report.write_table(txt);
      report.write_table(std::cout);
      return 0;
    }

    if (tune->parsed()) {
      Sample sample = tune_data.load();
      TuneData td{sample.x, sample.y, tune_fn.build(), tune_s, tune_dhat,
                  tune_cfg.build()};
      TuneStage stage;
      if (tune_stage == "step1") stage = TuneStage::Step1;
      else if (tune_stage == "step2") stage = TuneStage::Step2;
      else if (tune_stage == "step3") stage = TuneStage::Step3;
      else if (tune_stage == "step4") stage = TuneStage::Step4;
      else throw std::runtime_error("unknown stage: " + tune_stage);
      const double c = cross_validate_c(stage, tune_grid, td, tune_cfg.seed);
      auto os = open_out(tune_out);
      tune_cfg.echo(os);
      os << "# stage=" << tune_stage << "\nchosen_c=" << c << "\n";
      std::cout << "chosen c = " << c << "\n";
      return 0;
    }

    if (boot->parsed()) {
      Sample sample = boot_data.load();
      FunctionalSpec spec = boot_fn.build();
      SeeConfig cfg = boot_cfg.build();
      auto estimator = [&](const MatrixXd& x, const VectorXd& y) {
        return see_estimate(x, y, spec, boot_s, boot_dhat, cfg).beta_hat;
      };
      BootstrapResult result = bootstrap_error(
          estimator, sample.x, sample.y, static_cast<int>(boot_b),
          boot_cfg.seed);
      auto os = open_out(boot_out);
      boot_cfg.echo(os);
      os << "# B=" << boot_b << " skipped=" << result.skipped << "\n";
      os << "bootstrap_error," << result.error << "\n";
      os << "resample,abs_correlation\n";
      for (std::size_t i = 0; i < result.correlations.size(); ++i)
        os << i << "," << result.correlations[i] << "\n";
      std::cout << "bootstrap error = " << result.error << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
