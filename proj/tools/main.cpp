#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "pennmm/errors.hpp"
#include "pennmm/inference.hpp"
#include "pennmm/io.hpp"
#include "pennmm/selection.hpp"
#include "pennmm/simulation.hpp"
#include "pennmm/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pennmm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitInput = 2;

struct CommonOpts {
  std::string input_path;
  std::string family = "linear";
  std::string penalty = "scad";
  double lambda = 0.0;
  double scad_a = 3.7;
  double lq_q = 0.5;
  std::optional<double> epsilon;
  bool unperturbed = false;
  double tau = 1e-8;
  int max_iter = 500;
  int max_halvings = 30;
  std::string curvature = "observed";
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
};

std::uint64_t resolve_seed(const CommonOpts& o) {
  if (o.seed_given) return o.seed;
  if (const char* env = std::getenv("PENNMM_SEED")) return std::strtoull(env, nullptr, 10);
  return o.seed;
}

PenaltySpec make_penalty(const CommonOpts& o) {
  if (o.penalty == "scad") return PenaltySpec::scad(o.lambda, o.scad_a);
  if (o.penalty == "l1") return PenaltySpec::l1(o.lambda);
  if (o.penalty == "lq") return PenaltySpec::lq(o.lambda, o.lq_q);
  if (o.penalty == "hard") return PenaltySpec::hard_threshold(o.lambda);
  throw InvalidSpecError("unknown penalty '" + o.penalty + "'");
}

FitConfig make_config(const CommonOpts& o) {
  FitConfig c;
  c.tau = o.tau;
  c.max_iter = o.max_iter;
  c.max_halvings = o.max_halvings;
  c.epsilon_override = o.epsilon;
  c.lqa_drop = o.unperturbed;
  if (o.curvature == "observed")
    c.curvature = CurvatureKind::ObservedHessian;
  else if (o.curvature == "fisher")
    c.curvature = CurvatureKind::FisherInformation;
  else
    throw InvalidSpecError("unknown curvature '" + o.curvature + "'");
  return c;
}

json base_manifest(const std::string& command, const CommonOpts& o) {
  json m;
  m["command"] = command;
  m["input"] = o.input_path;
  m["family"] = o.family;
  m["penalty"] = o.penalty;
  m["lambda"] = io::format_double(o.lambda);
  m["scad_a"] = io::format_double(o.scad_a);
  m["lq_q"] = io::format_double(o.lq_q);
  m["epsilon_override"] = o.epsilon ? io::format_double(*o.epsilon) : "none";
  m["unperturbed"] = o.unperturbed;
  m["tau"] = io::format_double(o.tau);
  m["max_iter"] = o.max_iter;
  m["max_halvings"] = o.max_halvings;
  m["curvature"] = o.curvature;
  m["output_dir"] = o.output_dir;
  m["seed"] = resolve_seed(o);
  m["threads"] = o.threads;
  return m;
}

void write_manifest(const json& m, const fs::path& dir) {
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

void write_coefficients(const Dataset& data, const FitResult& fr,
                        const CovarianceReport& cov, const fs::path& dir) {
  std::ofstream out(dir / "coefficients.tsv");
  out << "name\testimate\tse\tactive\n";
  for (Eigen::Index j = 0; j < fr.beta_hat.size(); ++j) {
    out << data.column_name(j) << '\t' << io::format_double(fr.beta_hat[j]) << '\t';
    if (cov.available[static_cast<std::size_t>(j)])
      out << io::format_double(cov.se[j]);
    else
      out << "NA";
    out << '\t' << (fr.active[static_cast<std::size_t>(j)] ? 1 : 0) << '\n';
  }
}

void write_trace(const FitResult& fr, const fs::path& dir) {
  std::ofstream out(dir / "trace.tsv");
  out << "iteration\tq_eps\talpha\tgrad_max\n";
  for (std::size_t k = 0; k < fr.trace.size(); ++k) {
    out << (k + 1) << '\t' << io::format_double(fr.trace[k].q_eps) << '\t'
        << io::format_double(fr.trace[k].alpha) << '\t'
        << io::format_double(fr.trace[k].grad_max) << '\n';
  }
}

int finish_fit_outputs(const LikelihoodModel& model, const PenaltySpec& spec,
                       const FitResult& fr, json manifest, const fs::path& dir) {
  const CovarianceReport cov = sandwich_cov(model, spec, fr);
  write_coefficients(model.data(), fr, cov, dir);
  write_trace(fr, dir);
  manifest["epsilon"] = io::format_double(fr.epsilon);
  manifest["epsilon_degenerate"] = fr.epsilon_degenerate;
  manifest["derivative_cap"] = fr.derivative_cap;
  manifest["status"] = to_string(fr.status);
  manifest["iterations"] = fr.iterations;
  write_manifest(manifest, dir);
  if (fr.status != FitStatus::Converged) {
    std::cerr << "solver did not converge: " << to_string(fr.status) << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

std::vector<double> parse_grid(const std::string& grid_spec, const LikelihoodModel& model) {
  if (grid_spec.empty())
    return default_lambda_grid(model.n(), default_lambda_scale(model));
  double lo, hi;
  int count;
  if (std::sscanf(grid_spec.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 2 ||
      !(lo > 0.0) || !(hi > lo))
    throw InvalidSpecError("grid must be min:max:count with 0 < min < max");
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    grid[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / static_cast<double>(count - 1));
  return grid;
}

int cmd_fit(const CommonOpts& o) {
  const Family family = family_from_string(o.family);
  const LikelihoodModel model(family, io::read_csv(o.input_path, family));
  const PenaltySpec spec = make_penalty(o);
  const FitConfig config = make_config(o);
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);
  const FitResult fr = fit(model, spec, std::nullopt, config);
  return finish_fit_outputs(model, spec.with_epsilon(fr.epsilon), fr,
                            base_manifest("fit", o), dir);
}

int cmd_select(const CommonOpts& o, const std::string& grid_spec) {
  const Family family = family_from_string(o.family);
  const LikelihoodModel model(family, io::read_csv(o.input_path, family));
  const PenaltySpec proto = make_penalty(o);
  const FitConfig config = make_config(o);
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);

  const std::vector<double> grid = parse_grid(grid_spec, model);
  const GcvResult res = gcv_select(model, proto, grid, config);

  std::ofstream curve(dir / "gcv_curve.tsv");
  curve << "lambda\tgcv\tedf\tchosen\n";
  for (std::size_t i = 0; i < res.curve.lambdas.size(); ++i) {
    curve << io::format_double(res.curve.lambdas[i]) << '\t'
          << io::format_double(res.curve.scores[i]) << '\t'
          << io::format_double(res.curve.edf[i]) << '\t'
          << (i == res.curve.chosen ? 1 : 0) << '\n';
  }

  json manifest = base_manifest("select", o);
  manifest["grid"] = grid_spec.empty() ? "default" : grid_spec;
  manifest["chosen_lambda"] = io::format_double(res.curve.lambdas[res.curve.chosen]);
  const PenaltySpec chosen =
      proto.with_lambda(res.curve.lambdas[res.curve.chosen]).with_epsilon(res.fit.epsilon);
  return finish_fit_outputs(model, chosen, res.fit, std::move(manifest), dir);
}

int cmd_simulate(const CommonOpts& o, const std::string& example, double rho,
                 Eigen::Index n, Eigen::Index d, Eigen::Index replicates, double sigma,
                 double beta_extra, Eigen::Index mc_draws, const std::string& methods_csv,
                 const std::string& grid_spec) {
  GeneratorSpec spec;
  spec.example = example_from_string(example);
  spec.rho = rho;
  spec.n = n > 0 ? n : (family_of(spec.example) == Family::Cox ? 60 : (spec.example == ExampleKind::Linear1 ? 100 : 200));
  spec.d = d;
  spec.sigma = sigma;
  spec.beta_extra = beta_extra;
  spec.seed = resolve_seed(o);
  spec.replicates = replicates;

  ExperimentConfig config;
  config.mc_draws = mc_draws;
  config.threads = o.threads;
  config.fit = make_config(o);
  config.scad_a = o.scad_a;
  if (!methods_csv.empty()) {
    config.methods.clear();
    std::stringstream ss(methods_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) config.methods.push_back(tok);
  }
  if (!grid_spec.empty()) {
    const GeneratedData probe = generate(spec, 0);
    const LikelihoodModel model(family_of(spec.example), probe.data);
    config.lambda_grid = parse_grid(grid_spec, model);
  }

  const fs::path dir(o.output_dir);
  fs::create_directories(dir);
  const ExperimentReport report = run_experiment(spec, config);
  write_report_tsv(report, (dir / "report.tsv").string());
  write_report_sidecar(report, config, (dir / "report_sidecar.txt").string());

  json manifest = base_manifest("simulate", o);
  manifest["example"] = example;
  manifest["rho"] = io::format_double(spec.rho);
  manifest["n"] = spec.n;
  manifest["d"] = spec.d;
  manifest["replicates"] = spec.replicates;
  manifest["sigma"] = io::format_double(spec.sigma);
  manifest["beta_extra"] = io::format_double(spec.beta_extra);
  manifest["mc_draws"] = mc_draws;
  manifest["methods"] = config.methods;
  manifest["grid"] = grid_spec.empty() ? "default" : grid_spec;
  write_manifest(manifest, dir);
  return kExitOk;
}

int cmd_diagnose(const CommonOpts& o) {
  const Family family = family_from_string(o.family);
  const LikelihoodModel model(family, io::read_csv(o.input_path, family));
  const PenaltySpec spec = make_penalty(o);
  FitConfig config = make_config(o);
  config.record_iterates = true;
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);

  const FitResult fr = fit(model, spec, std::nullopt, config);
  if (fr.status != FitStatus::Converged) {
    std::cerr << "solver did not converge: " << to_string(fr.status) << '\n';
    return kExitSolver;
  }
  const Eigen::VectorXd beta_star = fr.iterates.back();  // before the zero rule
  const PenaltySpec fitted = spec.with_epsilon(fr.epsilon);
  const RateDiagnostic rd = rate_diagnostic(model, fitted, beta_star, config);

  std::ofstream out(dir / "rate.tsv");
  out << "eigenvalue\n";
  for (double ev : rd.eigenvalues) out << io::format_double(ev) << '\n';
  out << "rho\t" << io::format_double(rd.rho) << '\n';
  out << "iteration\tcontraction\n";
  const std::size_t k = fr.iterates.size();
  for (std::size_t i = 1; i + 1 < k; ++i) {
    const double num = (fr.iterates[i + 1] - beta_star).norm();
    const double den = (fr.iterates[i] - beta_star).norm();
    if (den > 0.0) out << i << '\t' << io::format_double(num / den) << '\n';
  }

  json manifest = base_manifest("diagnose", o);
  manifest["epsilon"] = io::format_double(fr.epsilon);
  manifest["rho"] = io::format_double(rd.rho);
  write_manifest(manifest, dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized likelihood variable selection via MM-Newton iterations"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string grid_spec;
  std::string example = "linear1";
  double rho = 0.5, sigma = 1.0, beta_extra = 0.2;
  Eigen::Index n = 0, d = 0, replicates = 100, mc_draws = 50000;
  std::string methods_csv;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input)
      cmd->add_option("--input", o.input_path, "input CSV path")->required();
    cmd->add_option("--family", o.family, "linear|logistic|poisson|cox");
    cmd->add_option("--penalty", o.penalty, "scad|l1|lq|hard");
    cmd->add_option("--lambda", o.lambda, "penalty strength");
    cmd->add_option("--a", o.scad_a, "SCAD shape constant (> 2)");
    cmd->add_option("--q", o.lq_q, "Lq exponent in (0,1]");
    cmd->add_option_function<double>(
        "--epsilon", [&](double v) { o.epsilon = v; },
        "perturbation override (default: data-driven rule)");
    cmd->add_flag("--unperturbed", o.unperturbed,
                  "epsilon = 0 with the drop-forever deletion rule");
    cmd->add_option("--tau", o.tau, "convergence tolerance");
    cmd->add_option("--max-iter", o.max_iter, "iteration cap");
    cmd->add_option("--max-halvings", o.max_halvings, "step-halving cap");
    cmd->add_option("--curvature", o.curvature, "observed|fisher");
    cmd->add_option("--output-dir", o.output_dir, "where outputs are written");
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&](std::uint64_t v) {
          o.seed = v;
          o.seed_given = true;
        },
        "RNG seed (falls back to PENNMM_SEED)");
    cmd->add_option("--threads", o.threads, "replicate-level parallelism");
  };

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit one penalized model from CSV");
  add_common(fit_cmd, true);

  CLI::App* select_cmd =
      app.add_subcommand("select", "GCV grid search for lambda, then fit");
  add_common(select_cmd, true);
  select_cmd->add_option("--grid", grid_spec, "lambda grid min:max:count (log-spaced)");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "run a named Monte Carlo study");
  add_common(sim_cmd, false);
  sim_cmd->add_option("--example", example, "linear1|logistic2|cox3|cox-misspec")
      ->required();
  sim_cmd->add_option("--rho", rho, "covariate correlation");
  sim_cmd->add_option("--n", n, "sample size (0 = example default)");
  sim_cmd->add_option("--d", d, "covariate count (0 = example default)");
  sim_cmd->add_option("--replicates", replicates, "Monte Carlo replicates");
  sim_cmd->add_option("--sigma", sigma, "linear noise standard deviation");
  sim_cmd->add_option("--beta-extra", beta_extra, "misspecified-Cox tail coefficient");
  sim_cmd->add_option("--mc-draws", mc_draws, "model-error Monte Carlo draws");
  sim_cmd->add_option("--methods", methods_csv, "comma list from New,LQA,AIC,BIC,Oracle");
  sim_cmd->add_option("--grid", grid_spec, "lambda grid min:max:count (log-spaced)");

  CLI::App* diag_cmd =
      app.add_subcommand("diagnose", "fit, then report the local convergence rate");
  add_common(diag_cmd, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) return cmd_fit(o);
    if (select_cmd->parsed()) return cmd_select(o, grid_spec);
    if (sim_cmd->parsed())
      return cmd_simulate(o, example, rho, n, d, replicates, sigma, beta_extra, mc_draws,
                          methods_csv, grid_spec);
    if (diag_cmd->parsed()) return cmd_diagnose(o);
  } catch (const CsvError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidSpecError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}
