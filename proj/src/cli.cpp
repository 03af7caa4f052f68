#include "cvxreg/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>

#include "cvxreg/convexity.hpp"
#include "cvxreg/data_io.hpp"
#include "cvxreg/error.hpp"
#include "cvxreg/json_io.hpp"
#include "cvxreg/loss.hpp"
#include "cvxreg/solver.hpp"

namespace cvxreg {

using nlohmann::json;

namespace {

struct BadFlag : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string path;
  bool no_header = false;
  bool no_bias = false;
  bool standardize = false;
  std::string target_column;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", path, "CSV file (target in the last column by default)")->required();
    cmd->add_flag("--no-header", no_header, "First line is data, not a header");
    cmd->add_flag("--no-bias", no_bias, "Do not append a constant 1.0 feature");
    cmd->add_flag("--standardize", standardize, "Scale features to mean 0, variance 1");
    cmd->add_option("--target-column", target_column, "Target column name or zero-based index");
  }

  DatasetSpec spec() const {
    DatasetSpec s;
    s.source = std::filesystem::path(path);
    s.has_header = !no_header;
    s.add_bias = !no_bias;
    s.standardize = standardize;
    if (!target_column.empty()) {
      if (target_column.find_first_not_of("0123456789") == std::string::npos)
        s.target_column = std::stoi(target_column);
      else
        s.target_column = target_column;
    }
    return s;
  }

  json echo() const {
    return {{"data", path},
            {"has_header", !no_header},
            {"add_bias", !no_bias},
            {"standardize", standardize},
            {"target_column", target_column.empty() ? json(nullptr) : json(target_column)}};
  }
};

struct SolverOptions {
  std::uint64_t seed = 0;
  int max_iters = 10000;
  double grad_tol = 1e-8;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for restart initialization");
    cmd->add_option("--max-iters", max_iters, "Gradient descent iteration limit");
    cmd->add_option("--grad-tol", grad_tol, "Relative gradient-norm stopping tolerance");
  }

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = max_iters;
    cfg.grad_tol = grad_tol;
    if (max_iters < 1) throw BadFlag("--max-iters must be a positive integer");
    if (!(grad_tol > 0.0) || !std::isfinite(grad_tol)) throw BadFlag("--grad-tol must be > 0");
    return cfg;
  }
};

json echo(const SolverConfig& cfg) {
  return {{"seed", cfg.seed},
          {"max_iters", cfg.max_iters},
          {"grad_tol", cfg.grad_tol},
          {"armijo_c", cfg.armijo_c},
          {"backtrack_factor", cfg.backtrack_factor},
          {"init_step", cfg.init_step}};
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw BadFlag("--alpha must be > 0");
}

// nullopt means "auto".
std::optional<double> parse_y_bound(const std::string& text, bool allow_auto) {
  if (allow_auto && text == "auto") return std::nullopt;
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw BadFlag(std::string("--y-bound must be ") + (allow_auto ? "'auto' or " : "") +
                  "a positive number, got '" + text + "'");
  }
  if (!(v > 0.0) || !std::isfinite(v)) throw BadFlag("--y-bound must be > 0");
  return v;
}

// Y doubles as the tanh output scale; affine is the identity map.
TransformKind make_transform(const std::string& kind, double alpha, double y_bound) {
  if (kind == "convex-sqrt") return ConvexSqrtTransform(alpha, y_bound);
  if (kind == "affine") return AffineTransform(1.0, 0.0);
  return TanhTransform(y_bound);
}

json envelope(const std::string& command, json config, json results,
              std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return {{"command", command},
          {"config_echo", std::move(config)},
          {"results", std::move(results)},
          {"wall_time_ms", elapsed.count()},
          {"version", kVersion}};
}

std::vector<FitReport> run_fits(const Dataset& ds, const TransformKind& t, int restarts,
                                const SolverConfig& cfg) {
  if (restarts == 1) return {gd_fit(ds, t, Vector::Zero(ds.n_features()), cfg)};
  return multi_restart_fit(ds, t, restarts, cfg);
}

const std::vector<std::string> kTransformNames{"convex-sqrt", "affine", "tanh"};

// ---------------------------------------------------------------------------

struct FitCommand {
  DataOptions data;
  SolverOptions solver;
  std::string transform = "convex-sqrt";
  double alpha = 1.0;
  std::string y_bound = "auto";
  int restarts = 1;
  std::string out_path;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    solver.attach(cmd);
    cmd->add_option("--transform", transform)->check(CLI::IsMember(kTransformNames));
    cmd->add_option("--alpha", alpha, "Curvature rate of convex-sqrt (> 0)");
    cmd->add_option("--y-bound", y_bound, "Target bound Y: 'auto' (max |y|) or a number");
    cmd->add_option("--restarts", restarts, "Independent random restarts");
    cmd->add_option("--out", out_path, "Write the fitted model JSON here");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = std::chrono::steady_clock::now();
    require_alpha(alpha);
    const auto fixed_bound = parse_y_bound(y_bound, true);
    if (restarts < 1) throw BadFlag("--restarts must be >= 1");
    const SolverConfig cfg = solver.config();

    LoadedDataset loaded = load_dataset(data.spec());
    const Dataset& ds = loaded.dataset;
    const double bound = fixed_bound ? *fixed_bound : estimate_target_bound(ds, 1.0);
    const TransformKind t = make_transform(transform, alpha, bound);

    json warnings = json::array();
    const std::size_t outside = targets_outside_bound(t, ds);
    if (outside > 0) {
      const std::string msg = std::to_string(outside) + " target(s) exceed |y| <= Y = " +
                              format_double(bound) +
                              "; the convexity guarantee does not apply to this fit";
      warnings.push_back(msg);
      err << "warning: " << msg << '\n';
    }

    const std::vector<FitReport> fits = run_fits(ds, t, restarts, cfg);
    const std::size_t best = best_report(fits);

    if (!out_path.empty()) write_model({Model{fits[best].final_weights, t}, loaded.preprocessing}, out_path);

    json config = data.echo();
    config.update(echo(cfg));
    config["transform"] = to_json(t);
    config["alpha"] = alpha;
    config["y_bound"] = bound;
    config["y_bound_mode"] = fixed_bound ? "fixed" : "auto";
    config["restarts"] = restarts;
    config["out"] = out_path.empty() ? json(nullptr) : json(out_path);

    json fit_json = json::array();
    for (const auto& f : fits) fit_json.push_back(to_json(f));
    json results = {{"n_samples", ds.n_samples()},
                    {"n_features", ds.n_features()},
                    {"fits", fit_json},
                    {"best_restart", best},
                    {"final_loss", fits[best].final_loss},
                    {"converged", fits[best].converged()},
                    {"targets_outside_bound", outside},
                    {"warnings", warnings}};
    if (restarts > 1) results["relative_loss_spread"] = relative_loss_spread(fits);

    out << envelope("fit", std::move(config), std::move(results), start).dump(2) << '\n';
    if (!fits[best].converged()) {
      err << "fit did not converge (" << to_string(fits[best].termination) << ")\n";
      return kExitNotConverged;
    }
    return kExitOk;
  }
};

struct PredictCommand {
  std::string model_path;
  std::string data_path;
  bool no_header = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model_path, "Model JSON written by `fit --out`")->required();
    cmd->add_option("--data", data_path, "CSV of feature rows")->required();
    cmd->add_flag("--no-header", no_header, "First line is data, not a header");
  }

  int run(std::ostream& out, std::ostream&) const {
    const ModelFile mf = read_model(model_path);
    const CsvTable table = read_csv_table(data_path, !no_header);

    std::optional<std::size_t> skip;
    if (mf.preprocessing.target_name) {
      for (std::size_t c = 0; c < table.header.size(); ++c)
        if (table.header[c] == *mf.preprocessing.target_name) skip = c;
    }
    const std::size_t width = table.rows.front().size() - (skip ? 1 : 0);
    Matrix raw(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      Eigen::Index j = 0;
      for (std::size_t c = 0; c < table.rows[i].size(); ++c)
        if (!skip || c != *skip) raw(static_cast<Eigen::Index>(i), j++) = table.rows[i][c];
    }
    const Matrix features = mf.preprocessing.apply(raw);
    if (features.cols() != mf.model.weights.size())
      throw Error(ErrorKind::dimension_mismatch,
                  "model expects " + std::to_string(mf.model.weights.size()) +
                      " features but data provides " + std::to_string(features.cols()));
    for (Eigen::Index n = 0; n < features.rows(); ++n)
      out << format_double(mf.model.predict(features.row(n).transpose())) << '\n';
    return kExitOk;
  }
};

struct VerifyCommand {
  std::string transform = "convex-sqrt";
  double alpha = 1.0;
  std::string y_bound = "1";
  long long samples = 10000;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--transform", transform)->check(CLI::IsMember(kTransformNames));
    cmd->add_option("--alpha", alpha, "Curvature rate of convex-sqrt (> 0)");
    cmd->add_option("--y-bound", y_bound, "Target bound Y (tanh: output scale)");
    cmd->add_option("--samples", samples, "Random triples per midpoint check");
    cmd->add_option("--seed", seed);
  }

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = std::chrono::steady_clock::now();
    require_alpha(alpha);
    const double bound = *parse_y_bound(y_bound, false);
    if (samples < 1) throw BadFlag("--samples must be positive");
    const TransformKind t = make_transform(transform, alpha, bound);

    const std::vector<ConvexityReport> checks = verification_battery(t, bound, samples, seed);
    bool all_passed = true;
    json check_json = json::array();
    for (const auto& c : checks) {
      all_passed = all_passed && c.passed;
      check_json.push_back(to_json(c));
      if (!c.passed) err << "FAILED " << c.summary() << '\n';
    }

    json results = {{"checks", check_json}};
    if (const auto* g = std::get_if<ConvexSqrtTransform>(&t)) {
      std::vector<double> grid = graded_grid(50.0, 500);
      grid.erase(grid.begin(), grid.begin() + 500);  // keep 0 and the positive side
      const ConditionReport remark = check_remark_conditions(
          [g](double s) { return std::copysign(g->h(std::fabs(s)), s == 0.0 ? 1.0 : s); },
          [g](double s) { return g->h_derivative(std::fabs(s)); }, g->alpha(), g->y_bound(),
          g->gamma(), grid, 1e-12);
      all_passed = all_passed && remark.all_passed();
      results["remark_conditions"] = to_json(remark);
    }
    results["all_passed"] = all_passed;

    const json config = {{"transform", to_json(t)},
                         {"alpha", alpha},
                         {"y_bound", bound},
                         {"samples", samples},
                         {"seed", seed}};
    out << envelope("verify", config, std::move(results), start).dump(2) << '\n';
    return all_passed ? kExitOk : kExitCheckFailed;
  }
};

struct CompareCommand {
  DataOptions data;
  SolverOptions solver;
  double alpha = 1.0;
  std::string y_bound = "auto";
  int restarts = 20;

  static constexpr double kSpreadTolerance = 1e-6;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    solver.attach(cmd);
    cmd->add_option("--alpha", alpha, "Curvature rate of convex-sqrt (> 0)");
    cmd->add_option("--y-bound", y_bound, "Target bound Y: 'auto' or a number");
    cmd->add_option("--restarts", restarts, "Restarts per transform (>= 10)");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = std::chrono::steady_clock::now();
    require_alpha(alpha);
    const auto fixed_bound = parse_y_bound(y_bound, true);
    if (restarts < 10) throw BadFlag("--restarts must be >= 10 for compare");
    const SolverConfig cfg = solver.config();

    const LoadedDataset loaded = load_dataset(data.spec());
    const Dataset& ds = loaded.dataset;
    const double bound = fixed_bound ? *fixed_bound : estimate_target_bound(ds, 1.0);

    json rows = json::array();
    bool convex_ok = false;
    bool convex_converged = true;
    double convex_spread = 0.0;
    double tanh_spread = 0.0;
    for (const std::string kind : {"convex-sqrt", "tanh"}) {
      const TransformKind t = make_transform(kind, alpha, bound);
      const std::vector<FitReport> fits = multi_restart_fit(ds, t, restarts, cfg);
      std::vector<double> losses;
      std::vector<int> iterations;
      std::vector<std::string> terminations;
      int converged = 0;
      for (const auto& f : fits) {
        losses.push_back(f.final_loss);
        iterations.push_back(f.iterations);
        terminations.emplace_back(to_string(f.termination));
        converged += f.converged() ? 1 : 0;
      }
      const double spread = relative_loss_spread(fits);
      rows.push_back({{"transform", to_json(t)},
                      {"final_losses", losses},
                      {"iterations", iterations},
                      {"terminations", terminations},
                      {"min_loss", *std::min_element(losses.begin(), losses.end())},
                      {"max_loss", *std::max_element(losses.begin(), losses.end())},
                      {"relative_spread", spread},
                      {"converged_count", converged}});
      if (kind == "convex-sqrt") {
        convex_spread = spread;
        convex_ok = spread <= kSpreadTolerance;
        convex_converged = fits[best_report(fits)].converged();
      } else {
        tanh_spread = spread;
      }
    }

    json config = data.echo();
    config.update(echo(cfg));
    config["alpha"] = alpha;
    config["y_bound"] = bound;
    config["y_bound_mode"] = fixed_bound ? "fixed" : "auto";
    config["restarts"] = restarts;

    json results = {{"n_samples", ds.n_samples()},
                    {"n_features", ds.n_features()},
                    {"transforms", rows},
                    {"spread_tolerance", kSpreadTolerance},
                    {"convex_spread", convex_spread},
                    {"tanh_spread", tanh_spread},
                    {"convex_spread_within_tolerance", convex_ok}};
    out << envelope("compare", std::move(config), std::move(results), start).dump(2) << '\n';
    if (!convex_converged) {
      err << "best convex-sqrt restart did not converge\n";
      return kExitNotConverged;
    }
    return kExitOk;
  }
};

struct SynthCommand {
  int n = 100;
  int d = 3;
  double noise = 0.0;
  std::string transform = "convex-sqrt";
  double alpha = 1.0;
  std::string y_bound = "1";
  std::uint64_t seed = 0;
  std::string out_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n", n, "Number of samples")->required();
    cmd->add_option("--d", d, "Number of features")->required();
    cmd->add_option("--noise", noise, "Std-dev of noise added to w.x before the transform");
    cmd->add_option("--transform", transform)->check(CLI::IsMember(kTransformNames));
    cmd->add_option("--alpha", alpha, "Curvature rate of convex-sqrt (> 0)");
    cmd->add_option("--y-bound", y_bound, "Y of convex-sqrt / scale of tanh");
    cmd->add_option("--seed", seed);
    cmd->add_option("--out", out_path, "CSV path; true weights go to <stem>.weights.json")
        ->required();
  }

  int run(std::ostream& out, std::ostream&) const {
    const auto start = std::chrono::steady_clock::now();
    if (n < 1) throw BadFlag("--n must be >= 1");
    if (d < 1) throw BadFlag("--d must be >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw BadFlag("--noise must be >= 0");
    require_alpha(alpha);
    const double bound = *parse_y_bound(y_bound, false);

    SynthSpec spec;
    spec.n_samples = n;
    spec.n_features = d;
    spec.noise_std = noise;
    spec.transform = make_transform(transform, alpha, bound);
    spec.seed = seed;
    const SyntheticData data = generate_synthetic(spec);

    const std::filesystem::path csv(out_path);
    std::filesystem::path weights_path = csv;
    weights_path.replace_extension(".weights.json");
    write_csv(data.dataset, csv);
    const json companion = {{"true_weights", data.true_weights},
                            {"transform", to_json(spec.transform)},
                            {"noise_std", noise},
                            {"seed", seed}};
    std::ofstream wf(weights_path);
    if (!wf) throw Error(ErrorKind::io, "cannot write '" + weights_path.string() + "'");
    wf << companion.dump(2) << '\n';

    const json config = {{"n", n},           {"d", d},       {"noise", noise},
                         {"transform", to_json(spec.transform)},
                         {"alpha", alpha},   {"y_bound", bound},
                         {"seed", seed},     {"out", out_path}};
    const json results = {{"csv", csv.string()},
                          {"weights_file", weights_path.string()},
                          {"true_weights", data.true_weights},
                          {"n_samples", n},
                          {"n_features", d}};
    out << envelope("synth", config, results, start).dump(2) << '\n';
    return kExitOk;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convex nonlinear least-squares regression toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FitCommand fit;
  PredictCommand predict;
  VerifyCommand verify;
  CompareCommand compare;
  SynthCommand synth;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a model by gradient descent");
  CLI::App* predict_cmd = app.add_subcommand("predict", "Predict g(w.x) for each data row");
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the convexity checks for a transform");
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Contrast restart dispersion of convex-sqrt and tanh");
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic regression dataset");
  fit.attach(fit_cmd);
  predict.attach(predict_cmd);
  verify.attach(verify_cmd);
  compare.attach(compare_cmd);
  synth.attach(synth_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitBadFlags;
  }

  try {
    if (fit_cmd->parsed()) return fit.run(out, err);
    if (predict_cmd->parsed()) return predict.run(out, err);
    if (verify_cmd->parsed()) return verify.run(out, err);
    if (compare_cmd->parsed()) return compare.run(out, err);
    return synth.run(out, err);
  } catch (const BadFlag& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadFlags;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace cvxreg
