#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdm/bd_metrics.hpp"
#include "rdm/feature_io.hpp"
#include "rdm/instance_io.hpp"
#include "rdm/machine_rd.hpp"
#include "rdm/output.hpp"
#include "rdm/task_appropriateness.hpp"
#include "rdm/theorem_suite.hpp"
#include "rdm/toy_lab.hpp"

namespace rdm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// A failed computation that is neither a usage nor an I/O problem.
struct ComputationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ordered_json num(double v) {
  if (std::isfinite(v)) return round_significant(v);
  return format_number(v);
}

// ---------------------------------------------------------------------------

struct RdCurveArgs {
  std::string instance;
  std::string approach = "full";
  std::string cut;
  std::string target;
  std::string out;
  std::string format = "csv";
  std::size_t slopes = 64;
  double slope_min = 1e-3;
  double slope_max = 1e3;
  std::size_t max_iterations = 50'000;
  double tolerance = 1e-9;
};

int rd_curve(const RdCurveArgs& a, std::ostream& out) {
  const auto instance = load_instance(a.instance);
  CodingApproach approach{parse_variant(a.approach), a.cut, a.target.empty() ? instance.task_name() : a.target};
  if (approach.variant == Variant::FullInput && !approach.cut.empty()) {
    throw std::invalid_argument("--cut is only meaningful for split and direct coding");
  }
  validate(approach, instance.model());

  RDSolverConfig config;
  config.slope_grid = RDSolverConfig::log_grid(a.slope_min, a.slope_max, a.slopes);
  config.max_iterations = a.max_iterations;
  config.convergence_tol = a.tolerance;
  config.validate();

  const auto problem = reduce(instance, approach);
  RDCurve curve;
  try {
    curve = machine_rd(instance, approach, config);
  } catch (const SweepError& e) {
    throw ComputationFailed(e.what());
  }

  ensure_directory(a.out);
  if (a.format == "csv") {
    CsvWriter csv({"slope", "rate_bits", "distortion"});
    for (const auto& p : curve.points()) {
      csv.row({format_number(p.slope), format_number(p.rate), format_number(p.distortion)});
    }
    write_file_atomic(fs::path(a.out) / "curve.csv", csv.str());
  } else {
    ordered_json rows = ordered_json::array();
    for (const auto& p : curve.points()) {
      rows.push_back({{"slope", num(p.slope)}, {"rate_bits", num(p.rate)}, {"distortion", num(p.distortion)}});
    }
    write_file_atomic(fs::path(a.out) / "curve.json", rows.dump(2) + "\n");
  }

  ordered_json meta;
  meta["instance"] = fs::path(a.instance).filename().string();
  meta["approach"] = to_string(approach.variant);
  meta["cut"] = approach.cut.empty() ? ordered_json(nullptr) : ordered_json(approach.cut);
  meta["target"] = approach.target;
  meta["label"] = curve.label();
  meta["source_alphabet"] = problem.distortion.rows();
  meta["reproduction_alphabet"] = problem.distortion.cols();
  ordered_json src = ordered_json::array();
  for (double m : problem.source.mass()) src.push_back(num(m));
  meta["source"] = src;
  ordered_json matrix = ordered_json::array();
  for (std::size_t r = 0; r < problem.distortion.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < problem.distortion.cols(); ++c) row.push_back(num(problem.distortion(r, c)));
    matrix.push_back(row);
  }
  meta["distortion"] = matrix;
  meta["d_min"] = num(d_min(problem.source, problem.distortion));
  meta["d_max"] = num(d_max(problem.source, problem.distortion));
  meta["points"] = curve.size();
  meta["solver"] = {{"slopes", a.slopes},
                    {"slope_min", num(a.slope_min)},
                    {"slope_max", num(a.slope_max)},
                    {"max_iterations", a.max_iterations},
                    {"convergence_tol", num(a.tolerance)}};
  write_file_atomic(fs::path(a.out) / "meta.json", meta.dump(2) + "\n");
  out << curve.label() << ": " << curve.size() << " points written to " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string theorem = "all";
  std::size_t seeds = 50;
  std::size_t levels = 5;
  double tolerance = kEqualityTol;
  std::uint64_t seed = 0;
  std::string out;
};

int verify_cmd(const VerifyArgs& a, std::ostream& out) {
  std::vector<std::string> ids;
  if (a.theorem == "all") {
    ids = theorem_ids();
  } else {
    require_theorem(a.theorem);
    ids.push_back(a.theorem);
  }
  if (a.seeds == 0) throw std::invalid_argument("--seeds must be at least 1");
  if (a.levels == 0) throw std::invalid_argument("--levels must be at least 1");
  if (!(a.tolerance >= 0.0)) throw std::invalid_argument("--tol must be non-negative");
  ensure_directory(a.out);
  const auto config = RDSolverConfig::defaults();
  bool all_pass = true;
  for (const auto& id : ids) {
    const auto verdict = verify(id, default_specs(id, a.seeds, a.seed), a.levels, theorem_tolerance(id, a.tolerance),
                                config);
    write_file_atomic(fs::path(a.out) / (id + ".json"), verdict_to_json(verdict));
    out << (verdict.pass ? "PASS " : "FAIL ") << id << " instances=" << verdict.instances
        << " max_violation=" << format_number(verdict.max_violation)
        << " tolerance=" << format_number(verdict.tolerance) << "\n";
    all_pass = all_pass && verdict.pass;
  }
  return all_pass ? kOk : kVerificationFailed;
}

// ---------------------------------------------------------------------------

struct TaskAppArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> names;
  std::string metric = "mse";
  std::string out;
};

int task_app(const TaskAppArgs& a, std::ostream& out) {
  if (a.inputs.empty()) throw std::invalid_argument("--inputs needs at least one file");
  if (!a.names.empty() && a.names.size() != a.inputs.size()) {
    throw std::invalid_argument("--names must give one name per input");
  }
  parse_feature_metric(a.metric);
  std::vector<std::pair<std::string, LabeledFeatureSet>> sets;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    auto name = a.names.empty() ? fs::path(a.inputs[i]).stem().string() : a.names[i];
    if (!seen.insert(name).second) throw std::invalid_argument("duplicate set name '" + name + "'");
    LabeledFeatureSet set;
    try {
      set = load_feature_set(a.inputs[i]);
    } catch (const FormatError& e) {
      throw std::invalid_argument(a.inputs[i] + ": " + e.what());
    } catch (const IoError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(a.inputs[i] + ": " + e.what());
    }
    if (!sets.empty() && set.class_count != sets.front().second.class_count) {
      throw ClassCountMismatch("class count mismatch: " + a.inputs.front() + " has " +
                               std::to_string(sets.front().second.class_count) + " classes, " + a.inputs[i] +
                               " has " + std::to_string(set.class_count));
    }
    sets.emplace_back(std::move(name), std::move(set));
  }
  const auto rows = depth_sweep(sets);
  ensure_directory(a.out);
  CsvWriter csv({"name", "rho", "monotone_vs_prev"});
  for (const auto& r : rows) {
    const std::string mono = r.monotone_vs_prev ? (*r.monotone_vs_prev ? "true" : "false") : "";
    csv.row({r.name, format_number(r.report.rho), mono});
    write_file_atomic(fs::path(a.out) / (r.name + ".json"), report_to_json(r.name, r.report));
    out << r.name << " rho=" << format_number(r.report.rho) << (mono.empty() ? "" : " monotone=" + mono) << "\n";
  }
  write_file_atomic(fs::path(a.out) / "rho.csv", csv.str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct ToyArgs {
  std::size_t n = 1'000'000;
  std::uint64_t seed = 0;
  std::string method = "analytic";
  std::string out;
  std::size_t plot_points = 5000;
  bool export_lfs = false;
};

ordered_json quantizer_json(const ToyQuantizer& q) {
  return {{"space", to_string(q.space)},
          {"boundary_u", num(q.boundary)},
          {"representatives", {{num(q.reps[0][0]), num(q.reps[0][1])}, {num(q.reps[1][0]), num(q.reps[1][1])}}}};
}

int toy(const ToyArgs& a, std::ostream& out) {
  if (a.n < 4) throw std::invalid_argument("--n must be at least 4");
  const auto method = parse_quantizer_method(a.method);
  const auto data = sample_dataset(a.n, a.seed);
  std::optional<ToyQuantizer> qx;
  std::optional<ToyQuantizer> qy;
  try {
    qx = optimal_one_bit_quantizer(ToySpace::InputX, data, method, a.seed);
    qy = optimal_one_bit_quantizer(ToySpace::LayerY, data, method, a.seed);
  } catch (const LloydNonConvergence& e) {
    throw ComputationFailed(e.what());
  }
  const auto ax = optimal_one_bit_quantizer(ToySpace::InputX, data, QuantizerMethod::AnalyticBins);
  const auto ay = optimal_one_bit_quantizer(ToySpace::LayerY, data, QuantizerMethod::AnalyticBins);

  const auto set_x = toy_feature_set(data, ToySpace::InputX);
  const auto set_y = toy_feature_set(data, ToySpace::LayerY);
  const double rho_x = compute_report(set_x).rho;
  const double rho_y = compute_report(set_y).rho;
  const double error_x = task_error(*qx, data);
  const double error_y = task_error(*qy, data);
  const double mse_x = quantizer_mse(*qx, data);
  const double mse_y = quantizer_mse(*qy, data);
  const double mse_x_analytic = quantizer_mse(ax, data);
  const double mse_y_analytic = quantizer_mse(ay, data);

  ensure_directory(a.out);
  CsvWriter csv({"u", "v", "class", "bin_x", "u_y", "v_y", "bin_y"});
  const std::size_t shown = std::min(a.plot_points, data.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& p = data[i];
    const auto y = map_g(p);
    csv.row({format_number(p.u), format_number(p.v), to_string(p.cls), std::to_string(qx->encode({p.u, p.v})),
             format_number(y[0]), format_number(y[1]), std::to_string(qy->encode(y))});
  }
  write_file_atomic(fs::path(a.out) / "points.csv", csv.str());

  ordered_json quant;
  quant["method"] = to_string(method);
  quant["X"] = quantizer_json(*qx);
  quant["Y"] = quantizer_json(*qy);
  write_file_atomic(fs::path(a.out) / "quantizer.json", quant.dump(2) + "\n");

  ordered_json summary;
  summary["n"] = a.n;
  summary["seed"] = a.seed;
  summary["method"] = to_string(method);
  summary["error_x"] = num(error_x);
  summary["error_y"] = num(error_y);
  summary["rho_x"] = num(rho_x);
  summary["rho_y"] = num(rho_y);
  summary["mse_x"] = num(mse_x);
  summary["mse_y"] = num(mse_y);
  summary["mse_x_analytic"] = num(mse_x_analytic);
  summary["mse_y_analytic"] = num(mse_y_analytic);
  summary["points_written"] = shown;
  write_file_atomic(fs::path(a.out) / "summary.json", summary.dump(2) + "\n");

  if (a.export_lfs) {
    save_lfs(fs::path(a.out) / "x.lfs", set_x);
    save_lfs(fs::path(a.out) / "y.lfs", set_y);
  }
  out << "error_x=" << format_number(error_x) << " error_y=" << format_number(error_y)
      << " rho_x=" << format_number(rho_x) << " rho_y=" << format_number(rho_y) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct BdArgs {
  std::string anchor;
  std::string test;
  std::string mode = "rate";
  std::string fit = "cubic";
  std::string rate_column = "rate";
  std::string metric_column = "metric";
};

int bd(const BdArgs& a, std::ostream& out, std::ostream& err) {
  const auto mode = parse_bd_mode(a.mode);
  const auto fit = parse_bd_fit(a.fit);
  auto load = [&](const std::string& path) {
    try {
      auto c = load_curve(path, a.rate_column, a.metric_column);
      for (const auto& w : c.warnings) err << "warning: " << path << ": " << w << "\n";
      return c.curve;
    } catch (const IoError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ": " + e.what());
    }
  };
  const auto anchor = load(a.anchor);
  const auto test = load(a.test);
  const auto result = mode == BDMode::Rate ? bd_rate(anchor, test, fit) : bd_metric(anchor, test, fit);
  out << bd_result_to_json(result);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate-distortion laboratory for coding for machines", "rdm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rdm 0.1.0");

  RdCurveArgs rc;
  auto* rc_cmd = app.add_subcommand("rd-curve", "Sweep the rate-distortion curve of one coding approach");
  rc_cmd->add_option("--instance", rc.instance, "Instance JSON file")->required();
  rc_cmd->add_option("--approach", rc.approach, "full, split or direct")->capture_default_str();
  rc_cmd->add_option("--cut", rc.cut, "Cut point (split and direct)");
  rc_cmd->add_option("--target", rc.target, "Point where distortion is measured (default: task output)");
  rc_cmd->add_option("--out", rc.out, "Output directory")->required();
  rc_cmd->add_option("--format", rc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  rc_cmd->add_option("--slopes", rc.slopes, "Number of log-spaced slopes")->capture_default_str();
  rc_cmd->add_option("--slope-min", rc.slope_min, "Smallest slope")->capture_default_str();
  rc_cmd->add_option("--slope-max", rc.slope_max, "Largest slope")->capture_default_str();
  rc_cmd->add_option("--max-iter", rc.max_iterations, "Iteration cap per slope")->capture_default_str();
  rc_cmd->add_option("--ba-tol", rc.tolerance, "Convergence tolerance (bits)")->capture_default_str();

  VerifyArgs va;
  auto* v_cmd = app.add_subcommand("verify", "Check the rate-distortion theorems on seeded random instances");
  v_cmd->add_option("--theorem", va.theorem, "Theorem id or 'all'")->capture_default_str();
  v_cmd->add_option("--seeds", va.seeds, "Instances per theorem")->capture_default_str();
  v_cmd->add_option("--levels", va.levels, "Distortion levels per instance")->capture_default_str();
  v_cmd->add_option("--tol", va.tolerance, "Tolerance of the equality checks (bits)")->capture_default_str();
  v_cmd->add_option("--seed", va.seed, "First seed")->capture_default_str();
  v_cmd->add_option("--out", va.out, "Output directory")->required();

  TaskAppArgs ta;
  auto* t_cmd = app.add_subcommand("task-app", "Task-appropriateness scores of labeled feature sets");
  t_cmd->add_option("--inputs", ta.inputs, "LFS or CSV feature files, shallow to deep")->required();
  t_cmd->add_option("--names", ta.names, "Display names, one per input");
  t_cmd->add_option("--metric", ta.metric, "Distortion metric")->capture_default_str();
  t_cmd->add_option("--out", ta.out, "Output directory")->required();

  ToyArgs ty;
  auto* y_cmd = app.add_subcommand("toy", "Squares-and-circles toy experiment");
  y_cmd->add_option("--n", ty.n, "Number of samples")->capture_default_str();
  y_cmd->add_option("--seed", ty.seed, "Sampling seed")->capture_default_str();
  y_cmd->add_option("--method", ty.method, "analytic or lloyd")->capture_default_str();
  y_cmd->add_option("--out", ty.out, "Output directory")->required();
  y_cmd->add_option("--plot-points", ty.plot_points, "Rows written to points.csv")->capture_default_str();
  y_cmd->add_flag("--export-lfs", ty.export_lfs, "Also write x.lfs and y.lfs");

  BdArgs ba;
  auto* b_cmd = app.add_subcommand("bd", "Bjontegaard-Delta difference of two rate/metric curves");
  b_cmd->add_option("--anchor", ba.anchor, "Anchor curve CSV")->required();
  b_cmd->add_option("--test", ba.test, "Test curve CSV")->required();
  b_cmd->add_option("--mode", ba.mode, "rate or metric")->capture_default_str();
  b_cmd->add_option("--fit", ba.fit, "cubic or pchip")->capture_default_str();
  b_cmd->add_option("--rate-column", ba.rate_column, "Rate column name")->capture_default_str();
  b_cmd->add_option("--metric-column", ba.metric_column, "Metric column name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "rdm 0.1.0\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  try {
    if (rc_cmd->parsed()) return rd_curve(rc, out);
    if (v_cmd->parsed()) return verify_cmd(va, out);
    if (t_cmd->parsed()) return task_app(ta, out);
    if (y_cmd->parsed()) return toy(ty, out);
    if (b_cmd->parsed()) return bd(ba, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ComputationFailed& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const NonConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace rdm::cli
