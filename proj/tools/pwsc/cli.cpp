/*
 *  Copyright 2026 The pwsc Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pwsc/certify.hpp"
#include "pwsc/errors.hpp"
#include "pwsc/examples.hpp"
#include "pwsc/filippov.hpp"
#include "pwsc/format.hpp"
#include "pwsc/qsearch.hpp"
#include "pwsc/regularize.hpp"

#ifndef PWSC_VERSION
#define PWSC_VERSION "unknown"
#endif

namespace pwsc::cli {

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string item(text.substr(pos, comma - pos));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw ConfigError("empty entry in number list '" + std::string(text) + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw ConfigError("not a finite number: '" + item + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

Vector parse_vector(std::string_view text) {
  const auto values = parse_list(text);
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

LoadedConfig resolve_config(const std::string& path) {
  if (std::filesystem::exists(path)) return load_config_file(path);
  if (const auto id = example_id_for(path)) return load_config(example_config(*id));
  throw ConfigError("config not found: " + path);
}

namespace {

using Clock = std::chrono::steady_clock;

// Output sink: a file, or the caller's stream for "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  bool is_stdout() const { return path_ == "-"; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

struct Manifest {
  Manifest(std::string cmd, std::string cfg) : command(std::move(cmd)), config(std::move(cfg)) {}

  std::string command;
  std::string config;
  std::vector<std::pair<std::string, std::string>> options;
  std::vector<std::string> outputs;
  Clock::time_point start = Clock::now();

  void option(const std::string& key, const std::string& value) { options.emplace_back(key, value); }
  void option(const std::string& key, double value) { options.emplace_back(key, format_double(value)); }

  // Written next to a file output, or to err when data went to stdout.
  void emit(const Output& data, std::ostream& err) const {
    nlohmann::ordered_json j;
    j["tool"] = "pwsc";
    j["version"] = PWSC_VERSION;
    j["command"] = command;
    j["config"] = config;
    nlohmann::ordered_json opts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : options) opts[k] = v;
    j["options"] = opts;
    j["outputs"] = outputs;
    j["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start).count();
    if (data.is_stdout()) {
      err << j.dump(2) << '\n';
    } else {
      std::ofstream f(data.path() + ".manifest.json");
      f << j.dump(2) << '\n';
    }
  }
};

Metric resolve_metric(const LoadedConfig& cfg, const std::string& q_source,
                      std::optional<double> rate) {
  const int n = cfg.system.dimension();
  std::optional<double> c = rate;
  if (!c && cfg.metric) c = cfg.metric->rate();
  if (!c) throw ConfigError("no rate given: pass --c or embed a metric in the config");
  if (q_source.empty() || q_source == "config") {
    if (cfg.metric) return Metric(cfg.metric->Q(), *c);
    if (q_source == "config") throw ConfigError("config has no embedded metric");
    return Metric::identity(n, *c);
  }
  if (q_source == "identity" || q_source == "I") return Metric::identity(n, *c);
  std::ifstream f(q_source);
  if (!f) throw ConfigError("cannot read Q file " + q_source);
  std::stringstream buf;
  buf << f.rdbuf();
  Matrix Q = parse_matrix(buf.str());
  if (Q.rows() != n || Q.cols() != n) throw ConfigError("Q has the wrong dimension");
  return Metric(std::move(Q), *c);
}

Strategy parse_strategy(const std::string& s) {
  if (s == "vertex") return Strategy::vertex;
  if (s == "grid") return Strategy::grid;
  throw ConfigError("strategy must be vertex or grid");
}

void check_x0(const PwsSystem& system, const Vector& x0) {
  if (x0.size() != system.dimension()) {
    throw ConfigError("x0 has " + std::to_string(x0.size()) + " entries, system dimension is " +
                      std::to_string(system.dimension()));
  }
}

struct CommonArgs {
  std::string config;
  std::string out = "-";
};

int do_simulate(const CommonArgs& common, const std::string& x0_text, double t_final,
                double step, std::ostream& out, std::ostream& err) {
  Manifest m{"simulate", common.config};
  const LoadedConfig cfg = resolve_config(common.config);
  const Vector x0 = parse_vector(x0_text);
  check_x0(cfg.system, x0);
  if (!(t_final >= 0.0)) throw ConfigError("--t-final must be >= 0");
  SolverOptions opts;
  opts.step = step;
  m.option("x0", x0_text);
  m.option("t_final", t_final);
  m.option("step", step);
  const Trajectory traj = integrate(cfg.system, x0, t_final, opts);
  Output o(common.out, out);
  write_trajectory_csv(o.stream(), traj);
  m.outputs.push_back(o.path());
  m.emit(o, err);
  return kExitOk;
}

int do_certify(const CommonArgs& common, const std::string& q_source, std::optional<double> rate,
               const std::string& strategy, std::optional<double> eps, std::ostream& out,
               std::ostream& err) {
  Manifest m{"certify", common.config};
  const LoadedConfig cfg = resolve_config(common.config);
  CertifyOptions opts;
  opts.strategy = parse_strategy(strategy);
  Metric metric = [&] {
    try {
      return resolve_metric(cfg, q_source, rate);
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("invalid metric: ") + e.what());
    } catch (const NumericalError& e) {
      throw ConfigError(std::string("invalid metric: ") + e.what());
    }
  }();
  m.option("Q", q_source.empty() ? "config-or-identity" : q_source);
  m.option("c", metric.rate());
  m.option("strategy", strategy);
  if (eps) m.option("eps", *eps);
  const CertificateReport report = eps ? check_regularized_certificate(cfg.system, metric, *eps, opts)
                                       : check_certificate(cfg.system, metric, opts);
  Output o(common.out, out);
  write_report_json(o.stream(), report);
  m.outputs.push_back(o.path());
  m.emit(o, err);
  err << "certificate " << (report.passed ? "PASS" : "FAIL") << " (margin "
      << format_double(report.margin()) << ")\n";
  return report.passed ? kExitOk : kExitFail;
}

int do_regularize(const CommonArgs& common, const std::string& eps_text,
                  const std::string& x0_text, double t_final, double step, std::ostream& out,
                  std::ostream& err) {
  Manifest m{"regularize", common.config};
  const LoadedConfig cfg = resolve_config(common.config);
  const Vector x0 = parse_vector(x0_text);
  check_x0(cfg.system, x0);
  const std::vector<double> eps = parse_list(eps_text);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1]))) {
      throw ConfigError("--eps must be positive and strictly decreasing");
    }
  }
  SolverOptions opts;
  opts.step = step;
  m.option("eps", eps_text);
  m.option("x0", x0_text);
  m.option("t_final", t_final);
  m.option("step", step);
  const ConvergenceTable table = convergence_study(cfg.system, x0, t_final, eps, opts);
  Output o(common.out, out);
  write_convergence_csv(o.stream(), table);
  m.outputs.push_back(o.path());
  m.emit(o, err);
  err << "fitted log-log slope " << format_double(table.fitted_slope) << ", gaps "
      << (table.strictly_decreasing() ? "strictly decreasing" : "NOT strictly decreasing")
      << '\n';
  return kExitOk;
}

int do_search(const CommonArgs& common, const SearchOptions& sopts, std::ostream& out,
              std::ostream& err) {
  Manifest m{"search-q", common.config};
  const LoadedConfig cfg = resolve_config(common.config);
  m.option("c_lo", sopts.c_lo);
  m.option("c_hi", sopts.c_hi);
  m.option("c_tol", sopts.c_tol);
  m.option("seed", std::to_string(sopts.seed));
  m.option("restarts", std::to_string(sopts.restarts));
  m.option("max_iterations", std::to_string(sopts.max_iterations));
  const auto result = search_certificate(cfg.system, sopts);
  Output o(common.out, out);
  if (!result) {
    o.stream() << "{\n  \"found\": false\n}\n";
    m.outputs.push_back(o.path());
    m.emit(o, err);
    err << "no metric found in [" << sopts.c_lo << ", " << sopts.c_hi << "]\n";
    return kExitFail;
  }
  std::ostringstream report;
  write_report_json(report, result->report);
  o.stream() << "{\n  \"found\": true,\n  \"c\": " << format_double(result->metric.rate())
             << ",\n  \"Q\": [";
  const Matrix& Q = result->metric.Q();
  for (Eigen::Index r = 0; r < Q.rows(); ++r) {
    o.stream() << (r ? ", [" : "[");
    for (Eigen::Index c = 0; c < Q.cols(); ++c) {
      o.stream() << (c ? ", " : "") << format_double(Q(r, c));
    }
    o.stream() << "]";
  }
  o.stream() << "],\n  \"trace\": [";
  for (std::size_t i = 0; i < result->trace.size(); ++i) {
    const auto& t = result->trace[i];
    o.stream() << (i ? ", " : "") << "{\"c\": " << format_double(t.c)
               << ", \"feasible\": " << (t.feasible ? "true" : "false") << "}";
  }
  o.stream() << "],\n  \"report\": " << report.str() << "}\n";
  m.outputs.push_back(o.path());
  m.emit(o, err);
  err << "found c = " << format_double(result->metric.rate()) << '\n';
  return kExitOk;
}

int do_pairwise(const CommonArgs& common, const std::string& q_source, std::optional<double> rate,
                std::size_t count, std::uint64_t seed, double t_final, double tol_decay,
                double step, std::ostream& out, std::ostream& err) {
  Manifest m{"pairwise", common.config};
  const LoadedConfig cfg = resolve_config(common.config);
  Metric metric = [&] {
    try {
      return resolve_metric(cfg, q_source, rate);
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("invalid metric: ") + e.what());
    } catch (const NumericalError& e) {
      throw ConfigError(std::string("invalid metric: ") + e.what());
    }
  }();
  PairwiseOptions opts;
  opts.tol_decay = tol_decay;
  opts.solver.step = step;
  m.option("c", metric.rate());
  m.option("pairs", std::to_string(count));
  m.option("seed", std::to_string(seed));
  m.option("t_final", t_final);
  m.option("tol_decay", tol_decay);
  const auto pairs = random_pairs(cfg.system.box(), count, seed);
  const PairwiseReport report = pairwise_contraction_test(cfg.system, metric, pairs, t_final, opts);
  Output o(common.out, out);
  write_pairwise_json(o.stream(), report);
  m.outputs.push_back(o.path());
  m.emit(o, err);
  err << "pairwise contraction " << (report.passed ? "PASS" : "FAIL") << '\n';
  return report.passed ? kExitOk : kExitFail;
}

int do_reproduce(int id, const std::string& out_dir, std::ostream& out) {
  if (id != 1 && id != 2) throw ConfigError("reproduce: example id must be 1 or 2");
  const auto checks = reproduce_example(id, out_dir);
  bool ok = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  if (!ok) {
    out << "golden mismatches:\n";
    for (const auto& c : checks) {
      if (!c.passed) out << "  - " << c.name << ": " << c.detail << '\n';
    }
  }
  return ok ? kExitOk : kExitFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Filippov simulation and contraction certificates for piecewise-smooth systems",
               "pwsc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PWSC_VERSION);

  CommonArgs common;
  std::function<int()> action;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "config file, or example1 / example2")
        ->required();
    sub->add_option("-o,--out", common.out, "output path, - for stdout")->capture_default_str();
  };

  // simulate
  std::string x0_text;
  double t_final = 20.0;
  double step = 1e-3;
  auto* sim = app.add_subcommand("simulate", "integrate a Filippov solution to CSV");
  add_common(sim);
  sim->add_option("--x0", x0_text, "initial state, comma separated")->required();
  sim->add_option("--t-final", t_final, "final time")->capture_default_str();
  sim->add_option("--step", step, "RK4 step")->capture_default_str();
  sim->callback([&] {
    action = [&] { return do_simulate(common, x0_text, t_final, step, out, err); };
  });

  // certify
  std::string q_source;
  std::optional<double> rate;
  std::string strategy = "vertex";
  std::optional<double> eps;
  auto* cert = app.add_subcommand("certify", "check the contraction conditions for (Q, c)");
  add_common(cert);
  cert->add_option("--Q", q_source, "identity, config, or a JSON matrix file");
  cert->add_option("--c", rate, "contraction rate");
  cert->add_option("--strategy", strategy, "vertex or grid")->capture_default_str();
  cert->add_option("--eps", eps, "check the regularized conditions for this band width");
  cert->callback([&] {
    action = [&] { return do_certify(common, q_source, rate, strategy, eps, out, err); };
  });

  // regularize
  std::string eps_text = "0.1,0.03,0.01,0.003,0.001";
  auto* reg = app.add_subcommand("regularize", "convergence study of the regularized solutions");
  add_common(reg);
  reg->add_option("--eps", eps_text, "strictly decreasing band widths")->capture_default_str();
  reg->add_option("--x0", x0_text, "initial state, comma separated")->required();
  reg->add_option("--t-final", t_final, "final time")->capture_default_str();
  reg->add_option("--step", step, "RK4 step")->capture_default_str();
  reg->callback([&] {
    action = [&] { return do_regularize(common, eps_text, x0_text, t_final, step, out, err); };
  });

  // search-q
  SearchOptions sopts;
  auto* search = app.add_subcommand("search-q", "search for a metric Q and the largest rate c");
  add_common(search);
  search->add_option("--c-lo", sopts.c_lo)->capture_default_str();
  search->add_option("--c-hi", sopts.c_hi)->capture_default_str();
  search->add_option("--c-tol", sopts.c_tol)->capture_default_str();
  search->add_option("--seed", sopts.seed)->capture_default_str();
  search->add_option("--restarts", sopts.restarts)->capture_default_str();
  search->add_option("--max-iter", sopts.max_iterations)->capture_default_str();
  search->callback([&] { action = [&] { return do_search(common, sopts, out, err); }; });

  // pairwise
  std::size_t pair_count = 10;
  std::uint64_t seed = 42;
  double tol_decay = 1e-2;
  double pair_t_final = 10.0;
  auto* pair = app.add_subcommand("pairwise", "empirical pairwise contraction test");
  add_common(pair);
  pair->add_option("--Q", q_source, "identity, config, or a JSON matrix file");
  pair->add_option("--c", rate, "contraction rate");
  pair->add_option("--pairs", pair_count)->capture_default_str();
  pair->add_option("--seed", seed)->capture_default_str();
  pair->add_option("--t-final", pair_t_final)->capture_default_str();
  pair->add_option("--tol-decay", tol_decay)->capture_default_str();
  pair->add_option("--step", step)->capture_default_str();
  pair->callback([&] {
    action = [&] {
      return do_pairwise(common, q_source, rate, pair_count, seed, pair_t_final, tol_decay, step,
                         out, err);
    };
  });

  // reproduce
  int example = 0;
  std::string out_dir;
  auto* repro = app.add_subcommand("reproduce", "golden checks for a bundled example");
  repro->add_option("example", example, "1 or 2")->required();
  repro->add_option("--out-dir", out_dir, "directory for trajectories and reports");
  repro->callback([&] { action = [&] { return do_reproduce(example, out_dir, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const EscapingRegionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitEscaping;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const AssumptionError& e) {
    err << "assumption violated: " << e.what() << '\n';
    return kExitFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace pwsc::cli
