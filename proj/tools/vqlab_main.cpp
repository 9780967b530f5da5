#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqlab/conditions.hpp"
#include "vqlab/config.hpp"
#include "vqlab/erm.hpp"
#include "vqlab/hessian.hpp"
#include "vqlab/ratelab.hpp"

namespace {

using nlohmann::json;
using namespace vqlab;

enum ExitCode { kOk = 0, kRuntime = 1, kConfig = 2, kCertification = 3 };

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error("cannot create output directory '" + dir + "'");
}

std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

// JSON documents are prefixed by a "metadata" object instead of comment lines.
json with_metadata(json body, const std::string& hash, std::uint64_t seed) {
  body["metadata"] = {{"vqlab_version", kVersion}, {"config_hash", hash}, {"seed", seed}};
  return body;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

OptimalSet certified_optimum(const SourceDistribution& dist, std::size_t k) {
  return optimal_clusters(dist, k);
}

ClusterVector parse_codebook(const std::string& text, std::size_t dim) {
  // "x1,y1;x2,y2" or "0.25 0.75": rows split on ';' or whitespace.
  std::string spaced = text;
  std::replace(spaced.begin(), spaced.end(), ';', ' ');
  std::vector<double> coords;
  std::stringstream rows(spaced);
  std::string row;
  while (rows >> row) {
    std::stringstream cols(row);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(cols, cell, ',')) {
      try {
        std::size_t used = 0;
        coords.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw ConfigError("bad number '" + cell + "' in codebook");
      } catch (const std::logic_error&) {
        throw ConfigError("bad number '" + cell + "' in codebook");
      }
      ++count;
    }
    if (count != dim) throw ConfigError("codebook rows must have the distribution's dimension");
  }
  if (coords.empty()) throw ConfigError("empty codebook");
  return ClusterVector(dim, std::move(coords));
}

int cmd_rates(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out,
              std::size_t threads) {
  RunConfig cfg = load_config(config_path);
  if (seed) cfg.experiment.master_seed = *seed;
  const OptimalSet opt = certified_optimum(cfg.distribution, cfg.experiment.k);
  ensure_dir(out);
  RateTable table = run_rate_experiment(cfg.experiment, cfg.distribution, opt, threads);
  table.config_hash = cfg.hash;
  const std::uint64_t s = cfg.experiment.master_seed;
  const std::string header = metadata_header(cfg.hash, s);
  write_text(join(out, "rates.csv"), header + rates_csv(table));
  write_text(join(out, "plot.csv"), header + plot_csv(table));
  json fit_json;
  try {
    fit_json = to_json(fit_loglog_slope(table));
  } catch (const PreconditionError& e) {
    fit_json = {{"error", e.what()}};
  }
  const OptimizerConfig& o = cfg.experiment.optimizer;
  const json optimizer = o.kind == OptimizerKind::kExact1d
                             ? json{{"kind", "exact_1d"}}
                             : json{{"kind", "multistart"}, {"restarts", o.restarts}};
  write_text(join(out, "fit.json"),
             dump(with_metadata({{"fit", fit_json}, {"table", to_json(table)}, {"optimizer", optimizer}}, cfg.hash, s)));
  std::cout << rates_csv(table);
  if (fit_json.contains("slope")) {
    std::cout << "slope " << format_double(fit_json["slope"].get<double>()) << '\n';
  }
  return kOk;
}

void print_report(const ConditionReport& r) {
  std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": lhs " << format_double(r.lhs) << " rhs "
            << format_double(r.rhs) << '\n';
  for (const auto& [key, value] : r.quantities) std::cout << "  " << key << " = " << format_double(value) << '\n';
  for (const std::string& note : r.notes) std::cout << "  note: " << note << '\n';
}

int cmd_conditions(const std::string& config_path, const std::string& out) {
  const RunConfig cfg = load_config(config_path);
  const SourceDistribution& dist = cfg.distribution;
  if (!dist.has_density()) {
    throw PreconditionError("the boundary density bound needs a distribution with a density");
  }
  const OptimalSet opt = certified_optimum(dist, cfg.experiment.k);
  std::vector<ConditionReport> reports;
  reports.push_back(check_boundary_density_bound(dist, opt));
  if (std::holds_alternative<BallMixture>(dist.variant())) {
    reports.push_back(check_ball_separation(dist));
  } else if (std::holds_alternative<QuasiGaussianMixture>(dist.variant())) {
    reports.push_back(check_mixture_polarization(dist));
    reports.push_back(verify_mean_proximity(dist, opt));
  }
  json arr = json::array();
  for (const ConditionReport& r : reports) {
    print_report(r);
    arr.push_back(to_json(r));
  }
  const json doc = with_metadata({{"reports", arr}, {"optimal_risk", opt.risk}}, cfg.hash, 0);
  if (!out.empty()) {
    ensure_dir(out);
    write_text(join(out, "conditions.json"), dump(doc));
  }
  return kOk;
}

int cmd_hessian(const std::string& config_path, const std::string& at, const std::string& codebook_text,
                const std::string& out) {
  const RunConfig cfg = load_config(config_path);
  const SourceDistribution& dist = cfg.distribution;
  std::vector<ClusterVector> points;
  if (at == "optimal") {
    for (const ClusterVector& c : certified_optimum(dist, cfg.experiment.k).members) points.push_back(c);
  } else {
    if (!codebook_text.empty()) {
      points.push_back(parse_codebook(codebook_text, dist.dim()));
    } else if (cfg.codebook) {
      points.push_back(*cfg.codebook);
    } else {
      throw ConfigError("--at explicit needs --codebook or a 'codebook' entry in the configuration");
    }
  }
  json members = json::array();
  std::string csv;
  bool all_pd = true;
  for (std::size_t m = 0; m < points.size(); ++m) {
    const ClusterVector& c = points[m];
    require_distinct(c);
    const HessianMatrix h = analytic_hessian(c, dist);
    const HessianMatrix fd = finite_difference_hessian(c, dist);
    const DefinitenessVerdict verdict = is_positive_definite(h);
    const double deviation = h.max_abs_difference(fd);
    all_pd = all_pd && verdict.positive_definite;
    json centers = json::array();
    for (std::size_t i = 0; i < c.k(); ++i) {
      json row = json::array();
      for (double x : c[i]) row.push_back(x);
      centers.push_back(row);
    }
    members.push_back({{"codebook", centers},
                       {"verdict", to_json(verdict)},
                       {"finite_difference_deviation", deviation},
                       {"matrix_csv", to_csv(h)}});
    csv += "# member " + std::to_string(m) + '\n' + to_csv(h);
    std::cout << "member " << m << ": lambda_min " << format_double(verdict.min_eigenvalue)
              << (verdict.positive_definite ? " positive definite" : " not positive definite")
              << ", finite-difference deviation " << format_double(deviation) << '\n'
              << to_csv(h);
  }
  if (!out.empty()) {
    ensure_dir(out);
    write_text(join(out, "hessian.csv"), metadata_header(cfg.hash, 0) + csv);
    write_text(join(out, "hessian.json"),
               dump(with_metadata({{"at", at}, {"members", members}, {"all_positive_definite", all_pd}},
                                  cfg.hash, 0)));
  }
  return kOk;
}

int cmd_counterexample(const std::vector<double>& n_list, const std::string& out) {
  const Trajectory t = counterexample_trajectory(n_list);
  json n_json = n_list;
  const std::string hash = config_hash(n_json);
  std::ostringstream meta;
  meta << metadata_header(hash, 0) << "# optimum: ";
  for (std::size_t i = 0; i < t.optimum.k(); ++i) meta << (i ? " " : "") << format_double(t.optimum[i][0]);
  meta << "\n# optimal_risk: " << format_double(t.optimal_risk) << "\n# optimum_gradient_inf: "
       << format_double(t.optimum_gradient) << "\n# second_moment: " << format_double(t.second_moment)
       << "\n# risk_limit: second_moment; loss_limit: second_moment - optimal_risk\n";
  const std::string text = meta.str() + trajectory_csv(t);
  if (!out.empty()) {
    ensure_dir(out);
    write_text(join(out, "counterexample.csv"), text);
  }
  std::cout << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast-rate experiments for empirical k-means quantization"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t threads = 1;
  std::uint64_t seed_value = 0;

  auto* rates = app.add_subcommand("rates", "Monte Carlo excess-risk table and log-log slope");
  rates->add_option("config", config_path, "configuration JSON")->required();
  auto* seed_opt = rates->add_option("--seed", seed_value, "master seed (overrides the configuration)");
  rates->add_option("--out", out_dir, "output directory")->required();
  rates->add_option("--threads", threads, "worker threads (results do not depend on it)");

  auto* conditions = app.add_subcommand("conditions", "Evaluate the sufficient conditions for the configured law");
  conditions->add_option("config", config_path, "configuration JSON")->required();
  conditions->add_option("--out", out_dir, "output directory for conditions.json");

  std::string at = "optimal";
  std::string codebook_text;
  auto* hessian = app.add_subcommand("hessian", "Hessian of the risk, definiteness and finite-difference check");
  hessian->add_option("config", config_path, "configuration JSON")->required();
  hessian->add_option("--at", at, "optimal or explicit")->check(CLI::IsMember({"optimal", "explicit"}));
  hessian->add_option("--codebook", codebook_text, "explicit codebook, rows separated by ';' or spaces, coordinates by ','");
  hessian->add_option("--out", out_dir, "output directory");

  std::vector<double> n_list{22, 50, 100, 200, 1000, 10000};
  auto* counter = app.add_subcommand("counterexample", "Risk and distance along (0, n, n^2) for the tail law");
  counter->add_option("--n-list", n_list, "values of n (each >= 22)")->delimiter(',');
  counter->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*rates) {
      std::optional<std::uint64_t> seed;
      if (*seed_opt) seed = seed_value;
      return cmd_rates(config_path, seed, out_dir, threads);
    }
    if (*conditions) return cmd_conditions(config_path, out_dir);
    if (*hessian) return cmd_hessian(config_path, at, codebook_text, out_dir);
    if (*counter) return cmd_counterexample(n_list, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << '\n';
    return kCertification;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failure: " << e.what() << '\n';
    return kCertification;
  } catch (const GeometryError& e) {
    std::cerr << "precondition failure: " << e.what() << '\n';
    return kCertification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
