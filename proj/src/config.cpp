#include "vqlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vqlab {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string(where) + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

double get_number(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ConfigError(std::string(where) + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, const char* key, const char* where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_unsigned()) {
    throw ConfigError(std::string(where) + ": '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> get_numbers(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(std::string(what) + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> get_points(const json& v, const char* what, std::size_t& dim) {
  if (!v.is_array() || v.empty()) throw ConfigError(std::string(what) + " must be a non-empty array");
  std::vector<double> coords;
  dim = 0;
  for (const json& p : v) {
    std::vector<double> row = p.is_number() ? std::vector<double>{p.get<double>()} : get_numbers(p, what);
    if (dim == 0) dim = row.size();
    if (row.empty() || row.size() != dim) throw ConfigError(std::string(what) + ": ragged points");
    coords.insert(coords.end(), row.begin(), row.end());
  }
  return coords;
}

PointSet get_point_set(const json& v, const char* what) {
  std::size_t dim = 0;
  std::vector<double> coords = get_points(v, what, dim);
  return PointSet(dim, std::move(coords));
}

json points_to_json(const detail::PointArray& pts) {
  json arr = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    json row = json::array();
    for (double x : pts[i]) row.push_back(x);
    arr.push_back(row);
  }
  return arr;
}

std::size_t default_k(const SourceDistribution& dist) {
  return dist.component_centers().size();
}

ExperimentConfig parse_experiment(const json& doc, const SourceDistribution& dist) {
  ExperimentConfig cfg;
  cfg.k = default_k(dist);
  cfg.n_grid = {32, 64, 128, 256};
  if (doc.contains("experiment")) {
    const json& e = doc.at("experiment");
    if (!e.is_object()) throw ConfigError("experiment must be an object");
    if (e.contains("k")) cfg.k = get_count(e, "k", "experiment");
    if (e.contains("n_grid")) {
      const json& g = e.at("n_grid");
      cfg.n_grid.clear();
      if (g.is_object()) {
        cfg.n_grid = geometric_grid(get_count(g, "start", "n_grid"), get_count(g, "stop", "n_grid"),
                                    get_count(g, "factor", "n_grid"));
      } else if (g.is_array()) {
        for (const json& n : g) {
          if (!n.is_number_unsigned()) throw ConfigError("n_grid entries must be positive integers");
          cfg.n_grid.push_back(n.get<std::size_t>());
        }
      } else {
        throw ConfigError("n_grid must be an array or {start, stop, factor}");
      }
    }
    if (e.contains("replicates")) cfg.replicates = get_count(e, "replicates", "experiment");
    if (e.contains("seed")) cfg.master_seed = get_count(e, "seed", "experiment");
  }
  if (doc.contains("optimizer")) {
    const json& o = doc.at("optimizer");
    const json& kind = require(o, "kind", "optimizer");
    if (kind == "exact_1d") {
      cfg.optimizer.kind = OptimizerKind::kExact1d;
    } else if (kind == "multistart") {
      cfg.optimizer.kind = OptimizerKind::kMultistart;
      if (o.contains("restarts")) cfg.optimizer.restarts = get_count(o, "restarts", "optimizer");
    } else {
      throw ConfigError("optimizer.kind must be 'exact_1d' or 'multistart'");
    }
  } else if (dist.dim() == 1) {
    cfg.optimizer.kind = OptimizerKind::kExact1d;
  }
  cfg.validate(dist.dim());
  return cfg;
}

}  // namespace

SourceDistribution distribution_from_json(const json& j) {
  const json& type = require(j, "type", "distribution");
  if (!type.is_string()) throw ConfigError("distribution.type must be a string");
  const std::string t = type.get<std::string>();
  // Domain errors from the factories surface as configuration errors.
  try {
    if (t == "ball_mixture") {
      return SourceDistribution::ball_mixture(get_point_set(require(j, "centers", t.c_str()), "centers"),
                                              get_number(j, "radius", t.c_str()));
    }
    if (t == "quasi_gaussian_mixture") {
      return SourceDistribution::quasi_gaussian(
          get_point_set(require(j, "means", t.c_str()), "means"),
          get_numbers(require(j, "weights", t.c_str()), "weights"), get_number(j, "sigma", t.c_str()));
    }
    if (t == "tail_counterexample") {
      const double eta = j.contains("eta") ? get_number(j, "eta", t.c_str()) : 2.0;
      const double R = j.contains("R") ? get_number(j, "R", t.c_str()) : 10.0;
      return SourceDistribution::tail_counterexample(eta, R);
    }
    if (t == "finite_atoms") {
      return SourceDistribution::finite_atoms(
          get_point_set(require(j, "atoms", t.c_str()), "atoms"),
          get_numbers(require(j, "probabilities", t.c_str()), "probabilities"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid ") + t + ": " + e.what());
  }
  throw ConfigError("unknown distribution type '" + t + "'");
}

json distribution_to_json(const SourceDistribution& dist) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BallMixture>) {
          return {{"type", "ball_mixture"}, {"centers", points_to_json(v.centers)}, {"radius", v.radius}};
        } else if constexpr (std::is_same_v<T, QuasiGaussianMixture>) {
          return {{"type", "quasi_gaussian_mixture"},
                  {"means", points_to_json(v.means)},
                  {"weights", v.weights},
                  {"sigma", v.sigma}};
        } else if constexpr (std::is_same_v<T, TailCounterexample>) {
          return {{"type", "tail_counterexample"}, {"eta", v.eta}, {"R", v.R}};
        } else {
          return {{"type", "finite_atoms"},
                  {"atoms", points_to_json(v.atoms)},
                  {"probabilities", v.probabilities}};
        }
      },
      dist.variant());
}

std::string config_hash(const json& doc) {
  const std::string s = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  SourceDistribution dist = distribution_from_json(require(doc, "distribution", "configuration"));
  ExperimentConfig exp = parse_experiment(doc, dist);
  std::optional<ClusterVector> codebook;
  if (doc.contains("codebook")) {
    std::size_t dim = 0;
    std::vector<double> coords = get_points(doc.at("codebook"), "codebook", dim);
    if (dim != dist.dim()) throw ConfigError("codebook dimension differs from the distribution");
    codebook = ClusterVector(dim, std::move(coords));
  }
  return RunConfig{std::move(dist), std::move(exp), std::move(codebook), config_hash(doc)};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json to_json(const ConditionReport& report) {
  json q = json::object();
  for (const auto& [key, value] : report.quantities) q[key] = value;
  return {{"name", report.name},     {"lhs", report.lhs},       {"rhs", report.rhs},
          {"pass", report.pass},     {"tolerance", report.tolerance},
          {"quantities", q},         {"notes", report.notes}};
}

json to_json(const RateTable& table) {
  json rows = json::array();
  for (const RateRow& r : table.rows) {
    rows.push_back({{"n", r.n}, {"mean_loss", r.mean_loss}, {"stderr", r.stderr_loss},
                    {"replicates", r.replicates}});
  }
  return {{"rows", rows},
          {"optimal_risk", table.optimal_risk},
          {"optimal_members", table.optimal_members},
          {"config_hash", table.config_hash}};
}

json to_json(const RateFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared},
          {"points", fit.points}};
}

json to_json(const DefinitenessVerdict& verdict) {
  return {{"positive_definite", verdict.positive_definite},
          {"min_eigenvalue", verdict.min_eigenvalue},
          {"threshold", verdict.threshold}};
}

json to_json(const MarginEstimate& e) {
  return {{"a1_lower_bound", e.a1_lower_bound}, {"a2_lower_bound", e.a2_lower_bound},
          {"probes", e.probes},                 {"skipped_a1", e.skipped_a1},
          {"skipped_a2", e.skipped_a2},         {"seed", e.seed}};
}

std::string metadata_header(const std::string& hash, std::uint64_t seed) {
  std::ostringstream out;
  out << "# vqlab_version: " << kVersion << '\n'
      << "# config_hash: " << hash << '\n'
      << "# seed: " << seed << '\n';
  return out.str();
}

std::string rates_csv(const RateTable& table) {
  std::ostringstream out;
  out << "n,mean_loss,stderr,replicates\n";
  for (const RateRow& r : table.rows) {
    out << r.n << ',' << format_double(r.mean_loss) << ',' << format_double(r.stderr_loss) << ','
        << r.replicates << '\n';
  }
  return out.str();
}

std::string plot_csv(const RateTable& table) {
  std::ostringstream out;
  out << "log_n,log_mean_loss,log_lower,log_upper\n";
  for (const RateRow& r : table.rows) {
    if (!(r.mean_loss > 0.0)) continue;
    const double lo = r.mean_loss - 2.0 * r.stderr_loss;
    out << format_double(std::log(static_cast<double>(r.n))) << ','
        << format_double(std::log(r.mean_loss)) << ','
        << (lo > 0.0 ? format_double(std::log(lo)) : std::string("nan")) << ','
        << format_double(std::log(r.mean_loss + 2.0 * r.stderr_loss)) << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream out;
  out << "n,risk,loss,squared_distance,squared_distance_over_n4\n";
  for (const TrajectoryPoint& p : t.points) {
    out << format_double(p.n) << ',' << format_double(p.risk) << ',' << format_double(p.loss) << ','
        << format_double(p.squared_distance) << ',' << format_double(p.distance_over_n4) << '\n';
  }
  return out.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace vqlab
