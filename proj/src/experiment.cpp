#include "wkit/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "wkit/atlas.hpp"
#include "wkit/cusp.hpp"
#include "wkit/errors.hpp"
#include "wkit/mapping.hpp"
#include "wkit/random_fields.hpp"
#include "wkit/spatial_index.hpp"
#include "wkit/whitney.hpp"

namespace wkit {

namespace {

using nlohmann::json;

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json base_report(const std::string& kind, std::uint64_t seed) {
  json report;
  report["schema"] = 1;
  report["kind"] = kind;
  report["seed"] = seed;
  report["timestamp"] = timestamp_now();
  return report;
}

std::string format_csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SampledClosedSet domain_from_json(const json& spec) {
  const std::string generator = spec.at("generator").get<std::string>();
  const json params = spec.value("params", json::object());
  const double resolution = spec.value("resolution", 0.0);
  if (generator == "half_space") {
    return half_space(params.value("dimension", 2), resolution > 0 ? resolution : 1e-2);
  }
  if (generator == "closed_ball") {
    return closed_ball(params.value("dimension", 2), params.value("radius", 1.0),
                       resolution > 0 ? resolution : 1e-2);
  }
  if (generator == "convex_polytope") {
    std::vector<Vec> vertices;
    for (const auto& v : params.at("vertices")) {
      vertices.push_back(make_vec({v.at(0).get<double>(), v.at(1).get<double>()}));
    }
    return convex_polytope(vertices, resolution > 0 ? resolution : 1e-2);
  }
  if (generator == "koch_snowflake") {
    return koch_snowflake(params.value("iterations", 2), resolution > 0 ? resolution : 5e-3);
  }
  if (generator == "exp_cusp_domain") {
    ExpCuspOptions options;
    if (resolution > 0) options.resolution = resolution;
    options.fjord_removed = params.value("fjord_removed", false);
    if (params.contains("gap")) options.gap = params.at("gap").get<double>();
    return exp_cusp_domain(options);
  }
  throw ConfigError("unknown generator: " + generator);
}

json vec_json(const Vec& v) {
  auto arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

std::string samples_csv(const SampledClosedSet& set) {
  std::ostringstream os;
  for (int i = 0; i < set.dimension; ++i) os << "x" << (i + 1) << ",";
  os << "boundary\n";
  for (size_t k = 0; k < set.samples.size(); ++k) {
    for (int i = 0; i < set.dimension; ++i)
      os << format_csv_double(set.samples[k][i]) << ",";
    os << (set.boundary_tag[k] ? 1 : 0) << "\n";
  }
  return os.str();
}

// --- shared jet builders -----------------------------------------------------

ScalarField field_from_config(const json& config, const SampledClosedSet& set,
                              std::uint64_t seed) {
  const std::string name = config.value("function", "sincos");
  if (name == "sincos") return sincos_field();
  if (name == "exp_cusp") {
    const bool removed = set.name.find("fjord_removed") != std::string::npos;
    std::optional<double> gap;
    if (removed) gap = config.value("gap", 0.05);
    ScalarField field;
    field.value = [gap](const Vec& p) { return exp_cusp_value(p, gap); };
    field.partial = [gap](const Vec& p, const MultiIndex& alpha) {
      return exp_cusp_partial(p, alpha.entries(), gap);
    };
    return field;
  }
  if (name == "random_polynomial") {
    std::mt19937_64 rng(seed);
    const auto poly = Polynomial::random(set.dimension, config.value("degree", 3), rng);
    return poly.as_field();
  }
  throw ConfigError("unknown function token: " + name);
}

std::vector<double> t_grid_from_config(const json& config) {
  std::vector<double> grid = {1e-1, 1e-2, 1e-3};
  if (config.contains("t_grid")) {
    grid.clear();
    for (const auto& t : config.at("t_grid")) grid.push_back(t.get<double>());
  }
  return grid;
}

// deterministic probe cloud in the complement near C
std::vector<Vec> probe_cloud(const SampledClosedSet& set, int count, double max_dist,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Box& box = set.bounding_box;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SpatialIndex index(&set.samples, std::max(set.resolution * 4.0, 1e-3));
  std::vector<Vec> probes;
  int guard = 0;
  while (static_cast<int>(probes.size()) < count && ++guard < count * 1000) {
    Vec x(set.dimension);
    for (int i = 0; i < set.dimension; ++i)
      x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unif(rng);
    if (set.membership(x)) continue;
    const double dist = index.nearest_distance(x);
    if (dist > max_dist || dist < 1e-9) continue;
    probes.push_back(x);
  }
  return probes;
}

// --- experiment kinds -----------------------------------------------------------

ExperimentOutput run_gen_domain(const json& config, std::uint64_t seed) {
  const auto set = domain_from_json(config.at("domain"));
  json report = base_report("gen-domain", seed);
  report["generator"] = set.name;
  report["resolution"] = set.resolution;
  report["sample_count"] = set.samples.size();
  report["boundary_count"] = set.boundary_samples().size();
  ExperimentOutput out;
  out.exit_code = kExitPass;
  out.report = report.dump(2);
  out.files.push_back({"samples.csv", samples_csv(set)});
  return out;
}

ExperimentOutput run_check_cusp(const json& config, std::uint64_t seed) {
  const auto set = domain_from_json(config.at("domain"));
  const double epsilon0 = config.value("epsilon0", 0.12);
  const double rho = config.value("rho", 1.0);
  const double r = config.value("r", 2.0);
  std::vector<double> eps_grid;
  for (const auto& e : config.value("eps_grid", json::array({0.06, 0.03})))
    eps_grid.push_back(e.get<double>());
  const int probe_count = config.value("probe_count", 128);
  const int boundary_limit = config.value("boundary_limit", 200);

  auto boundary = set.boundary_samples();
  if (static_cast<int>(boundary.size()) > boundary_limit) {
    const size_t stride = boundary.size() / static_cast<size_t>(boundary_limit);
    std::vector<Vec> thinned;
    for (size_t k = 0; k < boundary.size(); k += stride) thinned.push_back(boundary[k]);
    boundary = std::move(thinned);
  }

  const auto result =
      check_outward_cusps(set, boundary, epsilon0, rho, r, eps_grid, probe_count, seed);
  json report = base_report("check-cusp", seed);
  report["domain"] = set.name;
  report["resolution"] = set.resolution;
  report["epsilon0"] = epsilon0;
  report["rho"] = rho;
  report["r"] = r;
  report["eps_grid"] = eps_grid;
  report["boundary_points_tested"] = boundary.size();
  report["ok"] = result.ok;
  ExperimentOutput out;
  if (result.ok) {
    report["witness_count"] = result.certificate->witnesses.size();
    report["replay"] = replay_cusp_certificate(set, *result.certificate);
    out.files.push_back({"cusp_certificate.json", cusp_certificate_to_json(*result.certificate)});
    out.exit_code = kExitPass;
  } else {
    report["violation"] = {{"z", vec_json(result.violation->z)},
                           {"eps", result.violation->eps},
                           {"reason", result.violation->reason}};
    out.exit_code = kExitFail;
  }
  out.report = report.dump(2);
  return out;
}

ExperimentOutput run_check_fjords(const json& config, std::uint64_t seed) {
  const auto set = domain_from_json(config.at("domain"));
  const int p = config.value("p", 1);
  const double D = config.value("D", 0.2);
  const int pair_budget = config.value("pair_budget", 60);

  FjordCheckResult result;
  if (config.contains("pairs")) {
    std::vector<std::pair<Vec, Vec>> pairs;
    for (const auto& pair : config.at("pairs")) {
      pairs.push_back({make_vec({pair.at(0).at(0).get<double>(), pair.at(0).at(1).get<double>()}),
                       make_vec({pair.at(1).at(0).get<double>(), pair.at(1).at(1).get<double>()})});
    }
    result = check_no_narrow_fjords_pairs(set, set.samples.front(), p, D, pairs);
  } else {
    auto K = set.boundary_samples();
    const int k_limit = config.value("K_limit", 24);
    if (static_cast<int>(K.size()) > k_limit) {
      const size_t stride = K.size() / static_cast<size_t>(k_limit);
      std::vector<Vec> thinned;
      for (size_t k = 0; k < K.size(); k += stride) thinned.push_back(K[k]);
      K = std::move(thinned);
    }
    result = check_no_narrow_fjords(set, set.samples.front(), p, D, K, pair_budget, seed);
  }

  json report = base_report("check-fjords", seed);
  report["domain"] = set.name;
  report["resolution"] = set.resolution;
  report["p"] = p;
  report["D"] = D;
  report["ok"] = result.ok;
  ExperimentOutput out;
  if (result.ok) {
    report["paths_checked"] = result.certificate->paths.size();
    out.files.push_back(
        {"fjord_certificate.json", fjord_certificate_to_json(*result.certificate)});
    out.exit_code = kExitPass;
  } else {
    report["violation"] = {{"x", vec_json(result.violation->x)},
                           {"y", vec_json(result.violation->y)},
                           {"distance", result.violation->distance},
                           {"best_length", result.violation->best_length},
                           {"disconnected", result.violation->disconnected}};
    out.exit_code = kExitFail;
  }
  out.report = report.dump(2);
  return out;
}

ExperimentOutput run_extend(const json& config, std::uint64_t seed) {
  const auto set = domain_from_json(config.at("domain"));
  const int m = config.value("order", 1);
  const double tol = config.value("tol", 0.5);
  const auto t_grid = t_grid_from_config(config);

  const bool is_cusp_function = config.value("function", "sincos") == std::string("exp_cusp");
  std::vector<Vec> jet_points;
  JetField jet = [&]() {
    if (is_cusp_function) {
      jet_points = jet_sample_subset(set, set.resolution * 8.0);
      const bool removed = set.name.find("fjord_removed") != std::string::npos;
      std::optional<double> gap;
      if (removed) gap = config.value("gap", 0.05);
      return exp_cusp_jet(jet_points, m, gap);
    }
    jet_points = jet_sample_subset(set, set.resolution * 4.0);
    return jet_of_function(field_from_config(config, set, seed), jet_points, m);
  }();

  json report = base_report("extend", seed);
  report["domain"] = set.name;
  report["resolution"] = set.resolution;
  report["order"] = m;
  report["tol"] = tol;
  report["t_grid"] = t_grid;
  report["jet_points"] = jet.point_count();

  const auto verdict = whitney_jet_check(jet, m, t_grid, tol);
  json check;
  check["pass"] = verdict.pass;
  check["q_at_smallest_t"] = verdict.q_at_smallest_t;
  auto q_values = json::array();
  for (const auto& qv : verdict.q_values) {
    q_values.push_back({{"t", qv.t}, {"q", qv.q}, {"empty_sup", qv.empty_sup}});
  }
  check["q_values"] = std::move(q_values);
  if (verdict.witness) {
    check["witness"] = {{"x", vec_json(jet.point(verdict.witness->x_index))},
                        {"y", vec_json(jet.point(verdict.witness->y_index))},
                        {"alpha", verdict.witness->alpha.to_string()},
                        {"ratio", verdict.witness->ratio}};
  }
  report["whitney_check"] = std::move(check);

  ExperimentOutput out;
  if (!verdict.pass) {
    // the counterexample behavior: the operator refuses the jet
    report["extension"] = "refused";
    out.exit_code = kExitFail;
    out.report = report.dump(2);
    return out;
  }

  const Box& box = set.bounding_box;
  const double min_side = config.value("min_side", 1.0 / 128.0);
  const double max_side = (box.hi - box.lo).maxCoeff() / 4.0;
  const auto decomp = whitney_decompose(set, box, min_side, max_side);
  const auto extension = extend_jet(std::move(jet), decomp, set);
  const auto probes =
      probe_cloud(set, config.value("probe_count", 500), config.value("probe_dist", 0.25), seed);

  SpatialIndex index(&set.samples, std::max(set.resolution * 4.0, 1e-3));
  std::ostringstream csv;
  for (int i = 0; i < set.dimension; ++i) csv << "x" << (i + 1) << ",";
  csv << "Ef,dist_to_C\n";
  for (const Vec& x : probes) {
    for (int i = 0; i < set.dimension; ++i) csv << format_csv_double(x[i]) << ",";
    csv << format_csv_double(extension(x)) << "," << format_csv_double(index.nearest_distance(x))
        << "\n";
  }

  const auto agreement = verify_jet_agreement(extension, probes, m);
  report["extension"] = {{"cubes", decomp.cubes.size()},
                         {"min_side", min_side},
                         {"max_side", max_side},
                         {"probe_count", probes.size()},
                         {"jet_agreement_max", agreement.max_discrepancy},
                         {"fitted_decay_order", agreement.fitted_decay_order}};
  out.exit_code = kExitPass;
  out.report = report.dump(2);
  out.files.push_back({"extension.csv", csv.str()});
  return out;
}

ExperimentOutput run_roundtrip(const json& config, std::uint64_t seed) {
  const auto set = domain_from_json(config.at("domain"));
  const int m = config.value("order", 2);
  const auto field = field_from_config(config, set, seed);
  const auto jet_points = jet_sample_subset(set, set.resolution * 4.0);
  auto jet = jet_of_function(field, jet_points, m);

  const Box& box = set.bounding_box;
  const double min_side = config.value("min_side", 1.0 / 128.0);
  const auto decomp =
      whitney_decompose(set, box, min_side, (box.hi - box.lo).maxCoeff() / 4.0);
  const auto extension = extend_jet(jet, decomp, set);

  double restriction_defect = 0.0;
  for (int p = 0; p < jet.point_count(); ++p) {
    restriction_defect =
        std::max(restriction_defect, std::abs(extension(jet.point(p)) - jet.value(p, 0)));
  }
  const auto probes =
      probe_cloud(set, config.value("probe_count", 300), config.value("probe_dist", 0.25), seed);
  const auto agreement = verify_jet_agreement(extension, probes, m);

  json report = base_report("roundtrip", seed);
  report["domain"] = set.name;
  report["resolution"] = set.resolution;
  report["order"] = m;
  report["restriction_identity_defect"] = restriction_defect;
  report["jet_agreement_max"] = agreement.max_discrepancy;
  report["fitted_decay_order"] = agreement.fitted_decay_order;
  const double agreement_tol = config.value("agreement_tol", 1e-4);
  report["agreement_tol"] = agreement_tol;

  ExperimentOutput out;
  out.exit_code =
      (restriction_defect == 0.0 && agreement.max_discrepancy <= agreement_tol) ? kExitPass
                                                                                : kExitFail;
  out.report = report.dump(2);
  return out;
}

ExperimentOutput run_patch(const json& config, std::uint64_t seed) {
  const std::string atlas_kind = config.value("atlas", "circle");
  const int rank = config.value("rank", 1);
  AtlasBundle atlas = atlas_kind == "circle"
                          ? make_circle_atlas(rank, config.value("sample_spacing", 1e-2))
                          : make_line_atlas(config.value("n_charts", 3), rank,
                                            config.value("sample_spacing", 2e-2));
  const double pi = std::numbers::pi;
  const double c_lo = config.value("c_lo", pi - 0.5);
  const double c_hi = config.value("c_hi", pi + 0.5);
  const auto c_set = make_interval_subset(atlas, c_lo, c_hi);
  const int m = config.value("order", 2);
  const int n_sections = config.value("sections", 20);
  const double seam_tol = config.value("seam_tol", 1e-6);

  std::mt19937_64 rng(seed);
  double worst_restriction = 0.0;
  double worst_seam = 0.0;
  for (int trial = 0; trial < n_sections; ++trial) {
    std::vector<TrigPolynomial> components;
    for (int k = 0; k < rank; ++k) components.push_back(TrigPolynomial::random(3, rng));
    const auto family = make_parameter_section(
        atlas, [&components](int k, double t, int order) {
          return components[static_cast<size_t>(k)].derivative(t, order);
        });
    const auto section = restrict_section(family, atlas, c_set, m);
    const auto glued = global_extension_operator(section, atlas, c_set);

    for (size_t row = 0; row < section.sample_ids.size(); ++row) {
      const Vec value = glued.at_sample(atlas, section.sample_ids[row]);
      worst_restriction = std::max(
          worst_restriction, (value - section.values[row]).cwiseAbs().maxCoeff());
    }

    worst_seam = std::max(
        worst_seam, seam_jump_max(glued, atlas, config.value("sample_spacing", 1e-2)));
  }

  json report = base_report("patch", seed);
  report["atlas"] = atlas.name;
  report["rank"] = rank;
  report["order"] = m;
  report["sections"] = n_sections;
  report["c_interval"] = {c_lo, c_hi};
  report["sample_spacing"] = config.value("sample_spacing", 1e-2);
  report["restriction_identity_defect"] = worst_restriction;
  report["seam_jump_max"] = worst_seam;
  report["seam_tol"] = seam_tol;

  ExperimentOutput out;
  out.exit_code = (worst_restriction == 0.0 && worst_seam <= seam_tol) ? kExitPass : kExitFail;
  out.report = report.dump(2);
  return out;
}

ExperimentOutput run_submersion(const json& config, std::uint64_t seed) {
  const double pi = std::numbers::pi;
  const double spacing = config.value("grid_spacing", 1e-2);
  auto atlas = make_circle_atlas(3, spacing);
  const auto c_set = make_interval_subset(atlas, config.value("c_lo", pi - 0.5),
                                          config.value("c_hi", pi + 0.5));
  SubmersionCheckOptions options;
  options.trials = config.value("trials", 50);
  options.seed = seed;
  options.field_scale = config.value("field_scale", 0.1);
  const auto addition = config.value("addition", "exp") == std::string("projection")
                            ? sphere_projection_addition()
                            : sphere_exp_addition();
  const auto result = submersion_chart_check(atlas, c_set, addition, options);
  const double bound = config.value("bound", 1e-6);

  json report = base_report("submersion", seed);
  report["addition"] = addition.name;
  report["trials"] = result.trials;
  report["grid_spacing"] = result.grid_spacing;
  report["defect_max"] =
      std::max(result.naturality_defect_max, result.right_inverse_defect_max);
  report["defect_mean"] =
      0.5 * (result.naturality_defect_mean + result.right_inverse_defect_mean);
  report["naturality_defect_max"] = result.naturality_defect_max;
  report["right_inverse_defect_max"] = result.right_inverse_defect_max;
  report["bound"] = bound;

  ExperimentOutput out;
  out.exit_code = (result.naturality_defect_max <= bound &&
                   result.right_inverse_defect_max <= bound)
                      ? kExitPass
                      : kExitFail;
  out.report = report.dump(2);
  return out;
}

}  // namespace

SampledClosedSet domain_from_config(const std::string& config_text) {
  return domain_from_json(json::parse(config_text));
}

std::vector<Vec> jet_sample_subset(const SampledClosedSet& set, double interior_spacing,
                                   std::size_t max_points) {
  std::vector<Vec> points = set.boundary_samples();
  const double cell = std::max(interior_spacing, 1e-6);
  // greedy thinning on a cell hash: accept a point when its cell and the
  // neighboring cells hold no accepted point within the spacing
  std::map<std::vector<long>, std::vector<Vec>> accepted;
  auto cell_of = [cell](const Vec& x) {
    std::vector<long> c(static_cast<size_t>(x.size()));
    for (int i = 0; i < x.size(); ++i)
      c[static_cast<size_t>(i)] = static_cast<long>(std::floor(x[i] / cell));
    return c;
  };
  auto too_close = [&](const Vec& x) {
    const auto base = cell_of(x);
    std::vector<long> probe = base;
    const int d = static_cast<int>(x.size());
    const int combos = 1;
    (void)combos;
    std::function<bool(int)> scan = [&](int axis) -> bool {
      if (axis == d) {
        const auto it = accepted.find(probe);
        if (it == accepted.end()) return false;
        for (const Vec& y : it->second) {
          if ((x - y).norm() < interior_spacing) return true;
        }
        return false;
      }
      for (long delta = -1; delta <= 1; ++delta) {
        probe[static_cast<size_t>(axis)] = base[static_cast<size_t>(axis)] + delta;
        if (scan(axis + 1)) return true;
      }
      probe[static_cast<size_t>(axis)] = base[static_cast<size_t>(axis)];
      return false;
    };
    return scan(0);
  };
  for (const Vec& x : set.interior_samples()) {
    if (points.size() >= max_points) break;
    if (too_close(x)) continue;
    accepted[cell_of(x)].push_back(x);
    points.push_back(x);
  }
  return points;
}

JetField exp_cusp_jet(const std::vector<Vec>& points, int m, std::optional<double> gap) {
  ScalarField field;
  field.value = [gap](const Vec& p) { return exp_cusp_value(p, gap); };
  field.partial = [gap](const Vec& p, const MultiIndex& alpha) {
    return exp_cusp_partial(p, alpha.entries(), gap);
  };
  return jet_of_function(field, points, m);
}

ScalarField sincos_field() {
  ScalarField field;
  field.value = [](const Vec& x) { return std::sin(x[0]) * std::cos(x[1]); };
  field.partial = [](const Vec& x, const MultiIndex& alpha) {
    auto cycle_sin = [](double t, int order) {
      switch (order % 4) {
        case 0: return std::sin(t);
        case 1: return std::cos(t);
        case 2: return -std::sin(t);
        default: return -std::cos(t);
      }
    };
    auto cycle_cos = [&cycle_sin](double t, int order) { return cycle_sin(t, order + 1); };
    return cycle_sin(x[0], alpha[0]) * cycle_cos(x[1], alpha[1]);
  };
  return field;
}

ExperimentOutput run_experiment(const std::string& kind, const std::string& config_text,
                                std::optional<std::uint64_t> seed_override) {
  ExperimentOutput out;
  try {
    const json config = json::parse(config_text);
    const std::uint64_t seed = seed_override.value_or(config.value("seed", 17));
    if (kind == "gen-domain") return run_gen_domain(config, seed);
    if (kind == "check-cusp") return run_check_cusp(config, seed);
    if (kind == "check-fjords") return run_check_fjords(config, seed);
    if (kind == "extend") return run_extend(config, seed);
    if (kind == "roundtrip") return run_roundtrip(config, seed);
    if (kind == "patch") return run_patch(config, seed);
    if (kind == "submersion") return run_submersion(config, seed);
    json report;
    report["error"] = "unknown experiment kind: " + kind;
    out.report = report.dump(2);
    out.exit_code = kExitConfigError;
    return out;
  } catch (const ConfigError& e) {
    json report;
    report["error"] = e.what();
    out.report = report.dump(2);
    out.exit_code = kExitConfigError;
    return out;
  } catch (const json::exception& e) {
    json report;
    report["error"] = std::string("config parse error: ") + e.what();
    out.report = report.dump(2);
    out.exit_code = kExitConfigError;
    return out;
  }
}

}  // namespace wkit
