#include "wkit/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wkit/errors.hpp"
#include "wkit/spatial_index.hpp"

namespace wkit {

WhitneyDecomposition whitney_decompose(const SampledClosedSet& set, const Box& box,
                                       double min_side, double max_side,
                                       const WhitneyDecomposeOptions& options) {
  if (!(0.0 < min_side && min_side < max_side))
    throw ArgumentError("whitney_decompose needs 0 < min_side < max_side");
  const int d = box.dimension();
  const double diag = std::sqrt(static_cast<double>(d));

  WhitneyDecomposition out;
  out.set_name = set.name;
  out.box = box;
  out.min_side = min_side;
  out.max_side = max_side;

  // root tiling of the box by cubes of side max_side
  std::vector<WhitneyCube> stack;
  {
    std::vector<int> counts(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i)
      counts[static_cast<size_t>(i)] = std::max(
          1, static_cast<int>(std::ceil((box.hi[i] - box.lo[i]) / max_side - 1e-12)));
    std::vector<int> ix(static_cast<size_t>(d), 0);
    while (true) {
      Vec center(d);
      for (int i = 0; i < d; ++i)
        center[i] = box.lo[i] + (ix[static_cast<size_t>(i)] + 0.5) * max_side;
      stack.push_back(WhitneyCube{center, max_side, -1});
      int axis = 0;
      while (axis < d) {
        if (++ix[static_cast<size_t>(axis)] < counts[static_cast<size_t>(axis)]) break;
        ix[static_cast<size_t>(axis)] = 0;
        ++axis;
      }
      if (axis == d) break;
    }
  }

  SpatialIndex sample_index(&set.samples, std::max(set.resolution, min_side));
  while (!stack.empty()) {
    WhitneyCube cube = stack.back();
    stack.pop_back();
    if (cube.side < min_side) continue;  // discarded: still too close to C
    const int anchor = sample_index.nearest(cube.center);
    const double dist = set.membership(cube.center)
                            ? 0.0
                            : (set.samples[static_cast<size_t>(anchor)] - cube.center).norm();
    if (dist >= cube.side * diag) {
      cube.anchor = anchor;
      out.cubes.push_back(std::move(cube));
      if (out.cubes.size() > options.cube_budget)
        throw SizeError("whitney_decompose cube budget exceeded");
      continue;
    }
    // subdivide into 2^d children
    const double half = cube.side / 2.0;
    const int children = 1 << d;
    for (int mask = 0; mask < children; ++mask) {
      Vec center = cube.center;
      for (int i = 0; i < d; ++i)
        center[i] += ((mask >> i) & 1 ? 0.5 : -0.5) * half;
      stack.push_back(WhitneyCube{center, half, -1});
    }
    if (stack.size() + out.cubes.size() > 4 * options.cube_budget)
      throw SizeError("whitney_decompose cube budget exceeded");
  }

  // deterministic order independent of the traversal
  std::sort(out.cubes.begin(), out.cubes.end(), [](const WhitneyCube& a, const WhitneyCube& b) {
    if (a.side != b.side) return a.side > b.side;
    return lex_less(a.center, b.center);
  });
  return out;
}

std::string decomposition_to_json(const WhitneyDecomposition& decomp) {
  nlohmann::json j;
  j["kind"] = "whitney_decomposition";
  j["set"] = decomp.set_name;
  j["min_side"] = decomp.min_side;
  j["max_side"] = decomp.max_side;
  auto cubes = nlohmann::json::array();
  for (const WhitneyCube& cube : decomp.cubes) {
    auto center = nlohmann::json::array();
    for (int i = 0; i < cube.center.size(); ++i) center.push_back(cube.center[i]);
    cubes.push_back(
        {{"center", std::move(center)}, {"side", cube.side}, {"anchor", cube.anchor}});
  }
  j["cubes"] = std::move(cubes);
  return j.dump();
}

double BumpSystem::raw(const WhitneyCube& cube, const Vec& x) const {
  const double radius =
      support_factor * cube.side / 2.0 * std::sqrt(static_cast<double>(x.size()));
  const double t = (x - cube.center).norm() / radius;
  if (t >= 1.0) return 0.0;
  switch (profile) {
    case BumpProfile::Mollifier:
      return std::exp(-1.0 / (1.0 - t * t));
    case BumpProfile::PolynomialC2: {
      const double s = 1.0 - t * t;
      return s * s * s;
    }
  }
  return 0.0;
}

struct WhitneyExtension::Impl {
  JetField jet;
  WhitneyDecomposition decomposition;
  BumpSystem bumps;
  // set oracles copied so evaluation outlives the generating set object
  std::function<bool(const Vec&)> membership;
  std::vector<Vec> samples;  // the jet's sample points
  std::unique_ptr<SpatialIndex> sample_index;
  std::vector<int> anchors;  // per cube, nearest jet point to the center
  // cubes bucketed per dyadic side so the blend only touches nearby cubes
  struct Level {
    double side = 0.0;
    double reach = 0.0;  // support radius at this side
    std::vector<Vec> centers;
    std::vector<int> cube_ids;
    std::unique_ptr<SpatialIndex> index;
  };
  std::vector<Level> levels;

  Impl(JetField j, WhitneyDecomposition d) : jet(std::move(j)), decomposition(std::move(d)) {}

  void build_indexes() {
    sample_index = std::make_unique<SpatialIndex>(&samples, std::max(decomposition.min_side,
                                                                     1e-6));
    // the operator anchors Taylor polynomials at the jet's own samples; when
    // the jet lives on a subset of the set samples, remap the cube anchors
    anchors.resize(decomposition.cubes.size());
    for (size_t c = 0; c < decomposition.cubes.size(); ++c)
      anchors[c] = sample_index->nearest(decomposition.cubes[c].center);
    const double dim_root = std::sqrt(static_cast<double>(jet.dimension()));
    std::map<double, std::vector<int>> by_side;
    for (int c = 0; c < static_cast<int>(decomposition.cubes.size()); ++c)
      by_side[decomposition.cubes[static_cast<size_t>(c)].side].push_back(c);
    for (auto& [side, ids] : by_side) {
      Level level;
      level.side = side;
      level.reach = bumps.support_factor * side / 2.0 * dim_root;
      level.cube_ids = ids;
      for (int c : ids) level.centers.push_back(decomposition.cubes[static_cast<size_t>(c)].center);
      levels.push_back(std::move(level));
    }
    // indexes point into the level vector, so build them only once it is final
    for (Level& level : levels)
      level.index = std::make_unique<SpatialIndex>(&level.centers, std::max(level.side, 1e-9));
  }

  double blend(const Vec& x) const {
    double weight_sum = 0.0;
    double value_sum = 0.0;
    for (const Level& level : levels) {
      for (int local : level.index->within(x, level.reach)) {
        const int cube_id = level.cube_ids[static_cast<size_t>(local)];
        const WhitneyCube& cube = decomposition.cubes[static_cast<size_t>(cube_id)];
        const double w = bumps.raw(cube, x);
        if (w <= 0.0) continue;
        weight_sum += w;
        value_sum += w * taylor_poly_at(jet, anchors[static_cast<size_t>(cube_id)],
                                        jet.order(), x);
      }
    }
    if (weight_sum <= 0.0) {
      // sliver between the discarded cubes and C: fall back to the Taylor
      // polynomial at the nearest sample
      return taylor_poly_at(jet, sample_index->nearest(x), jet.order(), x);
    }
    return value_sum / weight_sum;
  }
};

WhitneyExtension::WhitneyExtension(JetField jet, WhitneyDecomposition decomposition,
                                   const SampledClosedSet& set,
                                   const WhitneyExtensionOptions& options) {
  if (options.check_tol) {
    const auto verdict =
        whitney_jet_check(jet, jet.order(), options.check_t_grid, *options.check_tol);
    if (!verdict.pass) {
      std::ostringstream os;
      os << "jet failed the Whitney criterion: q_" << jet.order() << "("
         << options.check_t_grid.back() << ") = " << verdict.q_at_smallest_t
         << " >= " << *options.check_tol;
      if (verdict.witness) {
        os << "; witness pair (" << verdict.witness->x_index << ", " << verdict.witness->y_index
           << "), alpha = (" << verdict.witness->alpha.to_string()
           << "), ratio = " << verdict.witness->ratio;
      }
      throw WhitneyCheckError(os.str());
    }
  }
  auto impl = std::make_shared<Impl>(std::move(jet), std::move(decomposition));
  impl->bumps = options.bumps;
  impl->membership = set.membership;
  impl->samples = impl->jet.points();
  if (impl->samples.empty()) throw ArgumentError("extension needs a sampled jet");
  impl->build_indexes();
  impl_ = std::move(impl);
}

double WhitneyExtension::operator()(const Vec& x) const {
  if (impl_->membership(x)) {
    return impl_->jet.value(impl_->sample_index->nearest(x), 0);
  }
  if (!impl_->decomposition.box.contains(x))
    throw DomainError("extension evaluated outside the decomposition box");
  return impl_->blend(x);
}

double WhitneyExtension::smooth_value(const Vec& x) const {
  if (impl_->membership(x)) {
    return taylor_poly_at(impl_->jet, impl_->sample_index->nearest(x), impl_->jet.order(), x);
  }
  return impl_->blend(x);
}

const WhitneyDecomposition& WhitneyExtension::decomposition() const {
  return impl_->decomposition;
}

const JetField& WhitneyExtension::jet() const { return impl_->jet; }

int WhitneyExtension::order() const { return impl_->jet.order(); }

WhitneyExtension extend_jet(JetField jet, WhitneyDecomposition decomposition,
                            const SampledClosedSet& set,
                            const WhitneyExtensionOptions& options) {
  return WhitneyExtension(std::move(jet), std::move(decomposition), set, options);
}

JetAgreementReport verify_jet_agreement(const WhitneyExtension& extension,
                                        const std::vector<Vec>& probes, int m, double fd_step) {
  const JetField& jet = extension.jet();
  JetAgreementReport report;
  report.m = m;
  report.fd_step = fd_step;
  report.max_discrepancy_by_order.assign(static_cast<size_t>(m) + 1, 0.0);

  const Vec h = Vec::Constant(jet.dimension(), fd_step);
  auto smooth = [&extension](const Vec& x) { return extension.smooth_value(x); };
  const auto& idx = jet.index_set();
  for (int p = 0; p < jet.point_count(); ++p) {
    for (size_t k = 0; k < idx.size(); ++k) {
      if (idx[k].order() > m) break;
      const double fd = finite_difference(smooth, jet.point(p), idx[k], h);
      const double diff = std::abs(fd - jet.value(p, static_cast<int>(k)));
      auto& slot = report.max_discrepancy_by_order[static_cast<size_t>(idx[k].order())];
      slot = std::max(slot, diff);
      report.max_discrepancy = std::max(report.max_discrepancy, diff);
    }
  }

  // log-log fit of |Ef(y) - Tay_x^m f(y)| against |y - x|, x = nearest sample
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const Vec& y : probes) {
    const int nearest = nearest_index(jet.points(), y);
    const double dist = (jet.point(nearest) - y).norm();
    if (dist <= 0.0) continue;
    const double err =
        std::abs(extension.smooth_value(y) - taylor_poly_at(jet, nearest, m, y));
    if (err <= 1e-300) continue;  // exact reproduction: no slope information
    const double lx = std::log(dist);
    const double ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  report.probes_used = n;
  if (n >= 2 && (n * sxx - sx * sx) > 0.0) {
    report.fitted_decay_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return report;
}

}  // namespace wkit
