#include "wkit/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "wkit/cusp.hpp"
#include "wkit/errors.hpp"
#include "wkit/random_fields.hpp"

namespace wkit {

std::vector<int> AtlasBundle::neighbors(int i) const {
  std::vector<int> out{i};
  for (const auto& [key, transition] : transitions) {
    (void)transition;
    if (key.first == i) out.push_back(key.second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Vec AtlasBundle::to_chart(int from, int to, const Vec& x) const {
  if (from == to) return x;
  const auto it = transitions.find({from, to});
  if (it == transitions.end()) throw IndexingError("charts do not overlap");
  return it->second.forward(x);
}

Mat AtlasBundle::transition_linear(int from, int to) const {
  if (from == to) return Mat::Identity(dimension, dimension);
  const auto it = transitions.find({from, to});
  if (it == transitions.end()) throw IndexingError("charts do not overlap");
  if (!it->second.affine)
    throw IndexingError("jet transport needs an affine transition");
  return it->second.linear;
}

Mat AtlasBundle::phi(int i, int j, const Vec& x_in_i) const {
  if (i == j) return Mat::Identity(rank, rank);
  const auto it = bundle_transitions.find({i, j});
  if (it == bundle_transitions.end()) return Mat::Identity(rank, rank);
  return it->second(x_in_i);
}

double AtlasBundle::chi_at(int j, int i, const Vec& x_in_i) const {
  if (j == i) return chi[static_cast<size_t>(j)](x_in_i);
  const auto it = transitions.find({i, j});
  if (it == transitions.end()) return 0.0;
  const Vec x_j = it->second.forward(x_in_i);
  if (!charts[static_cast<size_t>(j)].u_box.contains(x_j, 1e-12)) return 0.0;
  return chi[static_cast<size_t>(j)](x_j);
}

int AtlasBundle::local_finiteness_bound() const {
  int bound = 0;
  for (const AtlasSample& s : samples)
    bound = std::max(bound, static_cast<int>(s.chart_coords.size()));
  return bound;
}

void AtlasBundle::build_sample_lookup() {
  lookup_.assign(charts.size(), {});
  for (int id = 0; id < static_cast<int>(samples.size()); ++id) {
    for (const auto& [chart, x] : samples[static_cast<size_t>(id)].chart_coords) {
      std::vector<double> key(x.data(), x.data() + x.size());
      lookup_[static_cast<size_t>(chart)][key] = id;
    }
  }
}

std::optional<int> AtlasBundle::sample_lookup(int chart, const Vec& x) const {
  if (lookup_.empty()) return std::nullopt;
  std::vector<double> key(x.data(), x.data() + x.size());
  const auto& table = lookup_[static_cast<size_t>(chart)];
  const auto it = table.find(key);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

AtlasInvariantReport check_atlas_invariants(const AtlasBundle& atlas) {
  AtlasInvariantReport report;
  report.local_finiteness = atlas.local_finiteness_bound();

  for (const AtlasSample& s : atlas.samples) {
    // partition of unity: sum over charts of chi at this point
    double sum = 0.0;
    for (const auto& [chart, x] : s.chart_coords) {
      const double c = atlas.chi[static_cast<size_t>(chart)](x);
      sum += c;
      if (!atlas.charts[static_cast<size_t>(chart)].v_box.contains(x, 1e-12)) {
        report.pou_support_defect = std::max(report.pou_support_defect, std::abs(c));
      }
    }
    report.pou_sum_defect = std::max(report.pou_sum_defect, std::abs(sum - 1.0));

    // cocycle on sampled triple overlaps
    const auto& cc = s.chart_coords;
    for (size_t a = 0; a < cc.size(); ++a) {
      for (size_t b = 0; b < cc.size(); ++b) {
        for (size_t c = 0; c < cc.size(); ++c) {
          if (a == b || b == c || a == c) continue;
          const Mat lhs = atlas.phi(cc[a].first, cc[c].first, cc[a].second);
          const Mat rhs = atlas.phi(cc[a].first, cc[b].first, cc[a].second) *
                          atlas.phi(cc[b].first, cc[c].first, cc[b].second);
          report.cocycle_defect =
              std::max(report.cocycle_defect, (lhs - rhs).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  return report;
}

bool CompactSupportTag::covers(int chart) const {
  return std::find(charts.begin(), charts.end(), chart) != charts.end();
}

Vec LocalSectionFamily::value(const AtlasBundle& atlas, int chart, const Vec& x) const {
  const ChartRep& rep = reps[static_cast<size_t>(chart)];
  if (!rep.active) return Vec::Zero(atlas.rank);
  return rep.value(x);
}

// --- restriction -------------------------------------------------------------

SectionOnC restrict_section(const LocalSectionFamily& family, const AtlasBundle& atlas,
                            const AtlasClosedSet& c_set, int m) {
  SectionOnC out;
  out.order = m;
  const auto alphas = multi_indices_up_to(atlas.dimension, m);
  for (int id : c_set.sample_ids) {
    const AtlasSample& s = atlas.samples[static_cast<size_t>(id)];
    const int owner = s.owner();
    const Vec& x = s.owner_coords();
    const ChartRep& rep = family.reps[static_cast<size_t>(owner)];

    out.sample_ids.push_back(id);
    if (!rep.active) {
      out.values.push_back(Vec::Zero(atlas.rank));
      out.partials.push_back(std::vector<std::vector<double>>(
          static_cast<size_t>(atlas.rank), std::vector<double>(alphas.size(), 0.0)));
      continue;
    }
    out.values.push_back(rep.value(x));
    std::vector<std::vector<double>> table(static_cast<size_t>(atlas.rank),
                                           std::vector<double>(alphas.size(), 0.0));
    for (size_t a = 0; a < alphas.size(); ++a) {
      Vec p;
      if (alphas[a].order() == 0) {
        p = out.values.back();
      } else if (rep.partial) {
        p = rep.partial(x, alphas[a]);
      } else {
        // finite-difference fallback: section representatives are defined on
        // the whole chart image
        p = Vec(atlas.rank);
        Vec h = Vec::Constant(atlas.dimension, 1e-5);
        for (int k = 0; k < atlas.rank; ++k) {
          auto component = [&rep, k](const Vec& y) { return rep.value(y)[k]; };
          p[k] = finite_difference(component, x, alphas[a], h);
        }
      }
      for (int k = 0; k < atlas.rank; ++k) table[static_cast<size_t>(k)][a] = p[k];
    }
    out.partials.push_back(std::move(table));
  }
  return out;
}

// --- jet transport ------------------------------------------------------------

namespace {

// Expansion of the chart-j derivative d^alpha in owner-chart derivatives for
// an affine transition with constant Jacobian A = d(tau_{j -> owner}):
// each d_i becomes sum_k A[k][i] d_k.
std::map<std::vector<int>, double> derivative_expansion(const Mat& A, const MultiIndex& alpha) {
  const int d = alpha.dimension();
  std::map<std::vector<int>, double> terms{{std::vector<int>(static_cast<size_t>(d), 0), 1.0}};
  for (int axis = 0; axis < d; ++axis) {
    for (int rep = 0; rep < alpha[axis]; ++rep) {
      std::map<std::vector<int>, double> next;
      for (const auto& [gamma, coeff] : terms) {
        for (int k = 0; k < d; ++k) {
          const double a = A(k, axis);
          if (a == 0.0) continue;
          std::vector<int> bumped = gamma;
          bumped[static_cast<size_t>(k)] += 1;
          next[bumped] += coeff * a;
        }
      }
      terms = std::move(next);
    }
  }
  return terms;
}

// Jet of one bundle component of the section in chart j, assembled from the
// canonical owner-chart tables. Transport is exact (single unit term) for
// translations with a trivial bundle.
std::vector<std::vector<double>> transport_tables(const SectionOnC& section,
                                                  const AtlasBundle& atlas, int chart,
                                                  const std::vector<int>& rows) {
  const auto alphas = multi_indices_up_to(atlas.dimension, section.order);
  std::vector<std::vector<double>> out;
  for (int row : rows) {
    const AtlasSample& s =
        atlas.samples[static_cast<size_t>(section.sample_ids[static_cast<size_t>(row)])];
    const int owner = s.owner();
    const Vec* x_j = s.coords_in(chart);
    if (x_j == nullptr) throw IndexingError("sample not resolvable in chart");

    const Mat A = atlas.transition_linear(chart, owner);
    const Mat phi = atlas.phi(chart, owner, *x_j);
    const auto& table = section.partials[static_cast<size_t>(row)];

    std::vector<std::vector<double>> per_component(static_cast<size_t>(atlas.rank),
                                                   std::vector<double>(alphas.size(), 0.0));
    for (size_t a = 0; a < alphas.size(); ++a) {
      const auto expansion = derivative_expansion(A, alphas[a]);
      for (int k = 0; k < atlas.rank; ++k) {
        double transported = 0.0;
        for (int c = 0; c < atlas.rank; ++c) {
          const double w = phi(k, c);
          if (w == 0.0) continue;
          double owner_value = 0.0;
          for (const auto& [gamma, coeff] : expansion) {
            const int rank_of_gamma = multi_index_rank(MultiIndex(gamma), section.order);
            owner_value += coeff * table[static_cast<size_t>(c)][static_cast<size_t>(rank_of_gamma)];
          }
          transported += w * owner_value;
        }
        per_component[static_cast<size_t>(k)][a] = transported;
      }
    }
    out.push_back(std::vector<double>(static_cast<size_t>(atlas.rank) * alphas.size()));
    auto& flat = out.back();
    for (int k = 0; k < atlas.rank; ++k) {
      for (size_t a = 0; a < alphas.size(); ++a) {
        flat[static_cast<size_t>(k) * alphas.size() + a] = per_component[static_cast<size_t>(k)][a];
      }
    }
  }
  return out;
}

}  // namespace

// --- mixing -------------------------------------------------------------------

LocalSectionFamily mixing_map(const LocalSectionFamily& family, const AtlasBundle& atlas) {
  if (family.stage == FamilyStage::OnC)
    throw IndexingError("mixing_map expects chart-stage representatives");
  LocalSectionFamily out;
  out.stage = FamilyStage::OnV;
  out.reps.resize(atlas.charts.size());

  for (int i = 0; i < atlas.chart_count(); ++i) {
    const auto neighbors = atlas.neighbors(i);
    bool any = false;
    for (int j : neighbors) {
      if (family.support.covers(j) && family.reps[static_cast<size_t>(j)].active) any = true;
    }
    if (!any) continue;

    // copies keep the closure self-contained and immutable
    auto reps = family.reps;
    const AtlasBundle* atlas_ptr = &atlas;
    const int chart = i;
    ChartRep mixed;
    mixed.active = true;
    mixed.value = [reps, atlas_ptr, chart, neighbors](const Vec& x) -> Vec {
      const AtlasBundle& a = *atlas_ptr;
      const auto sample_id = a.sample_lookup(chart, x);

      // terms chi_j, t_j = Phi_ij rep_j, anchored at the largest chi so a
      // family that already agrees passes through bitwise; at registered
      // samples every chart works from the same stored coordinates
      std::vector<double> weights;
      std::vector<Vec> terms;
      for (int j : neighbors) {
        Vec x_j;
        if (sample_id) {
          const Vec* registered = a.samples[static_cast<size_t>(*sample_id)].coords_in(j);
          if (registered == nullptr) continue;  // outside U_j, so chi_j vanishes
          x_j = *registered;
        } else {
          if (j != chart) {
            x_j = a.to_chart(chart, j, x);
            if (!a.charts[static_cast<size_t>(j)].u_box.contains(x_j, 1e-12)) continue;
          } else {
            x_j = x;
          }
        }
        const double w = a.chi[static_cast<size_t>(j)](x_j);
        if (w == 0.0) continue;
        const ChartRep& rep = reps[static_cast<size_t>(j)];
        Vec t = rep.active ? rep.value(x_j) : Vec::Zero(a.rank);
        if (j != chart) {
          const Mat phi = a.phi(chart, j, x);
          if (!phi.isIdentity(0.0)) t = phi * t;
        }
        weights.push_back(w);
        terms.push_back(std::move(t));
      }
      if (terms.empty()) return Vec::Zero(a.rank);
      size_t anchor = 0;
      for (size_t k = 1; k < weights.size(); ++k) {
        if (weights[k] > weights[anchor]) anchor = k;
      }
      Vec h = terms[anchor];
      for (size_t k = 0; k < terms.size(); ++k) {
        if (k == anchor) continue;
        h += weights[k] * (terms[k] - terms[anchor]);
      }
      return h;
    };
    out.reps[static_cast<size_t>(i)] = std::move(mixed);
    out.support.charts.push_back(i);
  }
  return out;
}

// --- compatibility --------------------------------------------------------------

CompatibilityReport compatibility_check(const LocalSectionFamily& family,
                                        const AtlasBundle& atlas, double tolerance) {
  (void)tolerance;
  CompatibilityReport report;
  for (int id = 0; id < static_cast<int>(atlas.samples.size()); ++id) {
    const AtlasSample& s = atlas.samples[static_cast<size_t>(id)];
    const auto& cc = s.chart_coords;
    for (size_t a = 0; a < cc.size(); ++a) {
      for (size_t b = a + 1; b < cc.size(); ++b) {
        const auto [i, x_i] = cc[a];
        const auto [j, x_j] = cc[b];
        if (family.stage == FamilyStage::OnV) {
          if (!atlas.charts[static_cast<size_t>(i)].v_box.contains(x_i, 1e-12)) continue;
          if (!atlas.charts[static_cast<size_t>(j)].v_box.contains(x_j, 1e-12)) continue;
        }
        const Vec lhs = family.value(atlas, i, x_i);
        const Vec rhs = atlas.phi(i, j, x_i) * family.value(atlas, j, x_j);
        const double defect = (lhs - rhs).cwiseAbs().maxCoeff();
        auto key = std::make_pair(i, j);
        report.per_pair[key] = std::max(report.per_pair[key], defect);
        if (defect > report.max_defect) {
          report.max_defect = defect;
          report.worst_sample = id;
          report.worst_pair = key;
        }
      }
    }
  }
  return report;
}

// --- extension -------------------------------------------------------------------

LocalSectionFamily local_extend(const SectionOnC& section, const AtlasBundle& atlas,
                                const AtlasClosedSet& c_set,
                                const LocalExtendOptions& options) {
  LocalSectionFamily out;
  out.stage = FamilyStage::OnU;
  out.reps.resize(atlas.charts.size());

  const auto alphas = multi_indices_up_to(atlas.dimension, section.order);
  // rows of the section table per chart
  std::vector<std::vector<int>> rows_per_chart(atlas.charts.size());
  for (size_t row = 0; row < section.sample_ids.size(); ++row) {
    const AtlasSample& s =
        atlas.samples[static_cast<size_t>(section.sample_ids[row])];
    for (const auto& [chart, x] : s.chart_coords) {
      (void)x;
      rows_per_chart[static_cast<size_t>(chart)].push_back(static_cast<int>(row));
    }
  }

  for (int i = 0; i < atlas.chart_count(); ++i) {
    const auto& piece = c_set.per_chart[static_cast<size_t>(i)];
    if (!piece.has_value() || rows_per_chart[static_cast<size_t>(i)].empty()) {
      continue;  // empty chart piece extends to the zero map
    }
    const SampledClosedSet& chart_set = *piece;

    if (options.verify_cusp) {
      const auto boundary = chart_set.boundary_samples();
      const auto cusp = check_outward_cusps(chart_set, boundary, 0.12, 0.3, 1.0,
                                            {0.06, 0.03}, 128);
      if (!cusp.ok) {
        std::ostringstream os;
        os << "chart " << i << " failed the outward-cusp check at eps = "
           << cusp.violation->eps;
        throw GeometryError(os.str());
      }
      std::vector<Vec> K = chart_set.samples;
      if (K.size() > 24) K.resize(24);
      const auto fjords =
          check_no_narrow_fjords(chart_set, chart_set.samples.front(), 1, 0.5, K, 80);
      if (!fjords.ok) {
        std::ostringstream os;
        os << "chart " << i << " failed the no-narrow-fjords check";
        throw GeometryError(os.str());
      }
    }

    // jets per bundle component on the chart piece, transported from the
    // canonical tables
    const auto tables = transport_tables(section, atlas, i, rows_per_chart[static_cast<size_t>(i)]);
    std::vector<Vec> points;
    for (int row : rows_per_chart[static_cast<size_t>(i)]) {
      const AtlasSample& s =
          atlas.samples[static_cast<size_t>(section.sample_ids[static_cast<size_t>(row)])];
      points.push_back(*s.coords_in(i));
    }

    double max_side = options.max_side;
    const Box& u_box = atlas.charts[static_cast<size_t>(i)].u_box;
    if (max_side <= 0.0) max_side = (u_box.hi - u_box.lo).maxCoeff() / 4.0;

    const auto decomp = whitney_decompose(chart_set, u_box, options.min_side, max_side);
    std::vector<WhitneyExtension> extensions;
    for (int k = 0; k < atlas.rank; ++k) {
      std::vector<std::vector<double>> values;
      for (const auto& flat : tables) {
        values.push_back(std::vector<double>(flat.begin() + static_cast<long>(k * alphas.size()),
                                             flat.begin() + static_cast<long>((k + 1) * alphas.size())));
      }
      JetField jet(section.order, atlas.dimension, points, std::move(values));
      WhitneyExtensionOptions ext_options;
      ext_options.bumps = options.bumps;
      extensions.push_back(extend_jet(std::move(jet), decomp, chart_set, ext_options));
    }

    ChartRep rep;
    rep.active = true;
    const int rank = atlas.rank;
    rep.value = [extensions, rank](const Vec& x) -> Vec {
      Vec v(rank);
      for (int k = 0; k < rank; ++k) v[k] = extensions[static_cast<size_t>(k)](x);
      return v;
    };
    out.reps[static_cast<size_t>(i)] = std::move(rep);
    out.support.charts.push_back(i);
  }
  return out;
}

// --- glue ------------------------------------------------------------------------

Vec GlobalSection::at_sample(const AtlasBundle& atlas, int sample_id) const {
  const AtlasSample& s = atlas.samples[static_cast<size_t>(sample_id)];
  int best_chart = -1;
  double best_chi = -1.0;
  const Vec* best_coords = nullptr;
  for (const auto& [chart, x] : s.chart_coords) {
    const double c = atlas.chi[static_cast<size_t>(chart)](x);
    if (c > best_chi) {
      best_chi = c;
      best_chart = chart;
      best_coords = &x;
    }
  }
  const ChartRep& rep = reps[static_cast<size_t>(best_chart)];
  if (!rep.active) return Vec::Zero(atlas.rank);
  return rep.value(*best_coords);
}

GlobalSection glue(const LocalSectionFamily& family, const AtlasBundle& atlas,
                   double tolerance) {
  const auto report = compatibility_check(family, atlas);
  if (report.max_defect > tolerance) {
    std::ostringstream os;
    os << "glue: overlap defect " << report.max_defect << " beyond tolerance " << tolerance
       << " at sample " << report.worst_sample << " (charts " << report.worst_pair.first
       << ", " << report.worst_pair.second << ")";
    throw GlueError(os.str());
  }
  GlobalSection out;
  out.reps = family.reps;
  out.support = family.support;
  out.glue_defect = report.max_defect;
  return out;
}

double seam_jump_max(const GlobalSection& section, const AtlasBundle& atlas, double h) {
  double worst = 0.0;
  for (const AtlasSample& s : atlas.samples) {
    if (s.chart_coords.size() < 2) continue;
    for (size_t a = 0; a < s.chart_coords.size(); ++a) {
      for (size_t b = a + 1; b < s.chart_coords.size(); ++b) {
        const auto& [ci, xi] = s.chart_coords[a];
        const auto& [cj, xj] = s.chart_coords[b];
        const auto& rep_i = section.reps[static_cast<size_t>(ci)];
        const auto& rep_j = section.reps[static_cast<size_t>(cj)];
        if (!rep_i.active || !rep_j.active) continue;
        if (!atlas.charts[static_cast<size_t>(ci)].v_box.contains(xi, -h)) continue;
        if (!atlas.charts[static_cast<size_t>(cj)].v_box.contains(xj, -h)) continue;
        const Mat phi = atlas.phi(ci, cj, xi);
        const Vec value_gap = rep_i.value(xi) - phi * rep_j.value(xj);
        worst = std::max(worst, value_gap.cwiseAbs().maxCoeff());
        auto slope = [h](const ChartRep& rep, const Vec& x) {
          Vec lo = x, hi = x;
          lo[0] -= h;
          hi[0] += h;
          return ((rep.value(hi) - rep.value(lo)) / (2.0 * h)).eval();
        };
        const Vec slope_gap = slope(rep_i, xi) - phi * slope(rep_j, xj);
        worst = std::max(worst, slope_gap.cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

GlobalSection global_extension_operator(const SectionOnC& section, const AtlasBundle& atlas,
                                        const AtlasClosedSet& c_set,
                                        const LocalExtendOptions& options) {
  const auto extended = local_extend(section, atlas, c_set, options);
  const auto mixed = mixing_map(extended, atlas);
  return glue(mixed, atlas);
}

// --- concrete atlases ---------------------------------------------------------------

namespace {

constexpr double kChartHalf = 1.35;
constexpr double kShrunkenHalf = 0.85;
constexpr double kRampLo = 0.16;  // ramp between charts i, i+1 spans [i+0.16, i+0.84]

double line_ramp(double t, int k) { return smooth_step((t - (k + kRampLo)) / 0.68); }

}  // namespace

AtlasBundle make_line_atlas(int n_charts, int rank, double sample_spacing) {
  if (n_charts < 1) throw ArgumentError("line atlas needs at least one chart");
  AtlasBundle atlas;
  atlas.name = "line_atlas_" + std::to_string(n_charts);
  atlas.dimension = 1;
  atlas.rank = rank;

  for (int i = 0; i < n_charts; ++i) {
    AtlasChart chart;
    chart.u_box = make_box({-kChartHalf}, {kChartHalf});
    chart.v_box = make_box({-kShrunkenHalf}, {kShrunkenHalf});
    atlas.charts.push_back(chart);
    const int chart_index = i;
    const int last = n_charts - 1;
    atlas.chi.push_back([chart_index, last](const Vec& x) {
      const double t = x[0] + chart_index;
      const double left = (chart_index == 0) ? 1.0 : line_ramp(t, chart_index - 1);
      const double right = (chart_index == last) ? 0.0 : line_ramp(t, chart_index);
      return left - right;
    });
  }
  for (int i = 0; i < n_charts; ++i) {
    for (int j = 0; j < n_charts; ++j) {
      if (i == j || std::abs(i - j) > 2) continue;  // farther charts never meet
      ChartTransition transition;
      const double shift = static_cast<double>(i - j);
      transition.forward = [shift](const Vec& x) {
        Vec y = x;
        y[0] += shift;
        return y;
      };
      transition.linear = Mat::Identity(1, 1);
      atlas.transitions[{i, j}] = transition;
    }
  }

  // shared sample grid over the union of the shrunken charts
  const double t_lo = -kShrunkenHalf;
  const double t_hi = (n_charts - 1) + kShrunkenHalf;
  const int count = static_cast<int>(std::round((t_hi - t_lo) / sample_spacing));
  for (int k = 0; k <= count; ++k) {
    const double t = t_lo + (t_hi - t_lo) * k / count;
    AtlasSample sample;
    for (int i = 0; i < n_charts; ++i) {
      const double x = t - i;
      if (std::abs(x) < kChartHalf - 1e-9) sample.chart_coords.push_back({i, make_vec({x})});
    }
    if (!sample.chart_coords.empty()) atlas.samples.push_back(std::move(sample));
  }
  atlas.build_sample_lookup();
  return atlas;
}

namespace {

constexpr double kArcPad = 0.7;    // chart arcs exceed the half-circle by this
constexpr double kArcShrink = 0.45;
constexpr double kArcRamp = 0.44;  // chi ramps over +-0.44 around the seams

// chi_0 on the lifted parameter range [0.44, 2*pi + 0.44)
double circle_chi0(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double lifted = theta;
  while (lifted < kArcRamp) lifted += two_pi;
  while (lifted >= two_pi + kArcRamp) lifted -= two_pi;
  const double s_a =
      smooth_step((lifted - (std::numbers::pi - kArcRamp)) / (2.0 * kArcRamp));
  const double s_b = smooth_step((lifted - (two_pi - kArcRamp)) / (2.0 * kArcRamp));
  return (1.0 - s_a) + s_b;
}

}  // namespace

AtlasBundle make_circle_atlas(int rank, double sample_spacing) {
  const double pi = std::numbers::pi;
  const double two_pi = 2.0 * pi;
  AtlasBundle atlas;
  atlas.name = "circle_atlas";
  atlas.dimension = 1;
  atlas.rank = rank;

  AtlasChart chart0;
  chart0.u_box = make_box({-kArcPad}, {pi + kArcPad});
  chart0.v_box = make_box({-kArcShrink}, {pi + kArcShrink});
  AtlasChart chart1;
  chart1.u_box = make_box({pi - kArcPad}, {two_pi + kArcPad});
  chart1.v_box = make_box({pi - kArcShrink}, {two_pi + kArcShrink});
  atlas.charts = {chart0, chart1};

  atlas.chi.push_back([](const Vec& x) { return circle_chi0(x[0]); });
  atlas.chi.push_back([](const Vec& x) { return 1.0 - circle_chi0(x[0]); });

  ChartTransition to1;  // chart-0 coords in (-0.7, pi + 0.7)
  to1.forward = [pi, two_pi](const Vec& x) {
    Vec y = x;
    if (x[0] < pi / 2.0) y[0] += two_pi;  // seam component near theta = 0
    return y;
  };
  to1.linear = Mat::Identity(1, 1);
  ChartTransition to0;  // chart-1 coords in (pi - 0.7, 2*pi + 0.7)
  to0.forward = [pi, two_pi](const Vec& x) {
    Vec y = x;
    if (x[0] > 1.5 * pi) y[0] -= two_pi;
    return y;
  };
  to0.linear = Mat::Identity(1, 1);
  atlas.transitions[{0, 1}] = to1;
  atlas.transitions[{1, 0}] = to0;

  const int count = std::max(16, static_cast<int>(std::round(two_pi / sample_spacing)));
  for (int k = 0; k < count; ++k) {
    const double theta = two_pi * k / count;
    AtlasSample sample;
    if (theta < pi + kArcPad - 1e-9) {
      sample.chart_coords.push_back({0, make_vec({theta})});
    } else if (theta > two_pi - kArcPad + 1e-9) {
      sample.chart_coords.push_back({0, make_vec({theta - two_pi})});
    }
    if (theta > pi - kArcPad + 1e-9) {
      sample.chart_coords.push_back({1, make_vec({theta})});
    } else if (theta < kArcPad - 1e-9) {
      sample.chart_coords.push_back({1, make_vec({theta + two_pi})});
    }
    if (!sample.chart_coords.empty()) atlas.samples.push_back(std::move(sample));
  }
  atlas.build_sample_lookup();
  return atlas;
}

namespace {

// 1d closed-interval piece of C in one chart, sampled on the atlas grid
SampledClosedSet interval_piece(const AtlasBundle& atlas, int chart, double lo, double hi,
                                const std::vector<std::pair<int, Vec>>& chart_samples,
                                double spacing) {
  SampledClosedSet set;
  set.name = atlas.name + "_C_chart" + std::to_string(chart);
  set.dimension = 1;
  set.resolution = spacing;
  set.membership = [lo, hi](const Vec& x) { return x[0] >= lo - 1e-12 && x[0] <= hi + 1e-12; };
  set.interior = [lo, hi](const Vec& x) { return x[0] > lo + 1e-9 && x[0] < hi - 1e-9; };
  set.bounding_box = make_box({lo}, {hi});
  for (const auto& [id, x] : chart_samples) {
    (void)id;
    set.samples.push_back(x);
    const bool boundary = std::abs(x[0] - lo) < spacing / 4.0 || std::abs(x[0] - hi) < spacing / 4.0;
    set.boundary_tag.push_back(boundary);
  }
  return set;
}

}  // namespace

AtlasClosedSet make_interval_subset(const AtlasBundle& atlas, double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("interval subset needs lo < hi");
  AtlasClosedSet out;
  out.per_chart.resize(atlas.charts.size());

  // snap endpoints to the registered sample grid (owner-chart parameter)
  const bool circle = atlas.name == "circle_atlas";
  auto global_of = [&](const AtlasSample& s) {
    const auto& [chart, x] = s.chart_coords.front();
    if (circle) {
      double theta = x[0];
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      return theta;
    }
    return x[0] + chart;
  };

  double snapped_lo = 1e300, snapped_hi = -1e300;
  for (const AtlasSample& s : atlas.samples) {
    const double t = global_of(s);
    if (std::abs(t - lo) < std::abs(snapped_lo - lo)) snapped_lo = t;
    if (std::abs(t - hi) < std::abs(snapped_hi - hi)) snapped_hi = t;
  }

  std::vector<std::vector<std::pair<int, Vec>>> per_chart_samples(atlas.charts.size());
  double spacing = 1e300;
  double prev = 1e300;
  for (int id = 0; id < static_cast<int>(atlas.samples.size()); ++id) {
    const AtlasSample& s = atlas.samples[static_cast<size_t>(id)];
    const double t = global_of(s);
    if (prev != 1e300) spacing = std::min(spacing, std::abs(t - prev));
    prev = t;
    if (t < snapped_lo - 1e-12 || t > snapped_hi + 1e-12) continue;
    out.sample_ids.push_back(id);
    for (const auto& [chart, x] : s.chart_coords) {
      per_chart_samples[static_cast<size_t>(chart)].push_back({id, x});
    }
  }
  if (out.sample_ids.empty()) throw ArgumentError("interval subset contains no samples");

  for (int chart = 0; chart < atlas.chart_count(); ++chart) {
    const auto& samples = per_chart_samples[static_cast<size_t>(chart)];
    if (samples.empty()) continue;
    double chart_lo = 1e300, chart_hi = -1e300;
    for (const auto& [id, x] : samples) {
      (void)id;
      chart_lo = std::min(chart_lo, x[0]);
      chart_hi = std::max(chart_hi, x[0]);
    }
    out.per_chart[static_cast<size_t>(chart)] =
        interval_piece(atlas, chart, chart_lo, chart_hi, samples, spacing);
  }
  return out;
}

LocalSectionFamily make_parameter_section(
    const AtlasBundle& atlas, const std::function<double(int, double, int)>& profile) {
  const bool line = atlas.name.rfind("line_atlas", 0) == 0;
  LocalSectionFamily family;
  family.stage = FamilyStage::OnU;
  family.reps.resize(atlas.charts.size());
  for (int i = 0; i < atlas.chart_count(); ++i) {
    const double base = line ? static_cast<double>(i) : 0.0;
    const int rank = atlas.rank;
    ChartRep rep;
    rep.active = true;
    rep.value = [profile, base, rank](const Vec& x) {
      Vec v(rank);
      for (int k = 0; k < rank; ++k) v[k] = profile(k, x[0] + base, 0);
      return v;
    };
    rep.partial = [profile, base, rank](const Vec& x, const MultiIndex& alpha) {
      Vec v(rank);
      for (int k = 0; k < rank; ++k) v[k] = profile(k, x[0] + base, alpha.order());
      return v;
    };
    family.reps[static_cast<size_t>(i)] = std::move(rep);
    family.support.charts.push_back(i);
  }
  return family;
}

LocalSectionFamily make_incompatible_family(const AtlasBundle& atlas, std::uint64_t seed) {
  LocalSectionFamily family;
  family.stage = FamilyStage::OnU;
  family.reps.resize(atlas.charts.size());
  std::mt19937_64 rng(seed);
  for (int i = 0; i < atlas.chart_count(); ++i) {
    std::vector<Polynomial> components;
    for (int k = 0; k < atlas.rank; ++k)
      components.push_back(Polynomial::random(atlas.dimension, 3, rng));
    ChartRep rep;
    rep.active = true;
    rep.value = [components](const Vec& x) {
      Vec v(static_cast<int>(components.size()));
      for (size_t k = 0; k < components.size(); ++k) v[static_cast<int>(k)] = components[k](x);
      return v;
    };
    rep.partial = [components](const Vec& x, const MultiIndex& alpha) {
      Vec v(static_cast<int>(components.size()));
      for (size_t k = 0; k < components.size(); ++k)
        v[static_cast<int>(k)] = components[k].partial(x, alpha);
      return v;
    };
    family.reps[static_cast<size_t>(i)] = std::move(rep);
    family.support.charts.push_back(i);
  }
  return family;
}

}  // namespace wkit
