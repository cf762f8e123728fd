#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wkit/domain.hpp"
#include "wkit/geometry.hpp"
#include "wkit/jet.hpp"
#include "wkit/whitney.hpp"

namespace wkit {

/// Chart image boxes: the working image U_i and the shrunken V_i with
/// closure(V_i) inside U_i.
struct AtlasChart {
  Box u_box;
  Box v_box;
};

/// Change of charts on an overlap. `forward` maps chart-i coordinates to
/// chart-j coordinates; `linear` is the (constant) derivative when the map is
/// affine, possibly piecewise per overlap component.
struct ChartTransition {
  std::function<Vec(const Vec&)> forward;
  Mat linear;  // constant Jacobian; identity for translations
  bool affine = true;
};

/// A manifold point known to every chart containing it. The first entry is
/// the owner chart: canonical evaluations happen there.
struct AtlasSample {
  std::vector<std::pair<int, Vec>> chart_coords;

  int owner() const { return chart_coords.front().first; }
  const Vec& owner_coords() const { return chart_coords.front().second; }
  const Vec* coords_in(int chart) const {
    for (const auto& [c, x] : chart_coords) {
      if (c == chart) return &x;
    }
    return nullptr;
  }
};

/// Atlas with subordinate partition of unity and bundle trivialization
/// transitions. Charts are finite in number; local finiteness is recorded as
/// the max number of charts per sample.
class AtlasBundle {
 public:
  std::string name;
  int dimension = 1;
  int rank = 1;
  std::vector<AtlasChart> charts;
  std::map<std::pair<int, int>, ChartTransition> transitions;
  /// chi[i] evaluated in chart i's own coordinates; 0 outside V_i.
  std::vector<std::function<double(const Vec&)>> chi;
  /// Phi_ij evaluated at chart-i coordinates: rep_i(x) = Phi_ij(x) rep_j(.).
  std::map<std::pair<int, int>, std::function<Mat(const Vec&)>> bundle_transitions;
  std::vector<AtlasSample> samples;

  int chart_count() const { return static_cast<int>(charts.size()); }
  /// J_i = {j : U_j and U_i overlap}, including i itself.
  std::vector<int> neighbors(int i) const;
  Vec to_chart(int from, int to, const Vec& x) const;
  Mat transition_linear(int from, int to) const;
  Mat phi(int i, int j, const Vec& x_in_i) const;
  /// chi_j at a point given in chart-i coordinates (0 when outside U_j).
  double chi_at(int j, int i, const Vec& x_in_i) const;
  int local_finiteness_bound() const;

  /// Exact-coordinate lookup of a registered sample in a chart; pipeline
  /// evaluations at registered samples route through the registry so every
  /// chart sees bitwise-identical coordinates.
  std::optional<int> sample_lookup(int chart, const Vec& x) const;
  void build_sample_lookup();

 private:
  std::vector<std::map<std::vector<double>, int>> lookup_;
};

struct AtlasInvariantReport {
  double cocycle_defect = 0.0;        // on sampled triple overlaps
  double pou_sum_defect = 0.0;        // |sum chi - 1| on samples
  double pou_support_defect = 0.0;    // chi mass outside V_i
  int local_finiteness = 0;
};

AtlasInvariantReport check_atlas_invariants(const AtlasBundle& atlas);

/// The closed subset C seen through the atlas: per chart, a sampled closed
/// set in chart coordinates (absent when C misses the chart).
struct AtlasClosedSet {
  std::vector<std::optional<SampledClosedSet>> per_chart;
  /// ids of atlas samples lying in C
  std::vector<int> sample_ids;
};

enum class FamilyStage { OnU, OnV, OnC };

/// Per-chart local representative: a rank-vector-valued callable in chart
/// coordinates, optionally with closed-form partial derivatives
/// (component-wise, per multi-index).
struct ChartRep {
  bool active = false;  // inactive means identically zero on the chart
  std::function<Vec(const Vec&)> value;
  std::function<Vec(const Vec&, const MultiIndex&)> partial;
};

/// Charts where a family may be non-zero; everything else is the zero array.
struct CompactSupportTag {
  std::vector<int> charts;

  bool covers(int chart) const;
};

struct LocalSectionFamily {
  FamilyStage stage = FamilyStage::OnU;
  std::vector<ChartRep> reps;
  CompactSupportTag support;

  Vec value(const AtlasBundle& atlas, int chart, const Vec& x) const;
};

/// Canonical jet data of a section restricted to C: one row per C-sample,
/// evaluated in the sample's owner chart.
struct SectionOnC {
  int order = 0;
  std::vector<int> sample_ids;
  std::vector<Vec> values;                              // order-0, canonical
  std::vector<std::vector<std::vector<double>>> partials;  // [sample][component][alpha]
};

/// res_C at jet order m: materializes owner-chart values and partials of the
/// family on C's samples.
SectionOnC restrict_section(const LocalSectionFamily& family, const AtlasBundle& atlas,
                            const AtlasClosedSet& c_set, int m);

/// The mixing map: h_i = sum_{j in J_i} chi_j * (Phi_ij rep_j) on V_i, each
/// summand extended by zero off V_j. The sum is evaluated anchored at its
/// largest-chi term, so families that already agree pass through bitwise.
LocalSectionFamily mixing_map(const LocalSectionFamily& family, const AtlasBundle& atlas);

struct CompatibilityReport {
  double max_defect = 0.0;
  std::map<std::pair<int, int>, double> per_pair;
  int worst_sample = -1;
  std::pair<int, int> worst_pair{-1, -1};
};

/// Max overlap defect |rep_i - Phi_ij rep_j| over shared samples (stage
/// selects which samples count).
CompatibilityReport compatibility_check(const LocalSectionFamily& family,
                                        const AtlasBundle& atlas, double tolerance = 0.0);

struct LocalExtendOptions {
  double min_side = 1.0 / 128.0;
  double max_side = 0.35;  // defaults match unit-box chart images
  /// verify the cusp condition on every nonempty chart piece before extending
  bool verify_cusp = false;
  BumpSystem bumps;
};

/// Per-chart Whitney extension of the restricted section: empty chart pieces
/// extend to zero, others get one extension per bundle component.
LocalSectionFamily local_extend(const SectionOnC& section, const AtlasBundle& atlas,
                                const AtlasClosedSet& c_set, const LocalExtendOptions& options = {});

/// Glued section: per-chart representatives plus the largest-chi evaluation
/// rule. Produced by glue() after compatibility passes.
struct GlobalSection {
  std::vector<ChartRep> reps;
  CompactSupportTag support;
  double glue_defect = 0.0;

  /// evaluate at an atlas sample, preferring the chart with the largest chi
  Vec at_sample(const AtlasBundle& atlas, int sample_id) const;
};

GlobalSection glue(const LocalSectionFamily& family, const AtlasBundle& atlas,
                   double tolerance = 1e-8);

/// Largest cross-chart gap of values and central-difference slopes of a glued
/// section over overlap samples (step h along the first coordinate).
double seam_jump_max(const GlobalSection& section, const AtlasBundle& atlas, double h);

/// Theorem-A composite: glue after mixing after per-chart extension of the
/// restricted section.
GlobalSection global_extension_operator(const SectionOnC& section, const AtlasBundle& atlas,
                                        const AtlasClosedSet& c_set,
                                        const LocalExtendOptions& options = {});

// --- concrete atlases ------------------------------------------------------

/// Chain of overlapping interval charts on the real line, chart i centered at
/// t = i with translated chart coordinates. sample_spacing controls the
/// shared sample grid.
AtlasBundle make_line_atlas(int n_charts, int rank = 1, double sample_spacing = 2e-2);

/// Two-arc atlas of the circle (global parameter theta in [0, 2*pi)), with
/// piecewise-translation transitions and an exact-complement partition of
/// unity.
AtlasBundle make_circle_atlas(int rank = 1, double sample_spacing = 1e-2);

/// Closed global-parameter interval [lo, hi] as a closed subset of a line or
/// circle atlas built by the helpers above.
AtlasClosedSet make_interval_subset(const AtlasBundle& atlas, double lo, double hi);

/// Compatible section from per-component smooth profiles of the global
/// parameter: profile(component, t, derivative_order).
LocalSectionFamily make_parameter_section(
    const AtlasBundle& atlas, const std::function<double(int, double, int)>& profile);

/// Independent random per-chart polynomials: deliberately incompatible input
/// for the mixing map.
LocalSectionFamily make_incompatible_family(const AtlasBundle& atlas, std::uint64_t seed);

}  // namespace wkit
