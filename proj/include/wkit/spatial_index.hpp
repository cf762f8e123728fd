#pragma once

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "wkit/geometry.hpp"

namespace wkit {

/// Uniform-cell spatial hash over a fixed point list; supports range and
/// exact nearest-point queries (lexicographic tie-break).
class SpatialIndex {
 public:
  SpatialIndex(const std::vector<Vec>* points, double cell) : points_(points), cell_(cell) {
    for (int i = 0; i < static_cast<int>(points_->size()); ++i)
      cells_[key((*points_)[static_cast<size_t>(i)])].push_back(i);
  }

  std::vector<int> within(const Vec& center, double radius) const {
    std::vector<int> out;
    visit_cells(center, radius, [&](int idx) {
      if (((*points_)[static_cast<size_t>(idx)] - center).norm() <= radius) out.push_back(idx);
    });
    return out;
  }

  int nearest(const Vec& x) const {
    const double diag = std::sqrt(static_cast<double>(x.size()));
    double radius = cell_;
    while (true) {
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      visit_cells(x, radius, [&](int idx) {
        const Vec& p = (*points_)[static_cast<size_t>(idx)];
        const double d = (p - x).norm();
        if (d < best_d ||
            (d == best_d && best >= 0 && lex_less(p, (*points_)[static_cast<size_t>(best)]))) {
          best_d = d;
          best = idx;
        }
      });
      // a hit is only conclusive once the scanned shell covers its distance
      if (best >= 0 && best_d <= radius) return best;
      if (radius > 1e12 * (cell_ + 1.0)) return best;
      radius = (best >= 0) ? best_d + cell_ * diag : radius * 2.0;
    }
  }

  double nearest_distance(const Vec& x) const {
    const int i = nearest(x);
    return i < 0 ? std::numeric_limits<double>::infinity()
                 : ((*points_)[static_cast<size_t>(i)] - x).norm();
  }

 private:
  template <typename F>
  void visit_cells(const Vec& center, double radius, F&& fn) const {
    const int d = static_cast<int>(center.size());
    std::vector<long> lo(static_cast<size_t>(d)), hi(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
      lo[static_cast<size_t>(i)] = static_cast<long>(std::floor((center[i] - radius) / cell_));
      hi[static_cast<size_t>(i)] = static_cast<long>(std::floor((center[i] + radius) / cell_));
    }
    std::vector<long> it = lo;
    while (true) {
      const auto found = cells_.find(pack(it));
      if (found != cells_.end()) {
        for (int idx : found->second) fn(idx);
      }
      int axis = 0;
      while (axis < d) {
        if (++it[static_cast<size_t>(axis)] <= hi[static_cast<size_t>(axis)]) break;
        it[static_cast<size_t>(axis)] = lo[static_cast<size_t>(axis)];
        ++axis;
      }
      if (axis == d) break;
    }
  }

  std::string key(const Vec& p) const {
    std::vector<long> cell(static_cast<size_t>(p.size()));
    for (int i = 0; i < p.size(); ++i)
      cell[static_cast<size_t>(i)] = static_cast<long>(std::floor(p[i] / cell_));
    return pack(cell);
  }

  static std::string pack(const std::vector<long>& cell) {
    std::string s;
    s.reserve(cell.size() * sizeof(long));
    for (long c : cell) s.append(reinterpret_cast<const char*>(&c), sizeof(long));
    return s;
  }

  const std::vector<Vec>* points_;
  double cell_;
  std::unordered_map<std::string, std::vector<int>> cells_;
};

}  // namespace wkit
