#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "wkit/geometry.hpp"

namespace wkit {

/// Multi-index alpha in N_0^d with the usual |alpha|, alpha! and x^alpha.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> entries);
  static MultiIndex zero(int dimension);

  int dimension() const { return static_cast<int>(entries_.size()); }
  int order() const;
  double factorial() const;
  int operator[](int i) const { return entries_[static_cast<size_t>(i)]; }
  const std::vector<int>& entries() const { return entries_; }

  /// alpha + beta componentwise.
  MultiIndex plus(const MultiIndex& other) const;
  /// alpha with entry i incremented.
  MultiIndex bump(int axis) const;

  /// (y - x)^alpha.
  double monomial(const Vec& diff) const;

  std::string to_string() const;  // "2,0,1"
  static MultiIndex parse(const std::string& text);

  bool operator==(const MultiIndex& other) const = default;
  /// Graded lexicographic order (by |alpha|, then lexicographic).
  bool operator<(const MultiIndex& other) const;

 private:
  std::vector<int> entries_;
};

/// All multi-indices of order <= m in dimension d, graded lexicographic.
/// Size is C(m + d, d).
std::vector<MultiIndex> multi_indices_up_to(int dimension, int order);

/// Number of multi-indices of order <= m in dimension d.
std::int64_t jet_coefficient_count(int dimension, int order);

/// Position of alpha in multi_indices_up_to(alpha.dimension(), order); -1 if |alpha| > order.
int multi_index_rank(const MultiIndex& alpha, int order);

}  // namespace wkit
