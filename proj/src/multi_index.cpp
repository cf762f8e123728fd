#include "wkit/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wkit/errors.hpp"

namespace wkit {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ArgumentError("multi-index needs at least one entry");
  for (int e : entries_) {
    if (e < 0) throw ArgumentError("multi-index entries must be non-negative");
  }
}

MultiIndex MultiIndex::zero(int dimension) {
  return MultiIndex(std::vector<int>(static_cast<size_t>(dimension), 0));
}

int MultiIndex::order() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : entries_) {
    for (int k = 2; k <= e; ++k) f *= k;
  }
  return f;
}

MultiIndex MultiIndex::plus(const MultiIndex& other) const {
  if (other.dimension() != dimension()) throw ArgumentError("multi-index dimension mismatch");
  std::vector<int> sum(entries_);
  for (size_t i = 0; i < sum.size(); ++i) sum[i] += other.entries_[i];
  return MultiIndex(std::move(sum));
}

MultiIndex MultiIndex::bump(int axis) const {
  std::vector<int> e(entries_);
  e[static_cast<size_t>(axis)] += 1;
  return MultiIndex(std::move(e));
}

double MultiIndex::monomial(const Vec& diff) const {
  double p = 1.0;
  for (int i = 0; i < dimension(); ++i) {
    const int e = entries_[static_cast<size_t>(i)];
    for (int k = 0; k < e; ++k) p *= diff[i];
  }
  return p;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (i) os << ',';
    os << entries_[i];
  }
  return os.str();
}

MultiIndex MultiIndex::parse(const std::string& text) {
  std::vector<int> entries;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, ',')) entries.push_back(std::stoi(part));
  return MultiIndex(std::move(entries));
}

bool MultiIndex::operator<(const MultiIndex& other) const {
  const int a = order();
  const int b = other.order();
  if (a != b) return a < b;
  return entries_ < other.entries_;
}

namespace {

void enumerate_of_order(int dimension, int order, std::vector<int>& prefix,
                        std::vector<MultiIndex>& out) {
  if (static_cast<int>(prefix.size()) == dimension - 1) {
    prefix.push_back(order);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int head = order; head >= 0; --head) {
    prefix.push_back(head);
    enumerate_of_order(dimension, order - head, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices_up_to(int dimension, int order) {
  if (dimension < 1) throw ArgumentError("dimension must be positive");
  if (order < 0) throw ArgumentError("order must be non-negative");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<size_t>(jet_coefficient_count(dimension, order)));
  std::vector<int> prefix;
  for (int total = 0; total <= order; ++total) {
    std::vector<MultiIndex> level;
    enumerate_of_order(dimension, total, prefix, level);
    std::sort(level.begin(), level.end(),
              [](const MultiIndex& a, const MultiIndex& b) { return a.entries() < b.entries(); });
    for (auto& mi : level) out.push_back(std::move(mi));
  }
  return out;
}

std::int64_t jet_coefficient_count(int dimension, int order) {
  std::int64_t n = 1;
  for (int k = 1; k <= dimension; ++k) n = n * (order + k) / k;
  return n;
}

int multi_index_rank(const MultiIndex& alpha, int order) {
  if (alpha.order() > order) return -1;
  const auto all = multi_indices_up_to(alpha.dimension(), order);
  for (size_t i = 0; i < all.size(); ++i) {
    if (all[i] == alpha) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace wkit
