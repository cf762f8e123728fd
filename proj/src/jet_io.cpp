#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "wkit/errors.hpp"
#include "wkit/jet.hpp"

namespace wkit {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_text(const JetField& jet) {
  std::ostringstream os;
  os << "# order " << jet.order() << " dimension " << jet.dimension() << "\n";
  const auto& idx = jet.index_set();
  for (int p = 0; p < jet.point_count(); ++p) {
    const Vec& x = jet.point(p);
    for (int i = 0; i < jet.dimension(); ++i) {
      if (i) os << ' ';
      os << format_double(x[i]);
    }
    os << " |";
    for (size_t k = 0; k < idx.size(); ++k) {
      os << ' ' << idx[k].to_string() << ": " << format_double(jet.value(p, static_cast<int>(k)));
    }
    os << '\n';
  }
  return os.str();
}

JetField jet_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("empty jet text");
  int order = -1, dimension = -1;
  {
    std::istringstream hs(line);
    std::string hash, kw;
    hs >> hash >> kw >> order >> kw >> dimension;
    if (hash != "#" || order < 0 || dimension < 1)
      throw ArgumentError("bad jet text header: " + line);
  }
  std::vector<Vec> points;
  std::vector<std::vector<double>> values;
  const auto idx = multi_indices_up_to(dimension, order);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vec x(dimension);
    for (int i = 0; i < dimension; ++i) ls >> x[i];
    std::string bar;
    ls >> bar;
    if (bar != "|") throw ArgumentError("bad jet text line: " + line);
    std::vector<double> row(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) {
      std::string key;
      double v;
      ls >> key >> v;
      if (key != idx[k].to_string() + ":")
        throw ArgumentError("jet text multi-index out of order: " + key);
      row[k] = v;
    }
    points.push_back(std::move(x));
    values.push_back(std::move(row));
  }
  return JetField(order, dimension, std::move(points), std::move(values));
}

std::string to_json_string(const JetField& jet) {
  nlohmann::json j;
  j["order"] = jet.order();
  j["dimension"] = jet.dimension();
  auto points = nlohmann::json::array();
  auto values = nlohmann::json::array();
  for (int p = 0; p < jet.point_count(); ++p) {
    auto pt = nlohmann::json::array();
    for (int i = 0; i < jet.dimension(); ++i) pt.push_back(jet.point(p)[i]);
    points.push_back(std::move(pt));
    values.push_back(jet.values_at(p));
  }
  j["points"] = std::move(points);
  j["values"] = std::move(values);
  return j.dump();
}

JetField jet_from_json_string(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int order = j.at("order").get<int>();
  const int dimension = j.at("dimension").get<int>();
  std::vector<Vec> points;
  std::vector<std::vector<double>> values;
  for (const auto& pt : j.at("points")) {
    Vec x(dimension);
    for (int i = 0; i < dimension; ++i) x[i] = pt.at(static_cast<size_t>(i)).get<double>();
    points.push_back(std::move(x));
  }
  for (const auto& row : j.at("values")) values.push_back(row.get<std::vector<double>>());
  return JetField(order, dimension, std::move(points), std::move(values));
}

}  // namespace wkit
