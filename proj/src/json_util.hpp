#pragma once

// Field access that reports schema problems with a JSON path.

#include <string>

#include <json.hpp>

#include "fetchsim/errors.hpp"
#include "fetchsim/geometry.hpp"

namespace fetchsim::detail {

using nlohmann::json;

inline std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline const json& require(const json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object()) throw SchemaError(path, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError(path + "." + key, "missing field");
  return *it;
}

template <typename T>
T get(const json& doc, const std::string& key, const std::string& path) {
  const json& v = require(doc, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

template <typename T>
T get_or(const json& doc, const std::string& key, const std::string& path, T fallback) {
  if (!doc.is_object()) throw SchemaError(path, "expected an object");
  return doc.contains(key) ? get<T>(doc, key, path) : fallback;
}

inline const json& require_array(const json& doc, const std::string& key, const std::string& path) {
  const json& v = require(doc, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected an array");
  return v;
}

inline Polygon polygon_from(const json& doc, const std::string& key, const std::string& path) {
  const json& arr = require_array(doc, key, path);
  Polygon out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& p = arr[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw SchemaError(at_index(path + "." + key, i), "expected [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

inline json polygon_to(const Polygon& poly) {
  json arr = json::array();
  for (const auto& p : poly) arr.push_back({p.x, p.y});
  return arr;
}

}  // namespace fetchsim::detail
