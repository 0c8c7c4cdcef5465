#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <json.hpp>

#include "tlp/errors.hpp"

namespace tlp::jsonu {

using json = nlohmann::json;

inline json parse_text(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
}

inline json load_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw IoError("file not found: " + path.string());
  }
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_text(text, path.string());
}

inline const json& require(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(ctx + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

inline double require_double(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_number()) throw ParseError(ctx + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline std::int64_t require_int(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_number_integer()) throw ParseError(ctx + ": field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::string require_string(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_string()) throw ParseError(ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline Eigen::Vector3d as_vec3(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number()) {
    throw ParseError(ctx + " must be an array of 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline Eigen::Vector3d require_vec3(const json& obj, const char* key, const std::string& ctx) {
  return as_vec3(require(obj, key, ctx), ctx + ": field '" + key + "'");
}

inline json vec3_to_json(const Eigen::Vector3d& v) {
  return json::array({v.x(), v.y(), v.z()});
}

}  // namespace tlp::jsonu
