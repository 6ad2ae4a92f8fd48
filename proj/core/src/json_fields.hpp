/* Copyright 2026 The offload-tuner Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Strict field access for hand-written JSON documents.

#include <cmath>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "offload/errors.hpp"

namespace offload::detail {

inline void require_object(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::string& path,
                                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ValidationError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline const nlohmann::json& required(const nlohmann::json& j, const std::string& path,
                                      std::string_view key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(join(path, key), "missing required key");
  return *it;
}

inline double as_number(const nlohmann::json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(field, "must be finite");
  return d;
}

inline double number_field(const nlohmann::json& j, const std::string& path, std::string_view key) {
  return as_number(required(j, path, key), join(path, key));
}

inline double number_field_or(const nlohmann::json& j, const std::string& path,
                              std::string_view key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_number(*it, join(path, key));
}

inline std::string string_field(const nlohmann::json& j, const std::string& path,
                                std::string_view key) {
  const auto& v = required(j, path, key);
  if (!v.is_string()) throw ValidationError(join(path, key), "expected a string");
  return v.get<std::string>();
}

inline bool bool_field(const nlohmann::json& j, const std::string& path, std::string_view key) {
  const auto& v = required(j, path, key);
  if (!v.is_boolean()) throw ValidationError(join(path, key), "expected true or false");
  return v.get<bool>();
}

inline bool bool_field_or(const nlohmann::json& j, const std::string& path, std::string_view key,
                          bool fallback) {
  return j.contains(key) ? bool_field(j, path, key) : fallback;
}

inline std::uint64_t count_field(const nlohmann::json& j, const std::string& path,
                                 std::string_view key) {
  const auto& v = required(j, path, key);
  const auto field = join(path, key);
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    throw ValidationError(field, "must be nonnegative");
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && d >= 0 && std::floor(d) == d && d < 1.8e19)
      return static_cast<std::uint64_t>(d);
    throw ValidationError(field, "must be a nonnegative integer");
  }
  throw ValidationError(field, "expected an integer");
}

inline nlohmann::json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace offload::detail
