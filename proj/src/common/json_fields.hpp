#pragma once

#include "funcgraph/error.hpp"
#include "funcgraph/geometry/pose.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <set>
#include <string>

namespace funcgraph::detail {

using json = nlohmann::json;

// Parses JSON text; syntax errors become ParseError with `where` and the byte
// offset.
inline json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, where + ": malformed JSON at byte " + std::to_string(e.byte));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, where + ": " + e.what());
  }
}

// Typed, strict access to one JSON object. Every error names `where` (file or
// record) and the JSON pointer of the field; finish() rejects unread keys.
class Fields {
 public:
  Fields(const json& j, std::string where, std::string path = "")
      : j_(j), where_(std::move(where)), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, where_ + ": " + (path_.empty() ? std::string("/") : path_) + ": " + what);
  }

  [[noreturn]] void fail_at(const std::string& key, const std::string& what) const {
    throw Error(ErrorCode::ParseError, where_ + ": " + path_ + "/" + key + ": " + what);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) fail("missing field '" + key + "'");
    return *v;
  }

  double number(const std::string& key) {
    const json& v = require(key);
    if (!v.is_number()) fail_at(key, "expected a number");
    return v.get<double>();
  }

  double number(const std::string& key, double fallback) {
    return get_if(key) ? number(key) : fallback;
  }

  long long integer(const std::string& key) {
    const json& v = require(key);
    if (!v.is_number_integer()) fail_at(key, "expected an integer");
    return v.get<long long>();
  }

  long long integer(const std::string& key, long long fallback) {
    return get_if(key) ? integer(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail_at(key, "expected a boolean");
    return v->get<bool>();
  }

  std::string text(const std::string& key) {
    const json& v = require(key);
    if (!v.is_string()) fail_at(key, "expected a string");
    return v.get<std::string>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    return get_if(key) ? text(key) : fallback;
  }

  Vec3 vec3(const std::string& key) { return vec3_of(require(key), key); }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    return get_if(key) ? vec3(key) : fallback;
  }

  Vec3 vec3_of(const json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 3) fail_at(key, "expected 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) fail_at(key, "expected 3 numbers");
      out[i] = v[i].get<double>();
    }
    if (!out.allFinite()) fail_at(key, "non-finite value");
    return out;
  }

  Pose pose(const std::string& key) { return pose_of(require(key), key); }

  Pose pose_of(const json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 7) fail_at(key, "expected [x, y, z, qx, qy, qz, qw]");
    std::array<double, 7> a{};
    for (std::size_t i = 0; i < 7; ++i) {
      if (!v[i].is_number()) fail_at(key, "expected [x, y, z, qx, qy, qz, qw]");
      a[i] = v[i].get<double>();
      if (!std::isfinite(a[i])) fail_at(key, "non-finite value");
    }
    const Quat q(a[6], a[3], a[4], a[5]);
    if (std::abs(q.norm() - 1.0) > 1e-6) fail_at(key, "quaternion is not unit length");
    return Pose::from_array(a);
  }

  Quat quaternion(const std::string& key, const Quat& fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_array() || v->size() != 4) fail_at(key, "expected [qx, qy, qz, qw]");
    for (const auto& e : *v) {
      if (!e.is_number()) fail_at(key, "expected [qx, qy, qz, qw]");
    }
    const Quat q((*v)[3].get<double>(), (*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>());
    if (std::abs(q.norm() - 1.0) > 1e-6) fail_at(key, "quaternion is not unit length");
    return q;
  }

  const json& array(const std::string& key) {
    const json& v = require(key);
    if (!v.is_array()) fail_at(key, "expected an array");
    return v;
  }

  Fields object(const std::string& key) { return Fields(require(key), where_, path_ + "/" + key); }

  Fields element(const json& v, const std::string& key, std::size_t index) const {
    return Fields(v, where_, path_ + "/" + key + "/" + std::to_string(index));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) fail("unknown field '" + it.key() + "'");
    }
  }

  const std::string& where() const { return where_; }
  const std::string& path() const { return path_; }

 private:
  bool get_if(const std::string& key) {
    const json* v = get(key);
    return v != nullptr && !v->is_null();
  }

  const json& j_;
  std::string where_;
  std::string path_;
  std::set<std::string> seen_;
};

inline json pose_json(const Pose& p) {
  const auto a = p.to_array();
  return json(std::vector<double>(a.begin(), a.end()));
}

inline json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace funcgraph::detail
