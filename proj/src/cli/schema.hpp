#pragma once

#include <set>
#include <string>
#include <vector>

#include "greedy/json_io.hpp"

namespace greedy::detail {

/// Typed access to a JSON object that remembers which keys were read, so that leftovers can be
/// rejected as unknown.
class Obj {
 public:
  Obj(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw SchemaError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return where_ + "/" + key; }

  const nlohmann::json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw SchemaError(at(key) + ": missing required key");
    return j_.at(key);
  }

  template <class T>
  T req(const std::string& key) {
    return convert<T>(raw(key), at(key));
  }

  template <class T>
  T opt(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return convert<T>(j_.at(key), at(key));
  }

  Obj sub(const std::string& key) { return Obj(raw(key), at(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw SchemaError(at(it.key()) + ": unknown key");
    }
  }

  template <class T>
  static T convert(const nlohmann::json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw SchemaError(where + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw SchemaError(where + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw SchemaError(where + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<long long>() < 0) throw SchemaError(where + ": expected a nonnegative integer");
      }
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw SchemaError(where + ": expected a number");
      return v.get<T>();
    } else {
      // std::vector of the above
      if (!v.is_array()) throw SchemaError(where + ": expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], where + "/" + std::to_string(i)));
      }
      return out;
    }
  }

  const std::string& where() const { return where_; }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace greedy::detail
