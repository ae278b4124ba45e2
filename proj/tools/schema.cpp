#include "schema.hpp"

#include <cmath>
#include <mutex>

namespace ringqubit::cli {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    // 3.0 counts as an integer, as in the spec of the keyword.
    return v.is_number_float() && std::isfinite(v.get<double>()) && std::floor(v.get<double>()) == v.get<double>();
  }
  throw std::logic_error("schema uses unknown type '" + t + "'");
}

std::string type_list(const json& t) {
  if (t.is_string()) return t.get<std::string>();
  std::string s;
  for (const auto& x : t) s += (s.empty() ? "" : " or ") + x.get<std::string>();
  return s;
}

}  // namespace

void validate(const json& value, const json& schema, const std::string& path) {
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = has_type(value, t.get<std::string>());
    } else {
      for (const auto& x : t) ok = ok || has_type(value, x.get<std::string>());
    }
    if (!ok) throw SchemaError(path, "expected " + type_list(t) + ", got " + value.type_name());
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == value;
    if (!found) throw SchemaError(path, "value " + value.dump() + " not in " + schema["enum"].dump());
  }
  if (value.is_number()) {
    const double x = value.get<double>();
    if (!std::isfinite(x)) throw SchemaError(path, "number must be finite");
    if (schema.contains("minimum") && x < schema["minimum"].get<double>()) {
      throw SchemaError(path, "must be >= " + schema["minimum"].dump());
    }
    if (schema.contains("maximum") && x > schema["maximum"].get<double>()) {
      throw SchemaError(path, "must be <= " + schema["maximum"].dump());
    }
    if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>()) {
      throw SchemaError(path, "must be > " + schema["exclusiveMinimum"].dump());
    }
    if (schema.contains("exclusiveMaximum") && x >= schema["exclusiveMaximum"].get<double>()) {
      throw SchemaError(path, "must be < " + schema["exclusiveMaximum"].dump());
    }
  }
  if (value.is_array()) {
    if (schema.contains("minItems") && value.size() < schema["minItems"].get<size_t>()) {
      throw SchemaError(path, "needs at least " + schema["minItems"].dump() + " items");
    }
    if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<size_t>()) {
      throw SchemaError(path, "allows at most " + schema["maxItems"].dump() + " items");
    }
    if (schema.contains("items")) {
      for (size_t i = 0; i < value.size(); ++i) {
        validate(value[i], schema["items"], path + "[" + std::to_string(i) + "]");
      }
    }
  }
  if (value.is_object()) {
    if (schema.contains("minProperties") && value.size() < schema["minProperties"].get<size_t>()) {
      throw SchemaError(path, "needs at least " + schema["minProperties"].dump() + " members");
    }
    if (schema.contains("required")) {
      for (const auto& r : schema["required"]) {
        if (!value.contains(r.get<std::string>())) {
          throw SchemaError(path, "missing required member '" + r.get<std::string>() + "'");
        }
      }
    }
    const json props = schema.value("properties", json::object());
    const bool closed = schema.contains("additionalProperties") && !schema["additionalProperties"].get<bool>();
    for (auto it = value.begin(); it != value.end(); ++it) {
      const std::string sub = path + "." + it.key();
      if (props.contains(it.key())) {
        validate(it.value(), props[it.key()], sub);
      } else if (closed) {
        throw SchemaError(sub, "unknown member");
      }
    }
  }
}

void apply_defaults(json& value, const json& schema) {
  if (!value.is_object() || !schema.contains("properties")) return;
  for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
    if (!value.contains(it.key()) && it.value().contains("default")) value[it.key()] = it.value()["default"];
    if (value.contains(it.key())) {
      json& member = value[it.key()];
      if (member.is_object()) apply_defaults(member, it.value());
      if (member.is_array() && it.value().contains("items")) {
        for (auto& x : member) apply_defaults(x, it.value()["items"]);
      }
    }
  }
}

const json& schema_for(const std::string& name) {
  static std::map<std::string, json> parsed;
  static std::mutex lock;
  std::lock_guard<std::mutex> g(lock);
  auto it = parsed.find(name);
  if (it != parsed.end()) return it->second;
  const auto& table = embedded_schemas();
  auto src = table.find(name);
  if (src == table.end()) throw std::invalid_argument("no schema named '" + name + "'");
  return parsed.emplace(name, json::parse(src->second)).first->second;
}

}  // namespace ringqubit::cli
