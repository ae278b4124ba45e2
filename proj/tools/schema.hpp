#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "json.hpp"

// A small JSON Schema subset: type, properties, required, additionalProperties (bool),
// enum, minimum/maximum, exclusiveMinimum/exclusiveMaximum, items, minItems/maxItems,
// minProperties and default. Enough for the shipped configs and nothing more.
namespace ringqubit::cli {

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Throws SchemaError at the first violation.
void validate(const nlohmann::json& value, const nlohmann::json& schema, const std::string& path = "$");

// Fills absent object members that carry a "default", recursively.
void apply_defaults(nlohmann::json& value, const nlohmann::json& schema);

// name -> schema text, compiled in from schemas/*.schema.json.
const std::map<std::string, std::string>& embedded_schemas();

// Parsed schema by name; std::invalid_argument if unknown.
const nlohmann::json& schema_for(const std::string& name);

}  // namespace ringqubit::cli
