#pragma once

#include <string>

#include "json.hpp"

#include "greedy/estimators.hpp"

namespace greedy {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Window& w);
nlohmann::json to_json(const MarkedRealization& r);
nlohmann::json to_json(const SolveResult& r);
nlohmann::json to_json(const EstimateReport& r);
nlohmann::json to_json(const Diagnostic& d);

/// Parsers reject unknown keys and report the offending JSON pointer.
Window window_from_json(const nlohmann::json& j, const std::string& where);
MarkDistribution marks_from_json(const nlohmann::json& j, const std::string& where);
MarkedRealization realization_from_json(const nlohmann::json& j, const std::string& where);
ProcessSpec process_from_json(const nlohmann::json& j, const std::string& where);
Norm norm_from_json(const nlohmann::json& j, int dim, const std::string& where);

/// Compact, key-sorted serialisation used for every report file.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace greedy
