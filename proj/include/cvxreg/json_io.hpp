#pragma once

#include <filesystem>

#include <json.hpp>

#include "cvxreg/convexity.hpp"
#include "cvxreg/data_io.hpp"
#include "cvxreg/solver.hpp"
#include "cvxreg/transform.hpp"

namespace cvxreg {

nlohmann::json to_json(const TransformKind& t);
TransformKind transform_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FitReport& r);
nlohmann::json to_json(const ConvexityReport& r);
nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const Preprocessing& p);
Preprocessing preprocessing_from_json(const nlohmann::json& j);

// Model file: {weights: [...], transform: {...}, preprocessing: {...}}.
// The preprocessing block is optional on read (defaults to none).
struct ModelFile {
  Model model;
  Preprocessing preprocessing;
};

void write_model(const ModelFile& m, const std::filesystem::path& path);
ModelFile read_model(const std::filesystem::path& path);

}  // namespace cvxreg
