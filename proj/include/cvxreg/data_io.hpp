#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cvxreg/dataset.hpp"
#include "cvxreg/transform.hpp"

namespace cvxreg {

struct SynthSpec {
  int n_samples = 100;
  int n_features = 3;
  std::optional<std::vector<double>> true_weights;  // uniform[-1,1]^d when absent
  double noise_std = 0.0;                          // added to z, before g
  TransformKind transform = ConvexSqrtTransform(1.0, 1.0);
  std::uint64_t seed = 0;
};

// Column selected as the target: a header name or a zero-based index.
// Defaults to the last column.
using TargetColumn = std::variant<std::monostate, std::string, int>;

struct DatasetSpec {
  std::variant<std::filesystem::path, SynthSpec> source;
  TargetColumn target_column;
  bool has_header = true;
  bool add_bias = true;
  bool standardize = false;
};

// Column statistics used when standardising, kept so that prediction-time
// data can be mapped identically.
struct Preprocessing {
  bool add_bias = false;
  std::vector<double> means;  // empty when not standardised
  std::vector<double> scales;
  std::vector<std::string> feature_names;
  std::optional<std::string> target_name;

  Matrix apply(const Matrix& raw) const;
};

struct LoadedDataset {
  Dataset dataset;
  Preprocessing preprocessing;
};

// Raw numeric table from a comma-separated file (LF or CRLF, '.' decimals).
struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv_table(const std::filesystem::path& path, bool has_header);

LoadedDataset load_csv(const DatasetSpec& spec);
LoadedDataset load_dataset(const DatasetSpec& spec);

struct SyntheticData {
  Dataset dataset;
  std::vector<double> true_weights;
};

// Features uniform[-1,1], y = g(w . x + eps) with eps ~ N(0, noise_std^2).
SyntheticData generate_synthetic(const SynthSpec& spec);

// margin * max |y_n|, or margin when every target is zero. margin >= 1.
double estimate_target_bound(const Dataset& ds, double margin = 1.0);

// Header x1..xd,target; values in shortest round-trip form.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace cvxreg
