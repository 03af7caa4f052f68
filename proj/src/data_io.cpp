#include "cvxreg/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "cvxreg/error.hpp"

namespace cvxreg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

std::size_t resolve_target(const TargetColumn& target, const std::vector<std::string>& header,
                           std::size_t n_columns) {
  if (std::holds_alternative<std::monostate>(target)) return n_columns - 1;
  if (const auto* index = std::get_if<int>(&target)) {
    if (*index < 0 || static_cast<std::size_t>(*index) >= n_columns)
      throw CsvError(ErrorKind::missing_target_column, 0, 0,
                     "target column index " + std::to_string(*index) + " out of range (file has " +
                         std::to_string(n_columns) + " columns)");
    return static_cast<std::size_t>(*index);
  }
  const std::string& name = std::get<std::string>(target);
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return c;
  throw CsvError(ErrorKind::missing_target_column, header.empty() ? 0 : 1, 0,
                 "target column '" + name + "' not found" +
                     (header.empty() ? std::string(" (file has no header)") : std::string()));
}

LoadedDataset finish(Matrix raw, Vector targets, std::vector<std::string> names,
                     std::optional<std::string> target_name, bool standardize, bool add_bias) {
  Preprocessing pre;
  pre.add_bias = add_bias;
  pre.feature_names = std::move(names);
  pre.target_name = std::move(target_name);
  if (standardize) {
    const double n = static_cast<double>(raw.rows());
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      const double mean = raw.col(j).sum() / n;
      const double var = (raw.col(j).array() - mean).square().sum() / n;
      pre.means.push_back(mean);
      // Constant columns are centred only.
      pre.scales.push_back(var > 0.0 ? std::sqrt(var) : 1.0);
    }
  }
  Matrix features = pre.apply(raw);
  return {Dataset(std::move(features), std::move(targets)), std::move(pre)};
}

}  // namespace

Matrix Preprocessing::apply(const Matrix& raw) const {
  if (!means.empty() && static_cast<std::size_t>(raw.cols()) != means.size())
    throw Error(ErrorKind::dimension_mismatch, "column count does not match standardisation");
  Matrix out(raw.rows(), raw.cols() + (add_bias ? 1 : 0));
  out.leftCols(raw.cols()) = raw;
  for (std::size_t j = 0; j < means.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    out.col(c) = ((raw.col(c).array() - means[j]) / scales[j]).matrix();
  }
  if (add_bias) out.col(raw.cols()).setOnes();
  return out;
}

CsvTable read_csv_table(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");

  CsvTable table;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty()) continue;

    const auto cells = split(view);
    if (header_pending) {
      for (auto c : cells) table.header.emplace_back(c);
      width = cells.size();
      header_pending = false;
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << width << " fields, found " << cells.size();
      throw CsvError(ErrorKind::parse, line_no, 0, msg.str());
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        std::ostringstream msg;
        msg << "non-numeric cell '" << cells[c] << "' at line " << line_no << ", column "
            << c + 1;
        if (c < table.header.size()) msg << " (" << table.header[c] << ")";
        throw CsvError(ErrorKind::non_numeric_cell, line_no, c + 1, msg.str());
      }
      row[c] = *v;
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty())
    throw CsvError(ErrorKind::parse, line_no, 0, "'" + path.string() + "' has no data rows");
  return table;
}

LoadedDataset load_csv(const DatasetSpec& spec) {
  const auto* path = std::get_if<std::filesystem::path>(&spec.source);
  if (path == nullptr) throw Error(ErrorKind::invalid_argument, "dataset spec has no csv path");
  const CsvTable table = read_csv_table(*path, spec.has_header);
  const std::size_t n_columns = table.rows.front().size();
  const std::size_t target = resolve_target(spec.target_column, table.header, n_columns);
  if (n_columns < 2)
    throw CsvError(ErrorKind::parse, 0, 0, "need at least one feature column besides the target");

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto d = static_cast<Eigen::Index>(n_columns - 1);
  Matrix raw(n, d);
  Vector targets(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < n_columns; ++c) {
      if (c == target)
        targets[i] = row[c];
      else
        raw(i, j++) = row[c];
    }
  }
  std::vector<std::string> names;
  std::optional<std::string> target_name;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == target)
      target_name = table.header[c];
    else
      names.push_back(table.header[c]);
  }
  return finish(std::move(raw), std::move(targets), std::move(names), std::move(target_name),
                spec.standardize, spec.add_bias);
}

LoadedDataset load_dataset(const DatasetSpec& spec) {
  if (std::holds_alternative<std::filesystem::path>(spec.source)) return load_csv(spec);
  SyntheticData synth = generate_synthetic(std::get<SynthSpec>(spec.source));
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < synth.dataset.n_features(); ++j)
    names.push_back("x" + std::to_string(j + 1));
  return finish(synth.dataset.features(), synth.dataset.targets(), std::move(names), "target",
                spec.standardize, spec.add_bias);
}

SyntheticData generate_synthetic(const SynthSpec& spec) {
  if (spec.n_samples < 1) throw Error(ErrorKind::invalid_argument, "n_samples must be positive");
  if (spec.n_features < 1) throw Error(ErrorKind::invalid_argument, "n_features must be positive");
  if (!(spec.noise_std >= 0.0) || !std::isfinite(spec.noise_std))
    throw Error(ErrorKind::invalid_argument, "noise_std must be finite and nonnegative");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  const Eigen::Index d = spec.n_features;
  Vector w(d);
  if (spec.true_weights) {
    if (static_cast<Eigen::Index>(spec.true_weights->size()) != d)
      throw Error(ErrorKind::dimension_mismatch, "true_weights length must equal n_features");
    for (Eigen::Index j = 0; j < d; ++j) w[j] = (*spec.true_weights)[static_cast<std::size_t>(j)];
    if (!w.allFinite()) throw Error(ErrorKind::invalid_argument, "true_weights must be finite");
  } else {
    for (Eigen::Index j = 0; j < d; ++j) w[j] = unit(rng);
  }

  Matrix x(spec.n_samples, d);
  Vector y(spec.n_samples);
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (Eigen::Index j = 0; j < d; ++j) x(n, j) = unit(rng);
    double z = x.row(n).dot(w);
    if (spec.noise_std > 0.0) z += spec.noise_std * noise(rng);
    y[n] = evaluate(spec.transform, z);
  }
  return {Dataset(std::move(x), std::move(y)), std::vector<double>(w.data(), w.data() + d)};
}

double estimate_target_bound(const Dataset& ds, double margin) {
  if (!(margin >= 1.0) || !std::isfinite(margin))
    throw Error(ErrorKind::invalid_argument, "margin must be >= 1");
  const double largest = ds.targets().cwiseAbs().maxCoeff();
  return margin * (largest > 0.0 ? largest : 1.0);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  for (Eigen::Index j = 0; j < ds.n_features(); ++j) out << 'x' << j + 1 << ',';
  out << "target\n";
  for (Eigen::Index n = 0; n < ds.n_samples(); ++n) {
    for (Eigen::Index j = 0; j < ds.n_features(); ++j) out << format_double(ds.row(n)[j]) << ',';
    out << format_double(ds.target(n)) << '\n';
  }
  if (!out) throw Error(ErrorKind::io, "write to '" + path.string() + "' failed");
}

}  // namespace cvxreg
