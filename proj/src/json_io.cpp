#include "cvxreg/json_io.hpp"

#include <fstream>

#include "cvxreg/error.hpp"

namespace cvxreg {

using nlohmann::json;

namespace {

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

json to_json(const TransformKind& t) {
  if (const auto* g = std::get_if<ConvexSqrtTransform>(&t))
    return {{"kind", "convex-sqrt"}, {"alpha", g->alpha()}, {"y_bound", g->y_bound()}};
  if (const auto* a = std::get_if<AffineTransform>(&t))
    return {{"kind", "affine"}, {"a", a->slope()}, {"b", a->intercept()}};
  const auto& th = std::get<TanhTransform>(t);
  return {{"kind", "tanh"}, {"scale", th.scale()}};
}

TransformKind transform_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "convex-sqrt")
      return ConvexSqrtTransform(j.at("alpha").get<double>(), j.at("y_bound").get<double>());
    if (kind == "affine") return AffineTransform(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "tanh") return TanhTransform(j.at("scale").get<double>());
    throw Error(ErrorKind::parse, "unknown transform kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed transform: ") + e.what());
  }
}

json to_json(const FitReport& r) {
  return {{"initial_weights", vector_json(r.initial_weights)},
          {"final_weights", vector_json(r.final_weights)},
          {"final_loss", r.final_loss},
          {"final_grad_norm", r.final_grad_norm},
          {"iterations", r.iterations},
          {"termination", to_string(r.termination)},
          {"loss_trace", r.loss_trace},
          {"step_sizes", r.step_sizes}};
}

json to_json(const ConvexityReport& r) {
  json witness = json::object();
  for (const auto& [name, value] : r.witness.values) witness[name] = value;
  return {{"check_name", r.check_name},
          {"passed", r.passed},
          {"worst_violation", r.worst_violation},
          {"tolerance", r.tolerance},
          {"witness", witness},
          {"samples_tested", r.samples_tested},
          {"summary", r.summary()}};
}

json to_json(const ConditionReport& r) {
  json out = json::array();
  for (const auto& c : r.conditions)
    out.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"worst_violation", c.worst_violation},
                   {"witness", c.witness}});
  return out;
}

json to_json(const Preprocessing& p) {
  json out = {{"add_bias", p.add_bias},
              {"feature_names", p.feature_names},
              {"target_name", p.target_name ? json(*p.target_name) : json(nullptr)}};
  if (!p.means.empty()) {
    out["means"] = p.means;
    out["scales"] = p.scales;
  }
  return out;
}

Preprocessing preprocessing_from_json(const json& j) {
  Preprocessing p;
  try {
    p.add_bias = j.value("add_bias", false);
    p.feature_names = j.value("feature_names", std::vector<std::string>{});
    if (j.contains("target_name") && j["target_name"].is_string())
      p.target_name = j["target_name"].get<std::string>();
    if (j.contains("means")) {
      p.means = j.at("means").get<std::vector<double>>();
      p.scales = j.at("scales").get<std::vector<double>>();
      if (p.means.size() != p.scales.size())
        throw Error(ErrorKind::parse, "means and scales differ in length");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed preprocessing block: ") + e.what());
  }
  return p;
}

void write_model(const ModelFile& m, const std::filesystem::path& path) {
  const json doc = {{"weights", vector_json(m.model.weights)},
                    {"transform", to_json(m.model.transform)},
                    {"preprocessing", to_json(m.preprocessing)}};
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write model file '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

ModelFile read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open model file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, "model file is not valid JSON: " + std::string(e.what()));
  }
  std::vector<double> weights;
  try {
    weights = doc.at("weights").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("model file needs a weights array: ") + e.what());
  }
  if (weights.empty()) throw Error(ErrorKind::parse, "model file has no weights");
  if (!doc.contains("transform")) throw Error(ErrorKind::parse, "model file has no transform");
  ModelFile m{Model{Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size())),
                    transform_from_json(doc.at("transform"))},
              {}};
  if (doc.contains("preprocessing")) m.preprocessing = preprocessing_from_json(doc["preprocessing"]);
  return m;
}

}  // namespace cvxreg
