#include "mg1/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mg1/errors.hpp"

namespace mg1 {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, what + " must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().is_array() ? j.front().size() : 0);
  if (cols == 0) throw Error(ErrorCode::ParseError, what + " rows must be nonempty arrays");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::ParseError, what + " is ragged");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw Error(ErrorCode::ParseError, what + " has a non-numeric entry");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

std::vector<double> parse_numbers(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, what + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::ParseError, what + " has a non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

double param(const json& params, const char* key) {
  if (!params.is_object() || !params.contains(key) || !params[key].is_number()) {
    throw Error(ErrorCode::ParseError, std::string("tail parameter '") + key + "' missing");
  }
  return params[key].get<double>();
}

std::optional<ParametricTail> parse_tail(const json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  const json& t = doc[key];
  if (!t.is_object() || !t.contains("family") || !t["family"].is_string()) {
    throw Error(ErrorCode::ParseError, std::string(key) + " needs a string 'family'");
  }
  const std::string family = t["family"].get<std::string>();
  if (family == "none") return std::nullopt;
  const json params = t.value("params", json::object());
  TailFamily fam;
  if (family == "pareto") {
    fam = Pareto{param(params, "alpha"), param(params, "gamma")};
  } else if (family == "weibull") {
    fam = Weibull{param(params, "lambda"), param(params, "alpha")};
  } else if (family == "geometric") {
    fam = Geometric{param(params, "rho")};
  } else {
    throw Error(ErrorCode::ParseError, "unknown tail family '" + family + "'");
  }
  if (!t.contains("row_scale") || !t.contains("col_profile")) {
    throw Error(ErrorCode::ParseError, std::string(key) + " needs row_scale and col_profile");
  }
  const auto scale = parse_numbers(t["row_scale"], "row_scale");
  const auto profile = parse_numbers(t["col_profile"], "col_profile");
  return ParametricTail{fam, Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size())),
                        Eigen::Map<const RowVector>(profile.data(), static_cast<Eigen::Index>(profile.size()))};
}

std::map<long, Matrix> parse_blocks(const json& doc, const char* key, long min_k) {
  if (!doc.contains(key) || !doc[key].is_array()) throw Error(ErrorCode::ParseError, std::string(key) + " missing");
  std::map<long, Matrix> out;
  for (const auto& entry : doc[key]) {
    if (!entry.is_object() || !entry.contains("k") || !entry["k"].is_number_integer() || !entry.contains("matrix")) {
      throw Error(ErrorCode::ParseError, std::string(key) + " entries need integer 'k' and 'matrix'");
    }
    const long k = entry["k"].get<long>();
    if (k < min_k) throw Error(ErrorCode::ParseError, std::string(key) + " index below " + std::to_string(min_k));
    if (!out.emplace(k, parse_matrix(entry["matrix"], std::string(key) + "[" + std::to_string(k) + "]")).second) {
      throw Error(ErrorCode::ParseError, std::string(key) + " repeats index " + std::to_string(k));
    }
  }
  return out;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json tail_json(const ParametricTail& t) {
  json params = std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Pareto>) return {{"alpha", f.alpha}, {"gamma", f.gamma}};
        if constexpr (std::is_same_v<T, Weibull>) return {{"lambda", f.lambda}, {"alpha", f.alpha}};
        if constexpr (std::is_same_v<T, Geometric>) return {{"rho", f.rho}};
      },
      t.family);
  return {{"family", family_name(t.family)},
          {"params", params},
          {"row_scale", std::vector<double>(t.row_scale.data(), t.row_scale.data() + t.row_scale.size())},
          {"col_profile", std::vector<double>(t.col_profile.data(), t.col_profile.data() + t.col_profile.size())}};
}

}  // namespace

MG1Model parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "model document must be an object");
  for (const char* key : {"m0", "m1"}) {
    if (!doc.contains(key) || !doc[key].is_number_integer()) {
      throw Error(ErrorCode::ParseError, std::string(key) + " must be an integer");
    }
  }
  const int m0 = doc["m0"].get<int>();
  const int m1 = doc["m1"].get<int>();
  if (m0 < 1 || m1 < 1) throw Error(ErrorCode::InvalidParameter, "phase counts M0 and M1 must be positive");
  const auto a_map = parse_blocks(doc, "a_blocks", -1);
  const auto b_map = parse_blocks(doc, "b_blocks", 0);
  if (!doc.contains("b_down")) throw Error(ErrorCode::ParseError, "b_down missing");
  const Matrix b_down = parse_matrix(doc["b_down"], "b_down");

  const long ka = a_map.empty() ? -1 : std::max(-1L, a_map.rbegin()->first);
  std::vector<Matrix> a(ka + 2, Matrix::Zero(m1, m1));
  for (const auto& [k, m] : a_map) a[k + 1] = m;
  const long kb = b_map.empty() ? 0 : b_map.rbegin()->first;
  std::vector<Matrix> b;
  for (long k = 0; k <= kb; ++k) b.push_back(k == 0 ? Matrix::Zero(m0, m0) : Matrix::Zero(m0, m1));
  for (const auto& [k, m] : b_map) b[k] = m;
  return MG1Model(m0, m1, std::move(a), b_down, std::move(b), parse_tail(doc, "a_tail"), parse_tail(doc, "b_tail"));
}

MG1Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string model_to_json(const MG1Model& model) {
  json doc;
  doc["m0"] = model.m0();
  doc["m1"] = model.m1();
  json a = json::array();
  for (long k = -1; k <= model.a_support(); ++k) a.push_back({{"k", k}, {"matrix", matrix_json(model.block_A(k))}});
  doc["a_blocks"] = a;
  doc["b_down"] = matrix_json(model.block_B(-1));
  json b = json::array();
  for (long k = 0; k <= model.b_support(); ++k) b.push_back({{"k", k}, {"matrix", matrix_json(model.block_B(k))}});
  doc["b_blocks"] = b;
  if (model.a_tail()) doc["a_tail"] = tail_json(*model.a_tail());
  if (model.b_tail()) doc["b_tail"] = tail_json(*model.b_tail());
  return doc.dump(2) + "\n";
}

}  // namespace mg1
