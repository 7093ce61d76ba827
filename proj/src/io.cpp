#include "otlab/io.hpp"

#include <fstream>
#include <sstream>

namespace otlab {

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::ParseError, what);
}

}  // namespace

template <>
Rational scalar_from_json<Rational>(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return parse_rational(v.dump());
  if (v.is_number_float()) return parse_rational(v.dump());
  schema_error("expected a number, got " + v.dump());
}

template <>
double scalar_from_json<double>(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto text = v.get<std::string>();
    if (text.find('/') == std::string::npos) {
      try {
        std::size_t used = 0;
        double d = std::stod(text, &used);
        if (used == text.size()) return d;
      } catch (const std::exception&) {
      }
    }
    return parse_rational(text).get_d();
  }
  schema_error("expected a number, got " + v.dump());
}

namespace {

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(where + ": missing \"" + key + "\"");
  return obj.at(key);
}

template <Scalar T>
std::vector<T> vector_from_json(const json& v, const std::string& where) {
  if (!v.is_array()) schema_error(where + " must be an array");
  std::vector<T> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(scalar_from_json<T>(x));
  return out;
}

template <Scalar T>
Matrix<T> matrix_from_json(const json& v, const std::string& where) {
  if (!v.is_array()) schema_error(where + " must be an array of rows");
  const std::size_t rows = v.size();
  const std::size_t cols = rows == 0 ? 0 : v.at(0).size();
  Matrix<T> out(rows, cols, T(0));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) schema_error(where + " is ragged");
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = scalar_from_json<T>(v[i][j]);
  }
  return out;
}

bool is_inf_marker(const json& v) {
  return v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "+inf");
}

template <Scalar T>
FiniteSpace<T> space_from_json(const json& v, const std::string& where) {
  FiniteSpace<T> space;
  const json& labels = member(v, "labels", where);
  if (!labels.is_array()) schema_error(where + ".labels must be an array");
  for (const auto& label : labels) {
    if (label.is_string()) {
      space.labels.push_back(label.get<std::string>());
    } else if (label.is_number()) {
      space.labels.push_back(label.dump());
    } else {
      schema_error(where + ".labels entries must be strings or numbers");
    }
  }
  if (v.contains("metric") && !v.at("metric").is_null()) {
    space.metric = matrix_from_json<T>(v.at("metric"), where + ".metric");
  }
  return space;
}

template <Scalar T>
Instance<T> typed_instance(const json& doc) {
  Instance<T> inst;
  inst.x = space_from_json<T>(member(doc, "X", "instance"), "X");
  inst.y = space_from_json<T>(member(doc, "Y", "instance"), "Y");
  const json& cost = member(doc, "cost", "instance");
  if (!cost.is_array()) schema_error("cost must be an array of rows");
  const std::size_t rows = cost.size();
  const std::size_t cols = rows == 0 ? 0 : cost.at(0).size();
  Matrix<Extended<T>> entries(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!cost[i].is_array() || cost[i].size() != cols) schema_error("cost is ragged");
    for (std::size_t j = 0; j < cols; ++j) {
      const json& e = cost[i][j];
      entries(i, j) = is_inf_marker(e) ? Extended<T>::infinity() : Extended<T>(scalar_from_json<T>(e));
    }
  }
  inst.cost = CostMatrix<T>(std::move(entries), doc.value("bounded", false));
  inst.mu.weights = vector_from_json<T>(member(doc, "mu", "instance"), "mu");
  inst.nu.weights = vector_from_json<T>(member(doc, "nu", "instance"), "nu");
  return inst;
}

template <Scalar T>
json typed_to_json(const Instance<T>& inst) {
  auto space = [](const FiniteSpace<T>& s) {
    json out;
    out["labels"] = s.labels;
    if (s.metric) out["metric"] = matrix_to_json(*s.metric);
    return out;
  };
  json out;
  out["mode"] = std::string(mode_name(NumTraits<T>::mode));
  out["X"] = space(inst.x);
  out["Y"] = space(inst.y);
  out["cost"] = cost_to_json(inst.cost);
  if (inst.cost.bounded) out["bounded"] = true;
  out["mu"] = vector_to_json(inst.mu.weights);
  out["nu"] = vector_to_json(inst.nu.weights);
  return out;
}

}  // namespace

json scalar_to_json(const Rational& x) { return format_scalar(x); }
json scalar_to_json(double x) { return x; }

AnyInstance instance_from_json(const json& doc) {
  if (!doc.is_object()) schema_error("instance must be a JSON object");
  const std::string mode = doc.value("mode", std::string("rational"));
  if (mode == "rational") return typed_instance<Rational>(doc);
  if (mode == "float") return typed_instance<double>(doc);
  schema_error("unknown mode \"" + mode + "\"");
}

AnyInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return instance_from_json(doc);
}

Instance<double> to_float(const Instance<Rational>& inst) {
  auto convert = [](const Matrix<Rational>& m) {
    Matrix<double> out(m.rows(), m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).get_d();
    return out;
  };
  auto space = [&](const FiniteSpace<Rational>& s) {
    FiniteSpace<double> out;
    out.labels = s.labels;
    if (s.metric) out.metric = convert(*s.metric);
    return out;
  };
  auto weights = [](const Marginal<Rational>& m) {
    Marginal<double> out;
    for (const auto& w : m.weights) out.weights.push_back(w.get_d());
    return out;
  };
  Instance<double> out;
  out.x = space(inst.x);
  out.y = space(inst.y);
  Matrix<Extended<double>> cost(inst.cost.rows(), inst.cost.cols());
  for (std::size_t i = 0; i < cost.rows(); ++i)
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      const auto& e = inst.cost(i, j);
      cost(i, j) = e.is_infinite() ? Extended<double>::infinity()
                                   : Extended<double>(e.value().get_d());
    }
  out.cost = CostMatrix<double>(std::move(cost), inst.cost.bounded);
  out.mu = weights(inst.mu);
  out.nu = weights(inst.nu);
  return out;
}

json instance_to_json(const Instance<Rational>& inst) { return typed_to_json(inst); }
json instance_to_json(const Instance<double>& inst) { return typed_to_json(inst); }

}  // namespace otlab
