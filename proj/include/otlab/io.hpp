#pragma once

#include <json.hpp>

#include <string>
#include <variant>

#include "otlab/certify.hpp"
#include "otlab/core.hpp"
#include "otlab/ctransform.hpp"
#include "otlab/envelope.hpp"
#include "otlab/primal.hpp"

namespace otlab {

using json = nlohmann::ordered_json;

/// An instance in whichever arithmetic mode its file requested.
using AnyInstance = std::variant<Instance<Rational>, Instance<double>>;

// Instance file:
//   {"X": {"labels": [...], "metric": [[...]]?}, "Y": {...},
//    "cost": [[...]], "mu": [...], "nu": [...], "mode": "rational"|"float",
//    "bounded": bool?}
// Numbers may be JSON numbers or strings ("p/q", decimals); "inf" marks a
// +inf cost. Unknown keys (e.g. a generator header) are ignored.

AnyInstance instance_from_json(const json& doc);
AnyInstance read_instance_file(const std::string& path);

/// Same instance in float arithmetic.
Instance<double> to_float(const Instance<Rational>& inst);

json instance_to_json(const Instance<Rational>& inst);
json instance_to_json(const Instance<double>& inst);

/// Parses one scalar as it appears in an instance file.
template <Scalar T>
T scalar_from_json(const json& v);
template <>
Rational scalar_from_json<Rational>(const json& v);
template <>
double scalar_from_json<double>(const json& v);

json scalar_to_json(const Rational& x);
json scalar_to_json(double x);

template <Scalar T>
json extended_to_json(const Extended<T>& x) {
  return x.is_infinite() ? json("inf") : scalar_to_json(x.value());
}

template <Scalar T>
json vector_to_json(const std::vector<T>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(scalar_to_json(x));
  return out;
}

template <Scalar T>
json matrix_to_json(const Matrix<T>& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

template <Scalar T>
json cost_to_json(const CostMatrix<T>& c) {
  json out = json::array();
  for (std::size_t i = 0; i < c.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < c.cols(); ++j) row.push_back(extended_to_json(c(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

inline json cell_to_json(Cell c) { return json::array({c.row, c.col}); }

template <Scalar T>
json plan_result_to_json(const OptimalPlanResult<T>& r) {
  json out;
  out["mode"] = std::string(mode_name(NumTraits<T>::mode));
  out["value"] = extended_to_json(r.value);
  out["plan"] = matrix_to_json(r.plan.mass);
  json basis = json::array();
  for (const Cell c : r.basis) basis.push_back(cell_to_json(c));
  out["basis"] = std::move(basis);
  return out;
}

template <Scalar T>
json potentials_to_json(const DualPotentials<T>& p) {
  json out;
  out["phi"] = vector_to_json(p.phi);
  out["psi"] = vector_to_json(p.psi);
  return out;
}

inline std::string level_status_name(LevelStatus s) {
  switch (s) {
    case LevelStatus::Pass: return "pass";
    case LevelStatus::Fail: return "fail";
    case LevelStatus::Skipped: return "skipped";
  }
  return "unknown";
}

template <Scalar T>
json certificate_to_json(const DualityCertificate<T>& cert) {
  json out;
  out["mode"] = std::string(mode_name(cert.mode));
  out["tolerances"] = {{"gap", scalar_to_json(cert.tolerances.gap)},
                       {"slackness", scalar_to_json(cert.tolerances.slackness)},
                       {"marginal", scalar_to_json(cert.tolerances.marginal)},
                       {"support", scalar_to_json(cert.tolerances.support)}};
  out["gap"] = cert.gap ? scalar_to_json(*cert.gap) : json(nullptr);
  out["primal_value"] = extended_to_json(cert.primal_value);
  out["dual_value"] = scalar_to_json(cert.dual_value);
  out["potentials_feasible"] = cert.potentials_feasible;
  out["marginals"] = {{"max_row_deviation", scalar_to_json(cert.marginals.max_row_deviation)},
                      {"max_col_deviation", scalar_to_json(cert.marginals.max_col_deviation)},
                      {"negative_mass", cert.marginals.negative_mass},
                      {"pass", cert.marginals.pass}};
  json slack = json::array();
  for (const auto& v : cert.slackness) {
    slack.push_back({{"cell", cell_to_json(v.cell)},
                     {"mass", scalar_to_json(v.mass)},
                     {"slack", extended_to_json(v.slack)}});
  }
  out["slackness"] = std::move(slack);
  json cyclic = json::object();
  json witnesses = json::object();
  for (const auto& level : cert.cyclic.levels) {
    const std::string key = "k" + std::to_string(level.k);
    cyclic[key] = level_status_name(level.status);
    if (level.violation) {
      json cycle = json::array();
      for (const Cell c : level.violation->cycle) cycle.push_back(cell_to_json(c));
      witnesses[key] = {{"cycle", std::move(cycle)},
                        {"current", extended_to_json(level.violation->current)},
                        {"permuted", extended_to_json(level.violation->permuted)}};
    }
  }
  out["cyclic"] = std::move(cyclic);
  if (!witnesses.empty()) out["cyclic_witnesses"] = std::move(witnesses);
  out["verdict"] = cert.verdict ? "pass" : "fail";
  return out;
}

template <Scalar T>
json schedule_to_json(const EnvelopeSchedule<T>& s) {
  json out;
  out["mode"] = std::string(mode_name(NumTraits<T>::mode));
  json rows = json::array();
  for (const auto& level : s.levels) {
    rows.push_back({{"n", scalar_to_json(level.n)}, {"value", scalar_to_json(level.value)}});
  }
  out["levels"] = std::move(rows);
  out["limit"] = scalar_to_json(s.limit_value);
  out["saturation_level"] = s.saturation_level ? scalar_to_json(*s.saturation_level) : json(nullptr);
  out["monotone"] = s.monotone;
  return out;
}

}  // namespace otlab
