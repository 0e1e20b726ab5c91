#pragma once
/**
 * @file report.hpp
 * @brief JSON encodings of the verification results and a deterministic
 * writer that prints every float with 17 significant digits.
 */

#include "holoforge/special.hpp"
#include "holoforge/weakcheck.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace holoforge {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "holonomy-forge/1";

namespace detail {

inline void write_json(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      os << "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat ? ", " : ",");
        first = false;
        if (!flat) os << "\n" << pad;
        write_json(os, e, indent, depth + 1);
      }
      if (!flat) os << "\n" << close;
      os << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
      os << buf;
      return;
    }
    default: os << j.dump(); return;
  }
}

}  // namespace detail

/// Serializes with 2-space indentation and %.17g floats; key order is the
/// insertion order, so equal inputs give identical bytes.
inline std::string dump_json(const Json& j) {
  std::ostringstream os;
  detail::write_json(os, j, 2, 0);
  os << "\n";
  return os.str();
}

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

/// Row-major nested array.
inline Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

inline Json to_json(const GroupSpec& s) {
  Json j;
  j["family"] = std::string(family_token(s.family()));
  if (has_parameter(s.family())) j["n"] = s.n();
  j["name"] = s.name();
  j["ambient_dim"] = s.ambient_dim();
  return j;
}

inline Json to_json(const AlternatingForm& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms()) {
    Json idx = Json::array();
    for (int i : t.indices) idx.push_back(i + 1);
    terms.push_back({{"indices", idx}, {"coefficient", t.coefficient}});
  }
  return {{"degree", f.degree()}, {"ambient_dim", f.ambient_dim()}, {"terms", terms}};
}

inline Json to_json(const RelationCheck& c) {
  return {{"name", c.name}, {"residual", c.residual}, {"passed", c.passed}};
}

inline Json to_json(const SpecialSubspaceReport& r) {
  Json cands = Json::array();
  for (const auto& c : r.candidates)
    cands.push_back({{"dim", c.subspace.dim()},
                     {"basis", to_json(c.subspace.matrix())},
                     {"summand_dim", c.complement.dim()},
                     {"summand_basis", to_json(c.complement.matrix())},
                     {"certificate_spread", c.certificate_spread}});
  Json j;
  j["definition"] = to_int(r.definition);
  j["generator_dim"] = r.generator.dim();
  j["generator_basis"] = to_json(r.generator.matrix());
  j["stabilizer_dim"] = r.stabilizer_dim;
  j["extra_generators"] = r.extra_generators_used.size();
  j["refinement_changed"] = r.refinement_changed;
  j["result"] = r.none() ? "NONE" : "FOUND";
  j["candidates"] = cands;
  return j;
}

inline Json to_json(const MinimalSearchResult& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"generator_dim", l.generator_dim},
                      {"evaluated", l.evaluated},
                      {"structured", l.structured},
                      {"best_dim", l.best_dim}});
  Json j;
  j["group"] = to_json(r.spec);
  j["definition"] = to_int(r.definition);
  j["minimal_dim"] = r.dim;
  j["expected_dim"] = expected_minimal_dim(r.spec, r.definition);
  j["match"] = r.dim == expected_minimal_dim(r.spec, r.definition);
  j["evaluated"] = r.total_evaluated;
  j["levels"] = levels;
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return j;
}

inline Json to_json(const CounterexampleReport& r, double agree_tol) {
  Json diag;
  for (const auto& d : r.diagnostics) diag[d.name] = d.value;
  Json j;
  j["example"] = r.example_id;
  j["r"] = r.r;
  j["steps"] = r.steps;
  j["gap_numeric"] = r.gap_numeric;
  j["gap_closed_form"] = r.gap_closed_form;
  j["gap_difference"] = std::abs(r.gap_numeric - r.gap_closed_form);
  j["verdict"] = r.verdict();
  j["agrees"] = r.agrees(agree_tol);
  if (r.factor) j["factor"] = *r.factor;
  j["start"] = to_json(r.start);
  j["end"] = to_json(r.end);
  j["diagnostics"] = diag;
  return j;
}

inline Json to_json(const CoefficientVector& c) {
  return {{"context", std::string(family_token(c.context))},
          {"values", c.values},
          {"norm", c.norm()},
          {"fit_residual", c.fit_residual},
          {"probe_residual", c.probe_residual}};
}

}  // namespace holoforge
