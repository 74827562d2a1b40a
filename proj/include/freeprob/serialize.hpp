#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "freeprob/algebra.hpp"
#include "freeprob/info.hpp"
#include "freeprob/maxcorr.hpp"
#include "freeprob/projections.hpp"
#include "freeprob/transforms.hpp"

namespace freeprob::serialize {

// ordered_json keeps insertion order, so a fixed construction order gives
// byte-identical output for identical inputs
using json = nlohmann::ordered_json;

inline json scalar_json(const Rational& v) {
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}
inline json scalar_json(double v) { return v; }

template <class T>
json json_of(const moments::MomentSequence<T>& m) {
  json vals = json::array();
  for (const auto& v : m.m) vals.push_back(scalar_json(v));
  return {{"kind", "moments"},
          {"order", m.order()},
          {"mode", std::is_same_v<T, Rational> ? "exact" : "float"},
          {"values", vals}};
}

template <class T>
json json_of(const moments::CumulantSequence<T>& k) {
  json vals = json::array();
  for (const auto& v : k.k) vals.push_back(scalar_json(v));
  return {{"kind", "cumulants"},
          {"order", k.order()},
          {"mode", std::is_same_v<T, Rational> ? "exact" : "float"},
          {"values", vals}};
}

template <class T>
json json_of(const algebra::Polynomial<T>& p) {
  json terms = json::array();
  for (const auto& [w, c] : p.terms()) terms.push_back({{"word", w}, {"coeff", scalar_json(c)}});
  return terms;
}

inline json json_of(const transforms::GridDensity& g) {
  return {{"kind", "grid_density"}, {"a", g.a}, {"b", g.b}, {"cells", g.rho.size()},
          {"rho", g.rho}};
}

inline std::string csv_of(const transforms::GridDensity& g) {
  std::ostringstream os;
  os.precision(17);
  os << "t,rho\n";
  for (size_t i = 0; i < g.rho.size(); ++i) os << g.cell_mid(i) << "," << g.rho[i] << "\n";
  return os.str();
}

inline json json_of(const transforms::Measure& mu) {
  if (const auto* a = std::get_if<transforms::Atomic>(&mu)) {
    json atoms = json::array();
    for (auto& [t, w] : a->atoms) atoms.push_back({t, w});
    return {{"type", "atomic"}, {"atoms", atoms}};
  }
  if (const auto* g = std::get_if<transforms::GridDensity>(&mu)) return json_of(*g);
  const auto& s = std::get<transforms::Semicircular>(mu);
  return {{"type", "semicircular"}, {"mean", s.mean}, {"variance", s.variance}};
}

// {type, params} measure schema: semicircular{mean,variance}, atomic{atoms},
// uniform{a,b,cells}, grid_density{a,b,rho}
inline transforms::Measure measure_from_json(const json& j) {
  const std::string type = j.at("type");
  if (type == "semicircular")
    return transforms::Semicircular{j.value("mean", 0.0), j.value("variance", 1.0)};
  if (type == "atomic") {
    transforms::Atomic a;
    for (const auto& e : j.at("atoms")) a.atoms.emplace_back(e.at(0), e.at(1));
    if (a.atoms.empty()) throw std::domain_error("measure_from_json: empty atom list");
    return a;
  }
  if (type == "uniform") {
    const double lo = j.at("a"), hi = j.at("b");
    const int cells = j.value("cells", 2000);
    if (!(hi > lo) || cells < 1) throw std::domain_error("measure_from_json: bad uniform range");
    return transforms::GridDensity{lo, hi, std::vector<double>(cells, 1.0 / (hi - lo))};
  }
  if (type == "grid_density") {
    transforms::GridDensity g{j.at("a"), j.at("b"), j.at("rho").get<std::vector<double>>()};
    if (g.rho.empty() || !(g.b > g.a)) throw std::domain_error("measure_from_json: bad grid");
    return g;
  }
  throw std::domain_error("measure_from_json: unknown measure type '" + type + "'");
}

inline json json_of(const maxcorr::CorrelationReport& rep) {
  auto mat = [](const Eigen::MatrixXd& M) {
    json out = json::array();
    for (int i = 0; i < M.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
      out.push_back(row);
    }
    return out;
  };
  auto vec = [](const Eigen::VectorXd& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
  };
  return {{"kind", "max_correlation"},
          {"m", rep.m},
          {"n", rep.n},
          {"D", rep.D},
          {"distribution", rep.distribution},
          {"rho_max", rep.rho_max},
          {"theoretical", rep.theoretical},
          {"deviation", rep.deviation},
          {"optimizer_f", vec(rep.optimizer_f)},
          {"optimizer_g", vec(rep.optimizer_g)},
          {"dropped_A", rep.dropped_A},
          {"dropped_B", rep.dropped_B},
          {"gram_A", mat(rep.gram_A)},
          {"gram_B", mat(rep.gram_B)},
          {"cross_C", mat(rep.cross_C)}};
}

inline json json_of(const info::FisherResult& r) {
  return {{"kind", "fisher"},
          {"D", r.D},
          {"phi", r.phi},
          {"conjugate_coeffs", r.conjugate_coeffs},
          {"residuals", r.residuals},
          {"phi_by_degree", r.phi_by_degree},
          {"divergent", r.divergent},
          {"rank_deficient", r.rank_deficient},
          {"growth_ratio", r.growth_ratio}};
}

inline json json_of(const info::MonotonicityReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"n", r.n},
                    {"chi", r.chi_finite ? json(r.chi) : json("-inf")},
                    {"phi", r.phi_finite ? json(r.phi) : json("inf")},
                    {"chi_finite", r.chi_finite},
                    {"phi_finite", r.phi_finite},
                    {"phi_growth", r.phi_growth}});
  return {{"kind", "monotonicity"},
          {"measure", rep.measure_id},
          {"D", rep.D},
          {"N", rep.N},
          {"grid", rep.grid},
          {"rows", rows},
          {"chi_nondecreasing", rep.chi_nondecreasing},
          {"phi_nonincreasing", rep.phi_nonincreasing}};
}

inline std::string csv_of(const info::MonotonicityReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "n,chi,phi,chi_finite,phi_finite\n";
  for (const auto& r : rep.rows)
    os << r.n << "," << r.chi << "," << (r.phi_finite ? r.phi : INFINITY) << "," << r.chi_finite
       << "," << r.phi_finite << "\n";
  return os.str();
}

template <class T>
json json_of(const projections::ProjectionResult<T>& r) {
  return {{"kind", "projection"},
          {"subset", r.subset},
          {"input", json_of(r.input)},
          {"projection", json_of(r.projection)},
          {"residual_norm", r.residual_norm},
          {"gram_condition", r.gram_condition},
          {"ridge", r.ridge}};
}

}  // namespace freeprob::serialize
