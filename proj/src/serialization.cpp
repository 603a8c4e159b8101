#include "dyadlab/serialization.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dyadlab {

namespace {

Json exponent_to_json(double r) {
  if (std::isinf(r)) return "inf";
  return r;
}

double exponent_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("parse error: unknown exponent \"" + j.get<std::string>() + "\"");
  }
  return j.get<double>();
}

}  // namespace

Json interval_to_json(const DyadicInterval& I) { return I.str(); }

DyadicInterval interval_from_json(const Json& j) { return DyadicInterval::parse(j.get<std::string>()); }

Json collection_to_json(const IntervalCollection& c) {
  Json out = Json::array();
  for (const auto& I : c.members()) out.push_back(I.str());
  return out;
}

IntervalCollection collection_from_json(const Json& j) {
  std::vector<DyadicInterval> members;
  for (const auto& item : j) members.push_back(interval_from_json(item));
  return IntervalCollection(std::move(members));
}

Json rational_to_json(const Rational& r) {
  return Json{{"num", r.num()}, {"den", r.den()}, {"value", r.to_double()}};
}

Json dyadrat_to_json(const DyadRat& r) {
  return Json{{"num", r.num()}, {"den", std::int64_t{1} << r.log2_den()}, {"value", r.to_double()}};
}

Json rearrangement_to_json(const RearrangementMap& tau) {
  Json pairs = Json::array();
  for (std::size_t i = 0; i < interval_count(tau.source_depth()); ++i) {
    const DyadicInterval src = interval_at(i);
    const DyadicInterval dst = tau.apply_at(i);
    if (src != dst) pairs.push_back(Json::array({src.str(), dst.str()}));
  }
  return Json{{"source_depth", tau.source_depth()}, {"target_depth", tau.target_depth()}, {"pairs", pairs}};
}

RearrangementMap rearrangement_from_json(const Json& j) {
  const int n = j.at("source_depth").get<int>();
  const int l = j.at("target_depth").get<int>();
  std::vector<DyadicInterval> table(interval_count(n));
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = interval_at(i);
  if (j.contains("pairs"))
    for (const auto& pair : j.at("pairs")) {
      const DyadicInterval src = DyadicInterval::parse(pair.at(0).get<std::string>());
      if (src.level > n) throw std::invalid_argument("invalid-depth: pair source outside D_0^N");
      table[heap_index(src)] = DyadicInterval::parse(pair.at(1).get<std::string>());
    }
  return RearrangementMap(n, l, std::move(table));
}

Json space_to_json(const SpaceSpec& s) {
  if (s.is_scalar()) return Json{{"kind", "scalar"}};
  return Json{{"kind", "lp"}, {"r", exponent_to_json(s.r)}, {"d", s.dim}};
}

SpaceSpec space_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "scalar") return SpaceSpec::scalar();
  if (kind == "lp") return SpaceSpec::lr(exponent_from_json(j.at("r")), j.at("d").get<int>());
  throw std::invalid_argument("parse error: unknown space kind \"" + kind + "\"");
}

Json expansion_to_json(const HaarExpansion& f) {
  Json coeffs = Json::object();
  for (std::size_t i = 0; i < f.coefficient_count(); ++i) {
    const Vec& a = f.coeff_at(i);
    bool zero = true;
    for (double c : a) zero = zero && c == 0.0;
    if (!zero) coeffs[interval_at(i).str()] = a;
  }
  return Json{{"depth", f.depth()}, {"space", space_to_json(f.space())}, {"mean", f.mean()}, {"coeffs", coeffs}};
}

HaarExpansion expansion_from_json(const Json& j) {
  HaarExpansion f(j.at("depth").get<int>(), space_from_json(j.at("space")));
  if (j.contains("mean")) f.set_mean(j.at("mean").get<Vec>());
  if (j.contains("coeffs"))
    for (const auto& [key, value] : j.at("coeffs").items())
      f.set_coeff(DyadicInterval::parse(key), value.get<Vec>());
  return f;
}

namespace {
const char* kind_name(EstimateKind k) {
  switch (k) {
    case EstimateKind::exact: return "exact";
    case EstimateKind::lower_bound: return "lower_bound";
    case EstimateKind::upper_bound: return "upper_bound";
  }
  return "unknown";
}
}  // namespace

Json estimate_to_json(const NormEstimate& e) {
  Json out{{"value", e.value},
           {"kind", kind_name(e.kind)},
           {"restarts", e.restarts},
           {"iterations", e.iterations},
           {"seed", e.seed}};
  out["witness"] = expansion_to_json(e.witness);
  if (!e.witness_vectors.empty()) out["witness_vectors"] = e.witness_vectors;
  return out;
}

Json semenov_to_json(const SemenovResult& r) {
  return Json{{"value", rational_to_json(r.value)},
              {"exact", r.exact},
              {"witness", collection_to_json(r.witness)}};
}

Json distortion_to_json(const DistortionResult& r) {
  return Json{{"expand", rational_to_json(r.expand)},
              {"contract", rational_to_json(r.contract)},
              {"exact", r.exact},
              {"expand_witness", collection_to_json(r.expand_witness)},
              {"contract_witness", collection_to_json(r.contract_witness)}};
}

Json decomposition_to_json(const CDecomposition& d) {
  Json parts = Json::array();
  for (const auto& part : d.parts) parts.push_back(collection_to_json(part));
  return Json{{"root", d.root.str()}, {"parts", parts}, {"p", d.p}, {"p_star", d.p_star}, {"kappa", d.kappa}};
}

CDecomposition decomposition_from_json(const Json& j) {
  CDecomposition d;
  d.root = DyadicInterval::parse(j.at("root").get<std::string>());
  for (const auto& part : j.at("parts")) d.parts.push_back(collection_from_json(part));
  d.p = j.at("p").get<double>();
  d.p_star = j.at("p_star").get<double>();
  d.kappa = j.at("kappa").get<double>();
  return d;
}

Json maximal_report_to_json(const MaximalReport& r) {
  return Json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"kappa", r.kappa}, {"pass", r.pass}};
}

Json monotone_report_to_json(const MonotoneReport& r) {
  Json out{{"pass", r.pass}, {"samples", r.samples}, {"worst_margin", r.worst_margin}};
  if (!r.pass) {
    out["counterexample"] = Json{{"sample", r.failing_sample}, {"cell", r.failing_cell}, {"lhs", r.lhs}, {"rhs", r.rhs}};
  }
  return out;
}

Json extrapolation_bound_report_to_json(const ExtrapolationBoundReport& r) {
  return Json{{"q_norm_lower", r.q_norm_lower},
              {"p_norm", r.p_norm},
              {"factor", r.factor},
              {"bound", r.bound},
              {"pass", r.pass}};
}

Json condition_c_report_to_json(const ConditionCReport& r) {
  return Json{{"c1", Json{{"pass", r.c1}, {"sum", r.c1_sum}, {"bound", r.c1_bound}}},
              {"c2", Json{{"pass", r.c2}, {"betas", r.betas}, {"betas_exact", r.betas_exact}, {"sum", r.c2_sum}, {"bound", r.c2_bound}}},
              {"c3", Json{{"pass", r.c3}, {"samples", r.c3_samples}, {"worst_margin", r.c3_worst_margin}}},
              {"pass", r.pass}};
}

Json h1_extrapolation_report_to_json(const H1ExtrapolationReport& r) {
  return Json{{"condition_c_pass", r.condition_c_pass},
              {"h1_lower", r.h1_lower},
              {"lp_estimate", r.lp_estimate},
              {"factor", r.factor},
              {"bound", r.bound},
              {"pass", r.pass}};
}

SpaceSpec parse_space_spec(const std::string& text) {
  if (text == "scalar") return SpaceSpec::scalar();
  if (text.rfind("lp:", 0) == 0) {
    const auto rest = text.substr(3);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("parse error: expected lp:<r>:<d>");
    const std::string rtext = rest.substr(0, colon);
    const double r = rtext == "inf" ? std::numeric_limits<double>::infinity() : std::stod(rtext);
    return SpaceSpec::lr(r, std::stoi(rest.substr(colon + 1)));
  }
  throw std::invalid_argument("parse error: unknown space \"" + text + "\" (want scalar or lp:<r>:<d>)");
}

std::vector<int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {std::stoi(text)};
  const int lo = std::stoi(text.substr(0, dots));
  const int hi = std::stoi(text.substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("parse error: empty range \"" + text + "\"");
  std::vector<int> out;
  for (int v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

void write_step_csv(std::ostream& out, std::span<const Vec> cells) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out << c;
    for (double v : cells[c]) out << "," << v;
    out << "\n";
  }
}

}  // namespace dyadlab
