#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dyadlab/extrapolation.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/rearrangement.hpp"
#include "dyadlab/space.hpp"

namespace dyadlab {

using Json = nlohmann::ordered_json;

Json interval_to_json(const DyadicInterval& I);  // "k:i"
DyadicInterval interval_from_json(const Json& j);

Json collection_to_json(const IntervalCollection& c);  // ["k:i", ...]
IntervalCollection collection_from_json(const Json& j);

Json rational_to_json(const Rational& r);  // {"num","den","value"}
Json dyadrat_to_json(const DyadRat& r);

/// {"source_depth": N, "target_depth": L, "pairs": [["k:i","k':i'"], ...]};
/// omitted sources default to the identity.
Json rearrangement_to_json(const RearrangementMap& tau);
RearrangementMap rearrangement_from_json(const Json& j);

Json space_to_json(const SpaceSpec& s);  // {"kind":"scalar"} | {"kind":"lp","r":...,"d":...}
SpaceSpec space_from_json(const Json& j);

/// {"depth": N, "space": {...}, "mean": [...], "coeffs": {"k:i": [...]}};
/// zero coefficients are omitted.
Json expansion_to_json(const HaarExpansion& f);
HaarExpansion expansion_from_json(const Json& j);

Json estimate_to_json(const NormEstimate& e);

Json semenov_to_json(const SemenovResult& r);
Json distortion_to_json(const DistortionResult& r);

/// {"root":"k:i","parts":[["k:i",...],...],"p":...,"p_star":...,"kappa":...}
Json decomposition_to_json(const CDecomposition& d);
CDecomposition decomposition_from_json(const Json& j);

Json maximal_report_to_json(const MaximalReport& r);
Json monotone_report_to_json(const MonotoneReport& r);
Json extrapolation_bound_report_to_json(const ExtrapolationBoundReport& r);
Json condition_c_report_to_json(const ConditionCReport& r);
Json h1_extrapolation_report_to_json(const H1ExtrapolationReport& r);

/// "scalar" or "lp:r:d" (r may be "inf").
SpaceSpec parse_space_spec(const std::string& text);

/// "3" or "1..5" as an inclusive integer range.
std::vector<int> parse_range(const std::string& text);

/// Step-value dump: one line per cell, "cell,v0,v1,...".
void write_step_csv(std::ostream& out, std::span<const Vec> cells);

}  // namespace dyadlab
