#pragma once

#include <string>

#include <json.hpp>

#include "etlab/cover.hpp"
#include "etlab/family.hpp"
#include "etlab/fragmentation.hpp"
#include "etlab/measures.hpp"

namespace etlab {

using nlohmann::json;

// Families travel as {"ground_size": N, "sets": [[ascending indices], ...]}.
// Loading validates the range and ordering and recanonicalizes.
json family_to_json(const Family& f);
Family family_from_json(const json& j);

json to_json(const RootResult& r);
json to_json(const ThresholdReport& r);
json to_json(const CoverSolution& s);
json to_json(const QValue& q);
json to_json(const ConstantsProfile& prof);
ConstantsProfile profile_from_json(const json& j);
json to_json(const DclReport& r);
json to_json(const BadFractionReport& r);
json to_json(const StepReport& r);
json to_json(const TheoremVerdict& v);

// Full recorded induction, schema "fragmentation-trace/v1". The inputs climb
// in whole (family, p, profile, l, depth_cap, sampling, exact_cap, cover node
// budget, record_cap) so the run can be reproduced from the file alone.
// Doubles are emitted by the shortest round-trip form, so equality of dumps
// is equality of values.
json trace_to_json(const FragmentationTrace& tr);

struct RecheckResult {
  bool match = false;
  std::string detail;  // first point of divergence, empty on match
};

// Reruns the induction from the trace's embedded inputs and compares the
// freshly serialized result against the stored one, byte for byte.
RecheckResult recheck_trace(const json& stored);

}  // namespace etlab
