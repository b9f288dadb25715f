#include "etlab/json_io.hpp"

#include <stdexcept>

namespace etlab {

namespace {

json mask_to_json(Mask m) {
  json arr = json::array();
  for (int i = 0; i < 64; ++i)
    if (m >> i & 1) arr.push_back(i);
  return arr;
}

Mask mask_from_json(const json& arr, int ground_size) {
  if (!arr.is_array()) throw std::invalid_argument("set must be an array of indices");
  Mask m = 0;
  int prev = -1;
  for (const json& v : arr) {
    if (!v.is_number_integer()) throw std::invalid_argument("set index must be an integer");
    const int i = v.get<int>();
    if (i < 0 || i >= ground_size)
      throw std::invalid_argument("set index outside the ground set");
    if (i <= prev) throw std::invalid_argument("set indices must be strictly ascending");
    prev = i;
    m |= Mask(1) << i;
  }
  return m;
}

}  // namespace

json family_to_json(const Family& f) {
  json sets = json::array();
  for (Mask m : f.members) sets.push_back(mask_to_json(m));
  return json{{"ground_size", f.ground.size}, {"sets", std::move(sets)}};
}

Family family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("ground_size") || !j.contains("sets"))
    throw std::invalid_argument("family needs ground_size and sets");
  const int n = j.at("ground_size").get<int>();
  if (n < 0 || n > kMaxGroundSize)
    throw std::invalid_argument("ground_size outside [0, 63]");
  std::vector<Mask> members;
  for (const json& s : j.at("sets")) members.push_back(mask_from_json(s, n));
  return Family::of(GroundSet{n}, std::move(members));
}

json to_json(const RootResult& r) {
  return json{{"value", r.value},
              {"status", to_string(r.status)},
              {"iterations", r.iterations}};
}

json to_json(const ThresholdReport& r) {
  return json{{"p_e", to_json(r.p_e)},
              {"q", to_json(r.q)},
              {"p_c", to_json(r.p_c)},
              {"tolerance", r.tolerance}};
}

json to_json(const CoverSolution& s) {
  return json{{"cover", family_to_json(s.cover)},
              {"cost", s.cost},
              {"optimal", s.optimal},
              {"nodes_explored", s.nodes_explored}};
}

json to_json(const QValue& q) {
  return json{{"q", to_json(q.q)}, {"witness", to_json(q.witness)}};
}

json to_json(const ConstantsProfile& prof) {
  return json{{"mode", to_string(prof.mode)}, {"L", prof.L},
              {"delta", prof.delta},          {"c", prof.c},
              {"epsilon", prof.epsilon},      {"l0", prof.l0},
              {"epsilon1", prof.epsilon1},    {"bell_base", prof.bell_base},
              {"paper_ok", prof.paper_ok}};
}

ConstantsProfile profile_from_json(const json& j) {
  ConstantsProfile prof;
  prof.mode = mode_from_string(j.at("mode").get<std::string>());
  prof.L = j.at("L").get<double>();
  prof.delta = j.at("delta").get<double>();
  prof.c = j.at("c").get<double>();
  prof.epsilon = j.at("epsilon").get<double>();
  prof.l0 = j.at("l0").get<int>();
  prof.epsilon1 = j.at("epsilon1").get<double>();
  prof.bell_base = j.at("bell_base").get<int>();
  prof.paper_ok = j.at("paper_ok").get<bool>();
  return prof;
}

json to_json(const DclReport& r) {
  return json{{"w", r.w},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"holds", r.holds},
              {"sigma_sum", r.sigma_sum},
              {"sum2_lhs", r.sum2_lhs},
              {"sum2_rhs", r.sum2_rhs},
              {"sum2_holds", r.sum2_holds},
              {"exhaustive", r.exhaustive},
              {"evaluated", r.evaluated},
              {"lhs_ci", r.lhs_ci},
              {"degenerate_w0", r.degenerate_w0}};
}

json to_json(const BadFractionReport& r) {
  return json{{"w", r.w},
              {"fraction_bad", r.fraction_bad},
              {"budget", r.budget},
              {"within_budget", r.within_budget},
              {"exhaustive", r.exhaustive},
              {"evaluated", r.evaluated},
              {"ci", r.ci}};
}

json to_json(const StepReport& r) {
  return json{{"f_h", r.f_h},
              {"f_minimal", r.f_minimal},
              {"f_large", r.f_large},
              {"f_small", r.f_small},
              {"l1", r.l1},
              {"next_bound", r.next_bound},
              {"lift_ok", r.lift_ok},
              {"leg_subadd", r.leg_subadd},
              {"leg_lift", r.leg_lift},
              {"leg_good", r.leg_good},
              {"leg_next", r.leg_next},
              {"hypothesis_holds", r.hypothesis_holds},
              {"step_holds", r.step_holds()}};
}

json to_json(const TheoremVerdict& v) {
  return json{{"mode", to_string(v.mode)},
              {"l", v.l},
              {"m_l", v.m_l},
              {"f_value", v.f_value},
              {"hypothesis_holds", v.hypothesis_holds},
              {"degenerate", v.degenerate},
              {"target_fraction", v.target_fraction},
              {"achieved_fraction", v.achieved_fraction},
              {"pass", v.pass},
              {"certified", v.certified},
              {"note", v.note}};
}

namespace {

json node_to_json(const TraceNode& n) {
  json j{{"ground_size", n.ground_size},
         {"l", n.l},
         {"family", family_to_json(n.family)},
         {"to_root", n.to_root},
         {"f_value", n.f_value},
         {"f_certified", n.f_certified},
         {"hypothesis_bound", n.hypothesis_bound},
         {"hypothesis_holds", n.hypothesis_holds},
         {"status", n.status},
         {"w", n.w},
         {"total_w", n.total_w},
         {"records_truncated", n.records_truncated}};
  if (!n.stuck_reason.empty()) j["stuck_reason"] = n.stuck_reason;
  json recs = json::array();
  for (const WRecord& r : n.records) {
    json jr{{"w", mask_to_json(r.w_mask)},
            {"sigma", r.sigma},
            {"good", r.good},
            {"large_size", r.large_size}};
    if (r.mu) jr["mu"] = *r.mu;
    recs.push_back(std::move(jr));
  }
  j["records"] = std::move(recs);
  if (n.dcl) j["dcl"] = to_json(*n.dcl);
  if (n.bad) j["bad"] = to_json(*n.bad);
  if (n.chosen_w) j["chosen_w"] = mask_to_json(*n.chosen_w);
  if (n.step) j["step"] = to_json(*n.step);
  if (n.child) j["child"] = node_to_json(*n.child);
  return j;
}

}  // namespace

json trace_to_json(const FragmentationTrace& tr) {
  json inputs{{"family", family_to_json(tr.family)},
              {"p", tr.p},
              {"profile", to_json(tr.profile)},
              {"l", tr.l},
              {"depth_cap", tr.depth_cap},
              {"sampling",
               json{{"exhaustive", tr.sampling.exhaustive},
                    {"exhaustive_cap", tr.sampling.exhaustive_cap},
                    {"count", tr.sampling.count},
                    {"seed", tr.sampling.seed}}},
              {"exact_cap", tr.exact_cap},
              {"node_budget", tr.node_budget},
              {"record_cap", tr.record_cap}};
  json j{{"schema", "fragmentation-trace/v1"}, {"inputs", std::move(inputs)}};
  if (tr.root) j["root"] = node_to_json(*tr.root);
  return j;
}

RecheckResult recheck_trace(const json& stored) {
  if (stored.value("schema", std::string()) != "fragmentation-trace/v1")
    return {false, "unrecognized schema"};
  const json& in = stored.at("inputs");
  const Family fam = family_from_json(in.at("family"));
  const Probability p(in.at("p").get<double>());
  const ConstantsProfile prof = profile_from_json(in.at("profile"));
  const json& js = in.at("sampling");
  Sampling sampling;
  sampling.exhaustive = js.at("exhaustive").get<bool>();
  sampling.exhaustive_cap = js.at("exhaustive_cap").get<std::uint64_t>();
  sampling.count = js.at("count").get<std::uint64_t>();
  sampling.seed = js.at("seed").get<std::uint64_t>();
  CoverOptions copt;
  copt.node_budget = in.at("node_budget").get<std::uint64_t>();

  const FragmentationTrace fresh =
      run_induction(fam, p, prof, in.at("l").get<int>(), in.at("depth_cap").get<int>(),
                    sampling, in.at("exact_cap").get<int>(), copt,
                    in.at("record_cap").get<std::uint64_t>());
  const json fresh_json = trace_to_json(fresh);
  if (fresh_json.dump() == stored.dump()) return {true, ""};
  const json patch = json::diff(stored, fresh_json);
  std::string detail = "diverges";
  if (!patch.empty() && patch.front().contains("path"))
    detail = "diverges at " + patch.front().at("path").get<std::string>();
  return {false, detail};
}

}  // namespace etlab
