#include "dval/report.hpp"

namespace dval {

namespace {

Json terms_json(const std::vector<std::pair<RatFunc, long>>& terms) {
  Json a = Json::array();
  for (const auto& [c, m] : terms) a.push_back({{"coeff", c.to_string()}, {"exponent", m}});
  return a;
}

Json spec_json(const ValuationSpec& s) {
  Json a = Json::array();
  for (std::size_t i = 0; i < s.n; ++i) a.push_back("Y" + std::to_string(i + 1) + " -> " + s.psi[i].to_string());
  return a;
}

const char* status_name(UniformizerResult::Status s) {
  switch (s) {
    case UniformizerResult::Status::Found: return "Found";
    case UniformizerResult::Status::GcdPlateau: return "GcdPlateau";
    case UniformizerResult::Status::IterationCap: return "IterationCap";
  }
  return "";
}

}  // namespace

Json to_json(const Value& v) {
  Json j{{"tag", v.is_exact() ? "Exact" : "AtLeast"}, {"amount", v.amount}};
  if (v.kernel_suspect) j["kernel_suspect"] = true;
  return j;
}

Json to_json(const UniformizerResult& r) {
  Json j;
  j["status"] = r.status_string();
  if (r.status == UniformizerResult::Status::Found) j["index"] = r.index + 1;
  j["sweeps"] = r.sweeps;
  j["min_history"] = r.min_history;
  j["log"] = r.log.serialize();
  j["spec_after"] = spec_json(r.spec_after);
  return j;
}

Json to_json(const ResidueFieldReport& r) {
  Json j;
  j["uniformizer"] = status_name(r.uniformizer);
  j["dimension"] = r.dimension;
  j["m"] = r.m;
  Json base = Json::array();
  for (const auto& c : r.base_algebraics) base.push_back(c.to_string());
  j["base_algebraics"] = base;
  Json gens = Json::array();
  for (const auto& g : r.generators) {
    Json e;
    e["variable"] = "Y" + std::to_string(g.index + 1);
    switch (g.kind) {
      case GeneratorEntry::Kind::Transcendental:
        e["kind"] = "Transcendental";
        e["u"] = g.u.to_string();
        e["prelim"] = terms_json(g.prelim);
        e["representative"] = g.representative ? Json(g.representative->to_string()) : Json(nullptr);
        break;
      case GeneratorEntry::Kind::AlgebraicTower: {
        e["kind"] = "AlgebraicTower";
        Json m = Json::array();
        for (const auto& x : g.members) m.push_back(x.to_string());
        e["members"] = m;
        e["truncated"] = g.truncated;
        e["chain_length"] = g.chain.size();
        break;
      }
      case GeneratorEntry::Kind::Unclassified:
        e["kind"] = "Unclassified";
        break;
    }
    gens.push_back(e);
  }
  j["generators"] = gens;
  j["restarts"] = r.restarts;
  j["inconclusive"] = r.inconclusive;
  if (!r.note.empty()) j["note"] = r.note;
  j["log"] = r.log.serialize();
  j["spec_after"] = spec_json(r.spec_after);
  return j;
}

Json to_json(const OrderCheck& c) {
  Json j;
  j["verdict"] = c.pass ? "Pass" : "Fail";
  j["samples"] = c.samples;
  if (!c.pass) {
    j["degree"] = c.degree;
    j["witness"] = c.witness ? c.witness->to_string() : "";
    j["witness_value"] = to_json(c.witness_value);
  }
  return j;
}

Json to_json(const std::vector<TruncatedXSeries>& ws) {
  Json a = Json::array();
  for (const auto& w : ws) a.push_back(w.to_string());
  return a;
}

Json to_json(const ExtensionReport& x) {
  Json j;
  j["case"] = x.case_number;
  j["rank"] = x.rank;
  Json t = Json::array();
  for (const auto& [name, v] : x.table) t.push_back({{"variable", name}, {"value", v}});
  j["table"] = t;
  j[x.case_number == 1 ? "order_function" : "order_function_on_Y"] = to_json(x.order);
  if (x.case_number == 2) {
    j["implicit_ideal"] = to_json(x.implicit);
    j["samples"] = x.samples;
    j["skipped"] = x.skipped;
    j["mismatches"] = x.mismatches;
    if (!x.mismatch_examples.empty()) j["mismatch_examples"] = x.mismatch_examples;
  }
  return j;
}

}  // namespace dval
