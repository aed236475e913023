// dval: command-line front end over spec files.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dval/algorithms.hpp"
#include "dval/report.hpp"
#include "dval/specfile.hpp"

using namespace dval;

namespace {

enum Exit { kOk = 0, kFail = 1, kContract = 2, kInconclusive = 3, kParse = 4 };

struct Options {
  std::string spec_path;
  long prec = 0;
  long prec_cap = kDefaultPrecCap;
  std::uint64_t seed = 1;
  std::vector<std::string> ramify;
  bool verbose = false;
};

ValuationSpec load(const Options& o) {
  SpecSource src = load_spec_file(o.spec_path);
  for (const auto& r : o.ramify) src = ramify(src, RamifyDirective::parse(r));
  for (const auto& w : src.warnings) std::cerr << "warning: " << w << "\n";
  return to_spec(src, o.prec);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path, 0, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ContractError("cannot write " + path);
  f << text;
}

EscalationLog escalation_sink(const Options& o) {
  if (!o.verbose) return {};
  return [](const std::string& m) { std::cerr << m << "\n"; };
}

int run_replay(const Options& o, const std::string& log_path, const std::string& expect_path) {
  const ValuationSpec spec = load(o);
  const std::string text = read_file(log_path);
  const TransformLog log = TransformLog::parse(text, spec.n, spec.s);
  // replay step by step and compare against the values recorded in comments
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> recorded;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto hash = line.find('#');
    std::string note = hash == std::string::npos ? "" : line.substr(hash + 1);
    note.erase(0, note.find_first_not_of(' '));
    while (!note.empty() && (note.back() == ' ' || note.back() == '\r')) note.pop_back();
    recorded.push_back(note);
  }
  TransformLog fresh(spec.n);
  ValuationSpec cur = spec;
  int diffs = 0;
  for (std::size_t k = 0; k < log.steps().size(); ++k) {
    cur = fresh.apply(cur, log.steps()[k], o.prec_cap);
    if (log.steps()[k].kind == TransformStep::Kind::Permute || recorded[k].empty()) continue;
    const auto& s = fresh.summaries().back();
    const std::string got = s.before.to_string() + " -> " + s.after.to_string();
    if (got != recorded[k]) {
      std::cout << "step " << k + 1 << ": recorded " << recorded[k] << ", replayed " << got << "\n";
      ++diffs;
    }
  }
  const std::string final_spec = describe(cur);
  std::cout << final_spec;
  if (!expect_path.empty() && read_file(expect_path) != final_spec) {
    std::cout << "final spec differs from " << expect_path << "\n";
    ++diffs;
  }
  return diffs == 0 ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric discrete valuations: values, uniformizers, residue fields"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--prec", o.prec, "working precision (default: the spec's own)");
  app.add_option("--prec-cap", o.prec_cap, "ceiling for automatic precision escalation")->capture_default_str();
  app.add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();
  app.add_option("--ramify", o.ramify, "substitute T<i>=S^<e> before building the spec");
  app.add_flag("-v,--verbose", o.verbose, "report precision escalation on stderr");

  std::string expr, log_out, log_path, expect_path;
  std::size_t max_iters = 64, tower_depth = 8, samples = 20, ext_samples = 50;
  unsigned max_degree = 5;

  auto add_spec = [&](CLI::App* c) { c->add_option("spec", o.spec_path, "spec file")->required(); };

  auto* value_cmd = app.add_subcommand("value", "value of a K-element, e.g. \"X2-X1\"");
  add_spec(value_cmd);
  value_cmd->add_option("expr", expr, "element of K_n")->required();

  auto* residue_cmd = app.add_subcommand("residue", "residue of a K-element of value 0");
  add_spec(residue_cmd);
  residue_cmd->add_option("expr", expr, "element of K_n")->required();

  auto* unif_cmd = app.add_subcommand("uniformizer", "search for an element of value 1");
  add_spec(unif_cmd);
  unif_cmd->add_option("--max-iters", max_iters)->capture_default_str();
  unif_cmd->add_option("--log-out", log_out, "write the transformation log here");

  auto* field_cmd = app.add_subcommand("residue-field", "construct the residue field generators");
  add_spec(field_cmd);
  field_cmd->add_option("--tower-depth", tower_depth)->capture_default_str();
  field_cmd->add_option("--max-iters", max_iters)->capture_default_str();
  field_cmd->add_option("--log-out", log_out, "write the transformation log here");

  auto* ideal_cmd = app.add_subcommand("implicit-ideal", "truncated generators W_k of the implicit ideal");
  add_spec(ideal_cmd);
  ideal_cmd->add_option("--tower-depth", tower_depth)->capture_default_str();

  auto* order_cmd = app.add_subcommand("check-order", "is v the usual order function?");
  add_spec(order_cmd);
  order_cmd->add_option("--max-degree", max_degree)->capture_default_str();
  order_cmd->add_option("--samples", samples, "samples per degree")->capture_default_str();

  auto* ext_cmd = app.add_subcommand("extend", "order-function extension or rank-lift table");
  add_spec(ext_cmd);
  ext_cmd->add_option("--samples", ext_samples, "sampled K-elements to verify")->capture_default_str();
  ext_cmd->add_option("--max-degree", max_degree)->capture_default_str();
  ext_cmd->add_option("--tower-depth", tower_depth)->capture_default_str();

  auto* replay_cmd = app.add_subcommand("replay", "re-apply a transformation log and diff the results");
  add_spec(replay_cmd);
  replay_cmd->add_option("log", log_path, "log file")->required();
  replay_cmd->add_option("--expect", expect_path, "file with the expected final spec description");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    ResidueFieldOptions ro;
    ro.tower_depth = tower_depth;
    ro.max_iters = max_iters;
    ro.prec_cap = o.prec_cap;
    if (*value_cmd) {
      const ValuationSpec spec = load(o);
      const Value v = value(spec, text::parse_kelem(expr, spec.n), o.prec_cap, escalation_sink(o));
      std::cout << v.to_string() << (v.kernel_suspect ? " (kernel suspected)" : "") << "\n";
      return v.is_exact() ? kOk : kInconclusive;
    }
    if (*residue_cmd) {
      const ValuationSpec spec = load(o);
      std::cout << residue(spec, text::parse_kelem(expr, spec.n), o.prec_cap).to_string() << "\n";
      return kOk;
    }
    if (*unif_cmd) {
      const UniformizerResult r = find_uniformizer(load(o), max_iters, o.prec_cap);
      if (!log_out.empty()) write_file(log_out, r.log.serialize());
      std::cout << to_json(r).dump(2) << "\n";
      return r.status == UniformizerResult::Status::IterationCap ? kInconclusive : kOk;
    }
    if (*field_cmd) {
      const ResidueFieldReport r = build_residue_field(load(o), ro);
      if (!log_out.empty()) write_file(log_out, r.log.serialize());
      std::cout << to_json(r).dump(2) << "\n";
      return r.inconclusive ? kInconclusive : kOk;
    }
    if (*ideal_cmd) {
      const ResidueFieldReport r = build_residue_field(load(o), ro);
      for (const auto& w : implicit_ideal(r)) std::cout << w.to_string() << "\n";
      return r.inconclusive ? kInconclusive : kOk;
    }
    if (*order_cmd) {
      const OrderCheck c = check_order_function(load(o), max_degree, samples, o.seed, o.prec_cap);
      if (c.pass) std::cout << "Pass\n";
      else std::cout << "Fail degree " << c.degree << " witness " << c.witness->to_string() << " value "
                     << c.witness_value.to_string() << "\n";
      return kOk;
    }
    if (*ext_cmd) {
      const ResidueFieldReport r = build_residue_field(load(o), ro);
      const ExtensionReport x = extend_to_order_function(r, ext_samples, o.seed, max_degree);
      std::cout << to_json(x).dump(2) << "\n";
      return kOk;
    }
    if (*replay_cmd) return run_replay(o, log_path, expect_path);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const KernelSuspicionError& e) {
    std::cerr << "kernel suspicion: " << e.what() << "\n";
    return kInconclusive;
  } catch (const PrecisionCeilingError& e) {
    std::cerr << "precision ceiling: " << e.what() << "\n";
    return kInconclusive;
  } catch (const InconclusiveError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContract;
  }
  return kOk;
}
