// sobv: command-line front end for the SO2 -> BV2 toolkit.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sobv/bv.hpp"
#include "sobv/errors.hpp"
#include "sobv/harness.hpp"
#include "sobv/reduction.hpp"
#include "sobv/smtlib.hpp"
#include "sobv/so2.hpp"

namespace {

using namespace sobv;

enum Exit : int {
  kOk = 0,
  kError = 1,
  kResource = 2,
  kDisagreement = 3,
  kSat = 10,
  kUnsat = 20,
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_smt2(const std::string& path) { return std::filesystem::path(path).extension() == ".smt2"; }

int exit_for(const Verdict& v) {
  switch (v.status) {
    case Status::Sat: return kSat;
    case Status::Unsat: return kUnsat;
    case Status::ResourceExceeded: return kResource;
  }
  return kError;
}

void print_verdict(const Verdict& v) {
  std::cout << to_string(v.status) << '\n';
  for (const auto& w : v.witness) std::cout << w.name << " = " << w.bits << '\n';
  if (!v.diagnostic.empty()) std::cerr << v.diagnostic << '\n';
}

struct Settings {
  harness::GeneratorConfig gen;
  so2::Limits so2_limits;
  bv::Limits bv_limits;
  bool relax_ordering = false;
  bool external = false;
  std::string solver = "z3";
  std::vector<std::string> solver_args;
  std::uint64_t timeout_ms = 10000;
  unsigned threads = 1;
};

const std::vector<std::string> kHarnessKeys = {"arity-cap", "width-cap", "solver", "solver-args",
                                               "timeout-ms", "threads", "relax-ordering", "external"};

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw Error("config key '" + key + "' needs true or false");
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  auto n = parse_decimal(v);
  auto r = n ? to_u64(*n) : std::nullopt;
  if (!r) throw Error("config key '" + key + "' needs a non-negative integer");
  return *r;
}

void load_config(const std::string& path, Settings& s) {
  auto cfg = harness::parse_config(read_file(path));
  harness::apply_config(cfg, s.gen, kHarnessKeys);
  for (const auto& [k, v] : cfg) {
    if (k == "arity-cap") s.so2_limits.max_quantified_arity = static_cast<unsigned>(parse_u64(k, v));
    if (k == "width-cap") s.bv_limits.max_width = parse_u64(k, v);
    if (k == "bit-budget") {
      s.so2_limits.bit_budget = parse_u64(k, v);
      s.bv_limits.bit_budget = parse_u64(k, v);
    }
    if (k == "solver") s.solver = v;
    if (k == "solver-args") {
      std::istringstream words(v);
      s.solver_args.clear();
      for (std::string w; words >> w;) s.solver_args.push_back(w);
    }
    if (k == "timeout-ms") s.timeout_ms = parse_u64(k, v);
    if (k == "threads") s.threads = static_cast<unsigned>(parse_u64(k, v));
    if (k == "relax-ordering") s.relax_ordering = parse_bool(k, v);
    if (k == "external") s.external = parse_bool(k, v);
  }
}

harness::CrossCheckOptions options_from(const Settings& s) {
  harness::CrossCheckOptions o;
  o.so2_limits = s.so2_limits;
  o.bv_limits = s.bv_limits;
  o.relax_ordering = s.relax_ordering;
  if (s.external) {
    o.external = smtlib::SolverConfig{s.solver, s.solver_args, std::chrono::milliseconds(s.timeout_ms)};
  }
  return o;
}

nlohmann::json to_json(const harness::InstanceRecord& r) {
  nlohmann::json j;
  if (r.seed) j["seed"] = *r.seed;
  j["source"] = r.source;
  j["so2"] = std::string(to_string(r.so2));
  j["bv2"] = std::string(to_string(r.bv));
  if (r.external) {
    j["external"] = std::string(smtlib::to_string(r.external->result));
    j["external_ms"] = r.external->wall_time.count();
    if (!r.external->diagnostic.empty()) j["external_diagnostic"] = r.external->diagnostic;
  }
  j["so2_size"] = r.so2_size;
  j["bv2_size"] = r.bv_size;
  j["so2_us"] = r.so2_time.count();
  j["bv2_us"] = r.bv_time.count();
  j["agree"] = r.agrees();
  j["skipped"] = r.skipped();
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  return j;
}

void print_record(const harness::InstanceRecord& r) {
  std::cout << "seed " << (r.seed ? std::to_string(*r.seed) : "-") << ": so2=" << to_string(r.so2)
            << " bv2=" << to_string(r.bv);
  if (r.external) std::cout << " external=" << smtlib::to_string(r.external->result);
  std::cout << " |phi|=" << r.so2_size << " |phi_bv|=" << r.bv_size;
  if (!r.agrees()) std::cout << " DISAGREE";
  if (r.skipped()) std::cout << " (skipped)";
  std::cout << '\n';
}

int finish_report(const harness::CrossCheckReport& report, const std::string& json_path,
                  const std::string& repro_dir, bool quiet) {
  for (const auto& r : report.records) {
    if (!quiet || !r.agrees()) print_record(r);
    if (!r.agrees()) std::cout << "  repro: " << r.source << '\n';
  }
  std::cout << "instances " << report.records.size() << ", checked " << report.checked()
            << ", skipped " << report.skipped() << ", disagreements " << report.disagreements();
  if (report.external_decided()) std::cout << ", external decided " << report.external_decided();
  std::cout << ", max size ratio " << report.max_size_ratio() << '\n';

  if (!json_path.empty()) {
    nlohmann::json j;
    j["instances"] = nlohmann::json::array();
    for (const auto& r : report.records) j["instances"].push_back(to_json(r));
    j["summary"] = {{"instances", report.records.size()},
                    {"checked", report.checked()},
                    {"skipped", report.skipped()},
                    {"disagreements", report.disagreements()},
                    {"external_decided", report.external_decided()},
                    {"max_size_ratio", report.max_size_ratio()}};
    std::ofstream(json_path) << j.dump(2) << '\n';
  }
  if (!repro_dir.empty()) {
    std::filesystem::create_directories(repro_dir);
    for (const auto& r : report.records) {
      if (r.agrees()) continue;
      std::string name = "seed-" + (r.seed ? std::to_string(*r.seed) : std::string("unknown")) + ".so2";
      std::ofstream(std::filesystem::path(repro_dir) / name) << r.source << '\n';
    }
  }
  return report.failed() ? kDisagreement : kOk;
}

void add_harness_flags(CLI::App* cmd, Settings& s, std::string& config_path) {
  cmd->add_option("--config", config_path, "key=value configuration file");
  cmd->add_option("--seed", s.gen.seed, "first seed");
  cmd->add_option("--max-arity", s.gen.max_arity);
  cmd->add_option("--max-symbols", s.gen.max_symbols);
  cmd->add_option("--max-depth", s.gen.max_depth);
  cmd->add_option("--threads", s.threads);
  cmd->add_flag("--external", s.external, "also run an external SMT solver");
  cmd->add_option("--solver", s.solver, "external solver executable");
  cmd->add_option("--solver-arg", s.solver_args, "extra solver argument (repeatable)");
  cmd->add_option("--timeout-ms", s.timeout_ms, "external solver timeout");
  cmd->add_flag("--relax-ordering", s.relax_ordering);
}

// Options given on the command line win over the config file.
void merge_config(CLI::App* cmd, const std::string& config_path, Settings& s) {
  if (config_path.empty()) return;
  Settings from_file = s;
  load_config(config_path, from_file);
  auto keep = [&](const char* flag, auto member) {
    if (cmd->count(flag) == 0) s.*member = from_file.*member;
  };
  keep("--threads", &Settings::threads);
  keep("--external", &Settings::external);
  keep("--solver", &Settings::solver);
  keep("--solver-arg", &Settings::solver_args);
  keep("--timeout-ms", &Settings::timeout_ms);
  keep("--relax-ordering", &Settings::relax_ordering);
  s.so2_limits = from_file.so2_limits;
  s.bv_limits = from_file.bv_limits;
  auto keep_gen = [&](const char* flag, auto member) {
    if (cmd->count(flag) == 0) s.gen.*member = from_file.gen.*member;
  };
  keep_gen("--seed", &harness::GeneratorConfig::seed);
  keep_gen("--max-arity", &harness::GeneratorConfig::max_arity);
  keep_gen("--max-symbols", &harness::GeneratorConfig::max_symbols);
  keep_gen("--max-depth", &harness::GeneratorConfig::max_depth);
  s.gen.min_quantifiers = from_file.gen.min_quantifiers;
  s.gen.max_quantifiers = from_file.gen.max_quantifiers;
  s.gen.weight_apply = from_file.gen.weight_apply;
  s.gen.weight_and = from_file.gen.weight_and;
  s.gen.weight_not = from_file.gen.weight_not;
  s.gen.weight_leaf = from_file.gen.weight_leaf;
  s.gen.weight_literal = from_file.gen.weight_literal;
  s.gen.bit_budget = from_file.gen.bit_budget;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SO2 to BV2 reduction toolkit"};
  app.require_subcommand(1);

  std::string file;
  bool allow_free = false;
  bool relax = false;
  bool reduced = false;
  bool lower = false;
  std::string emit = "text";
  std::string output;
  std::string interp_path;
  Settings settings;
  std::string config_path;
  std::size_t count = 100;
  double seconds = 60;
  std::size_t max_instances = 0;
  std::string json_path;
  std::string repro_dir;
  bool quiet = false;

  auto* parse = app.add_subcommand("parse", "parse a .so2 file and print it back");
  parse->add_option("file", file)->required();
  parse->add_flag("--allow-free", allow_free, "accept unquantified symbols");

  auto* validate = app.add_subcommand("validate", "check that a .so2 formula is closed and prenex");
  validate->add_option("file", file)->required();
  validate->add_flag("--relax-ordering", relax, "report quantifier ordering as a warning");
  validate->add_flag("--allow-free", allow_free, "parse unquantified symbols and report them");

  auto* eval = app.add_subcommand("eval", "evaluate a .so2 formula under an interpretation");
  eval->add_option("file", file)->required();
  eval->add_option("--interp", interp_path, "name:arity=bits lines")->required();
  eval->add_option("--arity-cap", settings.so2_limits.max_quantified_arity);

  auto* size = app.add_subcommand("size", "print the formula size");
  size->add_option("file", file)->required();
  size->add_flag("--reduced", reduced, "size of the BV2 reduction of a .so2 input");

  auto* reduce = app.add_subcommand("reduce", "compile a .so2 formula to BV2");
  reduce->add_option("file", file)->required();
  reduce->add_option("--emit", emit, "text or smt2")->check(CLI::IsMember({"text", "smt2"}));
  reduce->add_flag("--lower", lower, "lower dynamic indexing in text output");
  reduce->add_option("-o,--output", output, "write to a file instead of stdout");
  reduce->add_flag("--relax-ordering", relax);

  auto* solve = app.add_subcommand("solve", "decide a BV2 formula by quantifier expansion");
  solve->add_option("file", file, ".smt2 file, or .so2 to solve its reduction")->required();
  solve->add_option("--bit-budget", settings.bv_limits.bit_budget);
  solve->add_option("--width-cap", settings.bv_limits.max_width);
  solve->add_flag("--relax-ordering", relax);

  auto* decide = app.add_subcommand("decide", "decide a .so2 formula by brute force");
  decide->add_option("file", file)->required();
  decide->add_option("--bit-budget", settings.so2_limits.bit_budget);
  decide->add_option("--arity-cap", settings.so2_limits.max_quantified_arity);
  decide->add_flag("--relax-ordering", relax);

  auto* cross = app.add_subcommand("cross-check", "check the reduction on random instances");
  cross->add_option("--count", count, "number of instances");
  add_harness_flags(cross, settings, config_path);
  cross->add_option("--json", json_path, "write the report as JSON");
  cross->add_option("--repro-dir", repro_dir, "write disagreeing instances here");
  cross->add_flag("-q,--quiet", quiet, "print only disagreements and the summary");

  auto* fuzz = app.add_subcommand("fuzz", "cross-check until a time budget or a disagreement");
  fuzz->add_option("--seconds", seconds, "time budget");
  fuzz->add_option("--max-instances", max_instances, "stop after this many (0 = no limit)");
  add_harness_flags(fuzz, settings, config_path);
  fuzz->add_option("--json", json_path, "write the report as JSON");
  fuzz->add_option("--repro-dir", repro_dir, "write disagreeing instances here");
  fuzz->add_flag("-q,--quiet", quiet, "print only disagreements and the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    if (*parse) {
      auto f = so2::parse(read_file(file), {allow_free});
      std::cout << so2::to_string(f) << '\n';
      return kOk;
    }
    if (*validate) {
      auto f = so2::parse(read_file(file), {allow_free});
      auto diags = so2::validate_prenex_closed(f, {relax});
      for (const auto& d : diags) std::cout << (d.warning ? "warning: " : "error: ") << d.message << '\n';
      if (!so2::passes(diags)) return kError;
      std::cout << "ok\n";
      return kOk;
    }
    if (*eval) {
      auto f = so2::parse(read_file(file), {true});
      auto interp = harness::parse_interpretation(read_file(interp_path));
      std::cout << (so2::eval(f, interp, settings.so2_limits) ? 1 : 0) << '\n';
      return kOk;
    }
    if (*size) {
      if (is_smt2(file)) {
        std::cout << bv::formula_size(smtlib::parse_smt2(read_file(file))) << '\n';
      } else {
        auto f = so2::parse(read_file(file));
        if (reduced) {
          std::cout << bv::formula_size(reduction::reduce(f, {true}).formula) << '\n';
        } else {
          std::cout << so2::formula_size(f) << '\n';
        }
      }
      return kOk;
    }
    if (*reduce) {
      auto f = so2::parse(read_file(file));
      auto r = reduction::reduce(f, {relax});
      std::string text;
      if (emit == "smt2") {
        text = smtlib::emit_smt2(bv::lower_indexing(r.formula)).text;
      } else {
        text = bv::to_string(lower ? bv::lower_indexing(r.formula) : r.formula) + "\n";
      }
      if (output.empty()) {
        std::cout << text;
      } else {
        std::ofstream(output) << text;
      }
      return kOk;
    }
    if (*solve) {
      bv::Formula f = is_smt2(file) ? smtlib::parse_smt2(read_file(file))
                                    : reduction::reduce(so2::parse(read_file(file)), {relax}).formula;
      auto v = bv::solve(f, settings.bv_limits);
      print_verdict(v);
      return exit_for(v);
    }
    if (*decide) {
      auto f = so2::parse(read_file(file));
      settings.so2_limits.relax_ordering = relax;
      auto v = so2::decide_bruteforce(f, settings.so2_limits);
      print_verdict(v);
      return exit_for(v);
    }
    if (*cross) {
      merge_config(cross, config_path, settings);
      auto report = harness::run_cross_check(settings.gen, count, options_from(settings), settings.threads);
      return finish_report(report, json_path, repro_dir, quiet);
    }
    if (*fuzz) {
      merge_config(fuzz, config_path, settings);
      auto opts = options_from(settings);
      harness::CrossCheckReport report;
      auto deadline = std::chrono::steady_clock::now() +
                      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(seconds));
      harness::GeneratorConfig g = settings.gen;
      while (std::chrono::steady_clock::now() < deadline &&
             (max_instances == 0 || report.records.size() < max_instances)) {
        auto rec = harness::cross_check(harness::gen_random_so2(g), opts);
        rec.seed = g.seed++;
        bool bad = !rec.agrees();
        report.records.push_back(std::move(rec));
        if (bad) break;
      }
      return finish_report(report, json_path, repro_dir, quiet);
    }
  } catch (const ResourceExceeded& e) {
    std::cerr << "resource exceeded: " << e.what() << '\n';
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
