#include "sobv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "sobv/errors.hpp"
#include "sobv/reduction.hpp"

namespace sobv::harness {

namespace {

// mt19937_64 is fully specified by the standard; the reduction to a range is
// done here rather than by a distribution so output is stable across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  bool coin() { return below(2) == 1; }

 private:
  std::mt19937_64 engine_;
};

std::string symbol_name(bool proposition, std::size_t i) {
  static const char* kFunctions[] = {"f", "g", "h", "k"};
  static const char* kPropositions[] = {"p", "q", "r", "s"};
  const auto& names = proposition ? kPropositions : kFunctions;
  if (i < 4) return names[i];
  return std::string(names[0]) + std::to_string(i);
}

std::uint64_t table_bits(const std::vector<unsigned>& arities) {
  std::uint64_t total = 0;
  for (unsigned a : arities) total += std::uint64_t{1} << a;
  return total;
}

class MatrixGenerator {
 public:
  MatrixGenerator(Rng& rng, const std::vector<so2::FunctionSymbol>& symbols, const GeneratorConfig& cfg)
      : rng_(rng), symbols_(symbols), cfg_(cfg) {
    for (const auto& s : symbols_) {
      if (s.is_proposition()) propositions_.push_back(s);
    }
  }

  so2::Formula node(unsigned depth) {
    if (depth == 0 || symbols_.empty()) return leaf();
    std::uint64_t total = cfg_.weight_apply + cfg_.weight_and + cfg_.weight_not + cfg_.weight_leaf;
    std::uint64_t r = rng_.below(total);
    if (r < cfg_.weight_apply) {
      const auto& s = symbols_[rng_.below(symbols_.size())];
      std::vector<so2::Formula> args;
      for (unsigned i = 0; i < s.arity; ++i) args.push_back(node(depth - 1));
      return so2::Formula::apply(s, std::move(args));
    }
    r -= cfg_.weight_apply;
    if (r < cfg_.weight_and) {
      so2::Formula lhs = node(depth - 1);
      return so2::Formula::conj(std::move(lhs), node(depth - 1));
    }
    r -= cfg_.weight_and;
    if (r < cfg_.weight_not) return so2::Formula::negate(node(depth - 1));
    return leaf();
  }

 private:
  so2::Formula leaf() {
    std::uint64_t total = 3 * propositions_.size() + cfg_.weight_literal;
    if (total == 0) return so2::Formula::literal(rng_.coin());
    std::uint64_t r = rng_.below(total);
    if (r < 3 * propositions_.size()) return so2::Formula::apply(propositions_[r / 3], {});
    return so2::Formula::literal(rng_.coin());
  }

  Rng& rng_;
  const std::vector<so2::FunctionSymbol>& symbols_;
  const GeneratorConfig& cfg_;
  std::vector<so2::FunctionSymbol> propositions_;
};

}  // namespace

void check(const GeneratorConfig& cfg) {
  if (cfg.min_quantifiers > cfg.max_quantifiers) {
    throw Error("min-quantifiers exceeds max-quantifiers");
  }
  if (cfg.max_arity > 6) throw Error("max-arity above 6 cannot be decided by enumeration");
  if (cfg.weight_apply + cfg.weight_and + cfg.weight_not + cfg.weight_leaf == 0) {
    throw Error("all node weights are zero");
  }
  if (std::min(cfg.min_quantifiers, cfg.max_symbols) > cfg.bit_budget) {
    throw Error("bit budget cannot hold the minimum number of quantified symbols");
  }
}

so2::Formula gen_random_so2(const GeneratorConfig& cfg) {
  check(cfg);
  Rng rng(cfg.seed);
  unsigned hi = std::min(cfg.max_quantifiers, cfg.max_symbols);
  unsigned lo = std::min(cfg.min_quantifiers, hi);
  auto count = static_cast<unsigned>(lo + rng.below(hi - lo + 1));

  std::vector<unsigned> arities;
  for (unsigned i = 0; i < count; ++i) arities.push_back(static_cast<unsigned>(rng.below(cfg.max_arity + 1)));
  while (table_bits(arities) > cfg.bit_budget) {
    auto it = std::max_element(arities.begin(), arities.end());
    if (*it == 0) {
      arities.pop_back();
    } else {
      --*it;
    }
  }
  // Proper functions are quantified before propositions.
  std::stable_sort(arities.begin(), arities.end(), [](unsigned a, unsigned b) {
    return (a > 0) && (b == 0);
  });

  std::vector<so2::Quantifier> quantifiers;
  std::vector<so2::FunctionSymbol> symbols;
  std::size_t functions = 0, propositions = 0;
  for (unsigned a : arities) {
    bool prop = a == 0;
    so2::FunctionSymbol s{symbol_name(prop, prop ? propositions++ : functions++), a};
    symbols.push_back(s);
    quantifiers.push_back({rng.coin(), s});
  }
  MatrixGenerator gen(rng, symbols, cfg);
  return so2::with_prefix(quantifiers, gen.node(cfg.max_depth));
}

so2::Formula gen_random_matrix(std::uint64_t seed, const std::vector<so2::FunctionSymbol>& symbols,
                               unsigned max_depth) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  Rng rng(seed);
  MatrixGenerator gen(rng, symbols, cfg);
  return gen.node(max_depth);
}

// ---------------------------------------------------------------------------
// Cross-checking

bool InstanceRecord::skipped() const {
  return so2 == Status::ResourceExceeded || bv == Status::ResourceExceeded;
}

bool InstanceRecord::agrees() const {
  if (skipped()) return true;
  if (so2 != bv) return false;
  if (!external) return true;
  switch (external->result) {
    case smtlib::ExternalVerdict::Result::Sat:
      return bv == Status::Sat;
    case smtlib::ExternalVerdict::Result::Unsat:
      return bv == Status::Unsat;
    case smtlib::ExternalVerdict::Result::Unknown:
      return true;
    case smtlib::ExternalVerdict::Result::Error:
      return false;
  }
  return false;
}

double InstanceRecord::size_ratio() const {
  return so2_size == 0 ? 0.0 : static_cast<double>(bv_size) / static_cast<double>(so2_size);
}

InstanceRecord cross_check(const so2::Formula& f, const CrossCheckOptions& options) {
  using Clock = std::chrono::steady_clock;
  InstanceRecord rec;
  rec.source = so2::to_string(f);
  rec.so2_size = so2::formula_size(f);

  so2::Limits so2_limits = options.so2_limits;
  so2_limits.relax_ordering = options.relax_ordering;
  auto t0 = Clock::now();
  Verdict sv = so2::decide_bruteforce(f, so2_limits);
  rec.so2_time = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0);
  rec.so2 = sv.status;

  auto reduced = reduction::reduce(f, {options.relax_ordering});
  rec.bv_size = bv::formula_size(reduced.formula);
  t0 = Clock::now();
  Verdict bvv = bv::solve(reduced.formula, options.bv_limits);
  rec.bv_time = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0);
  rec.bv = bvv.status;

  if (!sv.diagnostic.empty()) rec.diagnostic = sv.diagnostic;
  if (!bvv.diagnostic.empty()) rec.diagnostic += (rec.diagnostic.empty() ? "" : "; ") + bvv.diagnostic;

  if (options.external) {
    auto script = smtlib::emit_smt2(bv::lower_indexing(reduced.formula));
    rec.external = smtlib::run_external_solver(script, *options.external);
  }
  return rec;
}

std::size_t CrossCheckReport::checked() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.skipped(); }));
}

std::size_t CrossCheckReport::skipped() const { return records.size() - checked(); }

std::size_t CrossCheckReport::disagreements() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.agrees(); }));
}

std::size_t CrossCheckReport::external_decided() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) {
    return r.external && (r.external->result == smtlib::ExternalVerdict::Result::Sat ||
                          r.external->result == smtlib::ExternalVerdict::Result::Unsat);
  }));
}

double CrossCheckReport::max_size_ratio() const {
  double m = 0;
  for (const auto& r : records) m = std::max(m, r.size_ratio());
  return m;
}

CrossCheckReport run_cross_check(const GeneratorConfig& cfg, std::size_t count,
                                 const CrossCheckOptions& options, unsigned threads) {
  check(cfg);
  CrossCheckReport report;
  report.records.resize(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        GeneratorConfig c = cfg;
        c.seed = cfg.seed + i;
        InstanceRecord rec = cross_check(gen_random_so2(c), options);
        rec.seed = c.seed;
        report.records[i] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  threads = std::max(1U, threads);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return report;
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  auto n = parse_decimal(value);
  auto v = n ? to_u64(*n) : std::nullopt;
  if (!v) throw Error("config key '" + key + "' needs a non-negative integer, got '" + value + "'");
  return *v;
}

}  // namespace

ConfigMap parse_config(std::string_view text) {
  ConfigMap out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_config(const ConfigMap& config, GeneratorConfig& cfg, const std::vector<std::string>& ignore) {
  const std::map<std::string, std::uint64_t GeneratorConfig::*> wide = {
      {"seed", &GeneratorConfig::seed},
      {"bit-budget", &GeneratorConfig::bit_budget},
  };
  const std::map<std::string, unsigned GeneratorConfig::*> narrow = {
      {"max-arity", &GeneratorConfig::max_arity},
      {"max-symbols", &GeneratorConfig::max_symbols},
      {"max-depth", &GeneratorConfig::max_depth},
      {"min-quantifiers", &GeneratorConfig::min_quantifiers},
      {"max-quantifiers", &GeneratorConfig::max_quantifiers},
      {"weight-apply", &GeneratorConfig::weight_apply},
      {"weight-and", &GeneratorConfig::weight_and},
      {"weight-not", &GeneratorConfig::weight_not},
      {"weight-leaf", &GeneratorConfig::weight_leaf},
      {"weight-literal", &GeneratorConfig::weight_literal},
  };
  for (const auto& [key, value] : config) {
    if (auto it = wide.find(key); it != wide.end()) {
      cfg.*(it->second) = parse_unsigned(key, value);
    } else if (auto jt = narrow.find(key); jt != narrow.end()) {
      std::uint64_t v = parse_unsigned(key, value);
      if (v > 1000000) throw Error("config key '" + key + "' out of range");
      cfg.*(jt->second) = static_cast<unsigned>(v);
    } else if (std::find(ignore.begin(), ignore.end(), key) == ignore.end()) {
      throw Error("unknown config key '" + key + "'");
    }
  }
}

so2::Interpretation parse_interpretation(std::string_view text) {
  so2::Interpretation out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    auto eq = line.find('=');
    if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
      throw Error("interpretation line " + std::to_string(lineno) + ": expected name:arity=bits");
    }
    std::string name = trim(line.substr(0, colon));
    auto arity = parse_decimal(trim(line.substr(colon + 1, eq - colon - 1)));
    if (name.empty() || !arity || *arity > 40) {
      throw Error("interpretation line " + std::to_string(lineno) + ": bad name or arity");
    }
    try {
      auto table = so2::TruthTable::from_msb_string(static_cast<unsigned>(*arity), trim(line.substr(eq + 1)));
      if (!out.emplace(name, std::move(table)).second) {
        throw Error("'" + name + "' given twice");
      }
    } catch (const Error& e) {
      throw Error("interpretation line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sobv::harness
