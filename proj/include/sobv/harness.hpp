#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sobv/bv.hpp"
#include "sobv/smtlib.hpp"
#include "sobv/so2.hpp"

/// Random instances and the pipeline that checks the reduction by running
/// both deciders (and optionally an external solver) on the same input.
namespace sobv::harness {

struct GeneratorConfig {
  std::uint64_t seed = 0;
  unsigned max_arity = 3;
  unsigned max_symbols = 3;
  unsigned max_depth = 4;
  unsigned min_quantifiers = 1;
  unsigned max_quantifiers = 3;
  /// Relative weights of inner matrix nodes. Applications weigh twice the
  /// connectives so the index construction is exercised densely.
  unsigned weight_apply = 2;
  unsigned weight_and = 1;
  unsigned weight_not = 1;
  /// Weight of stopping early with a leaf above the depth limit.
  unsigned weight_leaf = 1;
  /// Weight of a literal against 3 per proposition when picking a leaf.
  unsigned weight_literal = 1;
  /// Upper bound on the sum of 2^arity over the generated symbols.
  std::uint64_t bit_budget = 24;
};

/// Throws Error when the configuration cannot produce a formula.
void check(const GeneratorConfig& cfg);

/// Closed prenex formula; the same config always gives the same formula.
so2::Formula gen_random_so2(const GeneratorConfig& cfg);

/// Random quantifier-free matrix over the given symbols.
so2::Formula gen_random_matrix(std::uint64_t seed, const std::vector<so2::FunctionSymbol>& symbols,
                               unsigned max_depth);

struct CrossCheckOptions {
  so2::Limits so2_limits;
  bv::Limits bv_limits;
  bool relax_ordering = false;
  std::optional<smtlib::SolverConfig> external;
};

struct InstanceRecord {
  std::optional<std::uint64_t> seed;
  std::string source;
  Status so2 = Status::ResourceExceeded;
  Status bv = Status::ResourceExceeded;
  std::optional<smtlib::ExternalVerdict> external;
  std::uint64_t so2_size = 0;
  std::uint64_t bv_size = 0;
  std::chrono::microseconds so2_time{0};
  std::chrono::microseconds bv_time{0};
  std::string diagnostic;

  /// Either decider ran out of budget. Not a disagreement.
  bool skipped() const;
  /// Decisions present and all equal; external unknowns are ignored,
  /// external errors count as disagreement.
  bool agrees() const;
  double size_ratio() const;
};

InstanceRecord cross_check(const so2::Formula& f, const CrossCheckOptions& options);

struct CrossCheckReport {
  std::vector<InstanceRecord> records;

  std::size_t checked() const;
  std::size_t skipped() const;
  std::size_t disagreements() const;
  std::size_t external_decided() const;
  double max_size_ratio() const;
  bool failed() const { return disagreements() != 0; }
};

/// Generates and checks `count` instances with seeds cfg.seed, cfg.seed+1, ...
/// on up to `threads` workers; records stay in seed order.
CrossCheckReport run_cross_check(const GeneratorConfig& cfg, std::size_t count,
                                 const CrossCheckOptions& options, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Files

/// Flat key=value configuration; '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(std::string_view text);

/// Applies recognised generator keys; throws Error on unknown keys or bad
/// values. Keys belonging to other consumers are listed in `ignore`.
void apply_config(const ConfigMap& config, GeneratorConfig& cfg,
                  const std::vector<std::string>& ignore = {});

/// One `name:arity=bits` line per symbol, bits most significant first.
so2::Interpretation parse_interpretation(std::string_view text);

}  // namespace sobv::harness
