#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sobv {

enum class Status { Sat, Unsat, ResourceExceeded };

std::string_view to_string(Status s);

/// One bound name and its value, printed most-significant bit first.
struct WitnessEntry {
  std::string name;
  std::string bits;

  bool operator==(const WitnessEntry&) const = default;
};

struct Verdict {
  Status status = Status::ResourceExceeded;
  std::string diagnostic;
  /// Values of the outermost existential block, set only for Sat.
  std::vector<WitnessEntry> witness;

  bool sat() const { return status == Status::Sat; }
  bool unsat() const { return status == Status::Unsat; }
};

}  // namespace sobv
