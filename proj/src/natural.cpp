#include "sobv/natural.hpp"

#include <limits>

#include "sobv/verdict.hpp"

namespace sobv {

std::uint64_t scalar_length(const Natural& n) {
  if (n <= 0) return 1;
  return static_cast<std::uint64_t>(boost::multiprecision::msb(n)) + 1;
}

Natural pow2(std::uint64_t k) {
  Natural r = 0;
  boost::multiprecision::bit_set(r, static_cast<unsigned>(k));
  return r;
}

std::optional<Natural> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  Natural r = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    r *= 10;
    r += c - '0';
  }
  return r;
}

std::optional<std::uint64_t> to_u64(const Natural& n) {
  if (n < 0 || n > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return static_cast<std::uint64_t>(n);
}

std::string to_decimal(const Natural& n) { return n.str(); }

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Sat:
      return "sat";
    case Status::Unsat:
      return "unsat";
    case Status::ResourceExceeded:
      return "resource-exceeded";
  }
  return "?";
}

}  // namespace sobv
