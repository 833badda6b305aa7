#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace sobv {

/// Arbitrary-magnitude natural number. Used for every scalar of a bit-vector
/// formula: widths, constant values and extraction bounds.
using Natural = boost::multiprecision::cpp_int;

/// Number of bits needed to write n in binary; 1 for n = 0.
std::uint64_t scalar_length(const Natural& n);

/// 2^k.
Natural pow2(std::uint64_t k);

/// Parses a non-empty run of decimal digits. Returns nullopt on anything else.
std::optional<Natural> parse_decimal(std::string_view text);

/// Converts n to uint64 when it fits.
std::optional<std::uint64_t> to_u64(const Natural& n);

std::string to_decimal(const Natural& n);

}  // namespace sobv
