#pragma once

// Parsing helpers for the embedded coefficient text blocks (RK tableaus and
// MRI-GARK coupling tables). See docs/formats.md for the schema.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mri::coeff {

/// Parses "p/q", "-p/q" or a decimal literal.
double parse_number(std::string_view token);

/// 64-bit FNV-1a hash, used to pin the embedded coefficient text.
std::uint64_t fnv1a(std::string_view text);

std::string hex64(std::uint64_t v);

/// Splits a coefficient block into non-empty, comment-stripped lines, each
/// split into whitespace separated tokens.
std::vector<std::vector<std::string>> tokenize(std::string_view text);

}  // namespace mri::coeff
