#include "mri/coeff_text.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mri::coeff {

namespace {

double parse_decimal(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad coefficient literal '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

double parse_number(std::string_view token) {
  const auto slash = token.find('/');
  if (slash == std::string_view::npos) return parse_decimal(token);
  const double num = parse_decimal(token.substr(0, slash));
  const double den = parse_decimal(token.substr(slash + 1));
  if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(token) + "'");
  return num / den;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::vector<std::string>> tokenize(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

}  // namespace mri::coeff
