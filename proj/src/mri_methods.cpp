#include <cmath>
#include <stdexcept>
#include <string>

#include "mri/coeff_text.hpp"
#include "mri/mri_method.hpp"

namespace mri {

namespace {

// Coupling table text: "name", "stages", "order P Phat", "dc ...", "kind ...",
// then for each k a "gamma k" line followed by `stages` rows, then one
// "embed k ..." line per k. Entries are rationals or 17-digit decimals.

constexpr std::string_view kERK33 = R"(name ERK33
stages 4
order 3 2
dc 0 1/3 1/3 1/3
kind trivial fast fast fast
gamma 0
0     0    0 0
1/3   0    0 0
-1/3  2/3  0 0
0     -2/3 1 0
gamma 1
0   0 0    0
0   0 0    0
0   0 0    0
1/2 0 -1/2 0
embed 0 1/12 -1/3 7/12 0
embed 1 0 0 0 0
)";

constexpr std::string_view kERK45a = R"(name ERK45a
stages 6
order 4 3
dc 0 1/5 1/5 1/5 1/5 1/5
kind trivial fast fast fast fast fast
gamma 0
0 0 0 0 0 0
1/5 0 0 0 0 0
-53/16 281/80 0 0 0 0
-36562993/71394880 34903117/17848720 -88770499/71394880 0 0 0
-7631593/71394880 -166232021/35697440 6068517/1519040 8644289/8924360 0 0
277061/303808 -209323/1139280 -1360217/1139280 -148789/56964 147889/45120 0
gamma 1
0 0 0 0 0 0
0 0 0 0 0 0
503/80 -503/80 0 0 0 0
-1365537/35697440 4963773/7139488 -1465833/2231090 0 0 0
66974357/35697440 21445367/7139488 -3 -8388609/4462180 0 0
-18227/7520 2 1 5 -41933/7520 0
# corrected embedding row
embed 0 -1482837/759520 175781/71205 -790577/1139280 -6379/56964 47/96 0
# minimum-norm order-3 completion
embed 1 2.2452184418345027 -0.54715855156895987 -1.9154732941748993 -0.20366429023893712 0.4210776941482936 0
)";

constexpr std::string_view kIRK21a = R"(name IRK21a
stages 3
order 2 1
dc 0 1 0
kind trivial fast implicit
gamma 0
0    0 0
1    0 0
-1/2 0 1/2
embed 0 0 0 0
)";

// lambda = 0.43586652150845899942 (ESDIRK3 diagonal)
constexpr std::string_view kESDIRK34a = R"(name ESDIRK34a
stages 7
order 3 2
dc 0 1/3 0 1/3 0 1/3 0
kind trivial fast implicit fast implicit fast implicit
gamma 0
0 0 0 0 0 0 0
1/3 0 0 0 0 0 0
-0.435866521508459 0 0.435866521508459 0 0 0 0
-0.3045790611944505 0 0.63791239452778383 0 0 0 0
0.21169131056402666 0 -0.64755783207248566 0 0.435866521508459 0 0
0.4454209388055495 0 0.88137848056161983 0 -0.993466086033836 0 0
-0.435866521508459 0 0 0 0 0 0.435866521508459
embed 0 -0.435866521508459 0 0 0 0 0.435866521508459 0
)";

StageKind parse_kind(const std::string& s) {
  if (s == "trivial") return StageKind::trivial;
  if (s == "fast") return StageKind::fast_ivp;
  if (s == "implicit") return StageKind::implicit_algebraic;
  if (s == "explicit") return StageKind::explicit_algebraic;
  throw std::invalid_argument("unknown stage kind '" + s + "'");
}

std::vector<double> row_of(const std::vector<std::string>& toks, std::size_t skip, int n, const std::string& what) {
  if (toks.size() != skip + static_cast<std::size_t>(n)) {
    throw std::invalid_argument(what + ": expected " + std::to_string(n) + " entries");
  }
  std::vector<double> r;
  for (std::size_t i = skip; i < toks.size(); ++i) r.push_back(coeff::parse_number(toks[i]));
  return r;
}

void check_method(const MRIMethod& m) {
  const double tol = 1e-12;
  auto fail = [&](const std::string& msg) { throw std::invalid_argument("method " + m.name + ": " + msg); };
  double csum = 0.0;
  for (double d : m.dc) {
    if (d < 0.0) fail("negative stage width");
    csum += d;
  }
  if (csum > 1.0 + tol) fail("stage widths sum past 1");
  if (m.kind[0] != StageKind::trivial || m.dc[0] != 0.0) fail("stage 0 must be trivial");
  for (int i = 1; i < m.s; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const bool fast = m.kind[ui] == StageKind::fast_ivp;
    if (fast != (m.dc[ui] > 0.0)) fail("row " + std::to_string(i) + ": stage kind does not match dc");
    if (m.kind[ui] == StageKind::trivial) fail("row " + std::to_string(i) + ": only stage 0 may be trivial");
    for (int k = 0; k < m.num_gamma(); ++k) {
      double sum = 0.0;
      for (int j = 0; j < m.s; ++j) {
        const double g = m.G(k, i, j);
        sum += g;
        if (j > i && g != 0.0) fail("row " + std::to_string(i) + ": entry above the diagonal");
        if (j == i && g != 0.0 && m.kind[ui] != StageKind::implicit_algebraic) {
          fail("row " + std::to_string(i) + ": diagonal entry on a non-implicit stage");
        }
      }
      const double want = k == 0 ? m.dc[ui] : 0.0;
      if (std::abs(sum - want) > tol) {
        fail("row " + std::to_string(i) + " of gamma " + std::to_string(k) + " has sum " + std::to_string(sum) +
             ", expected " + std::to_string(want));
      }
    }
  }
  const auto last = static_cast<std::size_t>(m.s - 1);
  for (int k = 0; k < m.num_gamma(); ++k) {
    double sum = 0.0;
    for (int j = 0; j < m.s; ++j) sum += m.G_embed(k, j);
    const double want = k == 0 ? m.dc[last] : 0.0;
    if (std::abs(sum - want) > tol) fail("embedding row of gamma " + std::to_string(k) + " has wrong sum");
    if (m.kind[last] == StageKind::fast_ivp && m.G_embed(k, m.s - 1) != 0.0) {
      fail("embedding row couples to the final fast stage");
    }
  }
}

}  // namespace

std::string_view to_string(StageKind k) {
  switch (k) {
    case StageKind::trivial: return "trivial";
    case StageKind::fast_ivp: return "fast";
    case StageKind::implicit_algebraic: return "implicit";
    case StageKind::explicit_algebraic: return "explicit";
  }
  return "?";
}

double MRIMethod::gbar(int i, int j) const {
  double g = 0.0;
  for (int k = 0; k < num_gamma(); ++k) g += G(k, i, j) / (k + 1);
  return g;
}

double MRIMethod::gbar_embed(int j) const {
  double g = 0.0;
  for (int k = 0; k < num_gamma(); ++k) g += G_embed(k, j) / (k + 1);
  return g;
}

int MRIMethod::count_stages(StageKind k) const {
  int n = 0;
  for (auto x : kind) n += (x == k);
  return n;
}

MRIMethod parse_method(std::string_view text) {
  const auto lines = coeff::tokenize(text);
  MRIMethod m;
  std::size_t i = 0;
  auto expect = [&](std::string_view key) -> const std::vector<std::string>& {
    if (i >= lines.size() || lines[i][0] != key) {
      throw std::invalid_argument("method text: expected '" + std::string(key) + "'");
    }
    return lines[i++];
  };
  m.name = expect("name").at(1);
  m.s = std::stoi(expect("stages").at(1));
  if (m.s < 2) throw std::invalid_argument("method text: need at least 2 stages");
  const auto& ord = expect("order");
  m.order_P = std::stoi(ord.at(1));
  m.order_Phat = std::stoi(ord.at(2));
  m.dc = row_of(expect("dc"), 1, m.s, "dc");
  const auto& kinds = expect("kind");
  if (kinds.size() != static_cast<std::size_t>(m.s) + 1) throw std::invalid_argument("method text: kind count");
  for (std::size_t q = 1; q < kinds.size(); ++q) m.kind.push_back(parse_kind(kinds[q]));

  while (i < lines.size() && lines[i][0] == "gamma") {
    if (std::stoi(lines[i].at(1)) != m.num_gamma()) throw std::invalid_argument("method text: gamma out of order");
    ++i;
    std::vector<double> g;
    for (int r = 0; r < m.s; ++r) {
      if (i >= lines.size()) throw std::invalid_argument("method text: truncated gamma block");
      auto row = row_of(lines[i++], 0, m.s, "gamma row " + std::to_string(r));
      g.insert(g.end(), row.begin(), row.end());
    }
    m.gamma.push_back(std::move(g));
  }
  if (m.gamma.empty()) throw std::invalid_argument("method text: no gamma blocks");
  while (i < lines.size() && lines[i][0] == "embed") {
    if (std::stoi(lines[i].at(1)) != static_cast<int>(m.gamma_embed.size())) {
      throw std::invalid_argument("method text: embed out of order");
    }
    m.gamma_embed.push_back(row_of(lines[i++], 2, m.s, "embed row"));
  }
  if (i != lines.size()) throw std::invalid_argument("method text: trailing line '" + lines[i][0] + "'");
  // a missing embed k means zeros
  while (m.gamma_embed.size() < m.gamma.size()) m.gamma_embed.emplace_back(static_cast<std::size_t>(m.s), 0.0);
  if (m.gamma_embed.size() != m.gamma.size()) throw std::invalid_argument("method text: too many embed rows");

  m.c.assign(static_cast<std::size_t>(m.s), 0.0);
  for (int q = 1; q < m.s; ++q) m.c[static_cast<std::size_t>(q)] = m.c[static_cast<std::size_t>(q - 1)] + m.dc[static_cast<std::size_t>(q)];

  check_method(m);

  // f_slow(Y_j) is needed when a later row or the embedding references column j.
  m.slow_needed.assign(static_cast<std::size_t>(m.s), false);
  for (int j = 0; j < m.s; ++j) {
    bool need = false;
    for (int k = 0; k < m.num_gamma(); ++k) {
      for (int r = j + 1; r < m.s; ++r) need = need || m.G(k, r, j) != 0.0;
      if (j < m.s - 1) need = need || m.G_embed(k, j) != 0.0;
    }
    m.slow_needed[static_cast<std::size_t>(j)] = need;
  }
  return m;
}

std::string_view mri_method_source(std::string_view name) {
  if (name.starts_with("MRI-GARK-")) name.remove_prefix(9);
  if (name == "ERK33") return kERK33;
  if (name == "ERK45a") return kERK45a;
  if (name == "IRK21a") return kIRK21a;
  if (name == "ESDIRK34a") return kESDIRK34a;
  throw std::invalid_argument("unknown MRI method '" + std::string(name) +
                              "' (expected ERK33, ERK45a, IRK21a or ESDIRK34a)");
}

MRIMethod load_method(std::string_view name) { return parse_method(mri_method_source(name)); }

std::vector<std::string> method_names() { return {"ERK33", "ERK45a", "IRK21a", "ESDIRK34a"}; }

}  // namespace mri
