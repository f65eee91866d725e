#include <cmath>
#include <stdexcept>
#include <string>

#include "mri/coeff_text.hpp"
#include "mri/rk_inner.hpp"

namespace mri {

namespace {

// Tableau text: "name", "stages", "order p phat", "c ...", then "A" followed
// by `stages` rows, then "b ..." and "bhat ...".

constexpr std::string_view kHeunEuler = R"(name heun-euler
stages 2
order 2 1
c 0 1
A
0 0
1 0
b 1/2 1/2
bhat 1 0
)";

constexpr std::string_view kBogackiShampine = R"(name bogacki-shampine
stages 4
order 3 2
c 0 1/2 3/4 1
A
0   0   0   0
1/2 0   0   0
0   3/4 0   0
2/9 1/3 4/9 0
b 2/9 1/3 4/9 0
bhat 7/24 1/4 1/3 1/8
)";

constexpr std::string_view kZonneveld = R"(name zonneveld
stages 5
order 4 3
c 0 1/2 1/2 1 3/4
A
0    0    0     0     0
1/2  0    0     0     0
0    1/2  0     0     0
0    0    1     0     0
5/32 7/32 13/32 -1/32 0
b 1/6 1/3 1/3 1/6 0
bhat -1/2 7/3 7/3 13/6 -16/3
)";

constexpr std::string_view kVerner65 = R"(name verner65
stages 8
order 6 5
c 0 1/6 4/15 2/3 5/6 1 1/15 1
A
0 0 0 0 0 0 0 0
1/6 0 0 0 0 0 0 0
4/75 16/75 0 0 0 0 0 0
5/6 -8/3 5/2 0 0 0 0 0
-165/64 55/6 -425/64 85/96 0 0 0 0
12/5 -8 4015/612 -11/36 88/255 0 0 0
-8263/15000 124/75 -643/680 -81/250 2484/10625 0 0 0
3501/1720 -300/43 297275/52632 -319/2322 24068/84065 0 3850/26703 0
b 3/40 0 875/2244 23/72 264/1955 0 125/11592 43/616
bhat 13/160 0 2375/5984 5/16 12/85 3/44 0 0
)";

std::vector<double> parse_row(const std::vector<std::string>& toks, std::size_t skip, int n,
                              const std::string& what) {
  if (toks.size() != skip + static_cast<std::size_t>(n)) {
    throw std::invalid_argument("tableau row '" + what + "' expects " + std::to_string(n) + " entries");
  }
  std::vector<double> row;
  for (std::size_t i = skip; i < toks.size(); ++i) row.push_back(coeff::parse_number(toks[i]));
  return row;
}

EmbeddedRKTable parse_table(std::string_view text) {
  const auto lines = coeff::tokenize(text);
  EmbeddedRKTable t;
  std::size_t i = 0;
  auto expect = [&](std::string_view key) -> const std::vector<std::string>& {
    if (i >= lines.size() || lines[i][0] != key) {
      throw std::invalid_argument("tableau text: expected '" + std::string(key) + "'");
    }
    return lines[i++];
  };
  t.name = expect("name").at(1);
  t.stages = std::stoi(expect("stages").at(1));
  const auto& ord = expect("order");
  t.order_p = std::stoi(ord.at(1));
  t.order_phat = std::stoi(ord.at(2));
  t.c = parse_row(expect("c"), 1, t.stages, "c");
  expect("A");
  for (int r = 0; r < t.stages; ++r) {
    auto row = parse_row(lines.at(i++), 0, t.stages, "A");
    t.A.insert(t.A.end(), row.begin(), row.end());
  }
  t.b = parse_row(expect("b"), 1, t.stages, "b");
  t.b_hat = parse_row(expect("bhat"), 1, t.stages, "bhat");
  t.validate();
  return t;
}

}  // namespace

bool EmbeddedRKTable::is_explicit() const {
  for (int i = 0; i < stages; ++i)
    for (int j = i; j < stages; ++j)
      if (a(i, j) != 0.0) return false;
  return true;
}

void EmbeddedRKTable::validate(double tol) const {
  const auto s = static_cast<std::size_t>(stages);
  if (stages <= 0 || A.size() != s * s || b.size() != s || b_hat.size() != s || c.size() != s) {
    throw std::invalid_argument("tableau " + name + ": inconsistent sizes");
  }
  for (int i = 0; i < stages; ++i) {
    double row = 0.0;
    for (int j = 0; j < stages; ++j) row += a(i, j);
    if (std::abs(row - c[static_cast<std::size_t>(i)]) > tol) {
      throw std::invalid_argument("tableau " + name + ": row " + std::to_string(i) +
                                  " of A does not sum to c");
    }
  }
  double sb = 0.0, sbh = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    sb += b[i];
    sbh += b_hat[i];
  }
  if (std::abs(sb - 1.0) > tol || std::abs(sbh - 1.0) > tol) {
    throw std::invalid_argument("tableau " + name + ": weights do not sum to one");
  }
}

std::string_view rk_table_source(std::string_view name) {
  if (name == "heun-euler") return kHeunEuler;
  if (name == "bogacki-shampine") return kBogackiShampine;
  if (name == "zonneveld") return kZonneveld;
  if (name == "verner65") return kVerner65;
  throw std::invalid_argument("unknown RK table '" + std::string(name) + "'");
}

EmbeddedRKTable rk_table_by_name(std::string_view name) { return parse_table(rk_table_source(name)); }

EmbeddedRKTable heun_euler() { return rk_table_by_name("heun-euler"); }
EmbeddedRKTable bogacki_shampine() { return rk_table_by_name("bogacki-shampine"); }
EmbeddedRKTable zonneveld() { return rk_table_by_name("zonneveld"); }
EmbeddedRKTable verner65() { return rk_table_by_name("verner65"); }

}  // namespace mri
