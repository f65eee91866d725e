#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "mri/coeff_text.hpp"
#include "mri/mri_method.hpp"
#include "mri/problems.hpp"
#include "mri/rk_inner.hpp"
#include "support.hpp"

using namespace mri;
using testsupport::loglog_slope;

namespace {

const Rhs decay = [](double, std::span<const double> y, std::span<double> o) { o[0] = -y[0]; };
const Rhs growth = [](double, std::span<const double> y, std::span<double> o) { o[0] = y[0]; };
const Rhs zero = [](double, std::span<const double>, std::span<double> o) {
  for (auto& v : o) v = 0.0;
};

// global error at t=1 of y'=-y with n steps, primary or embedded weights
double decay_error(const EmbeddedRKTable& tb, int n, Propagate prop) {
  const double y0[] = {1.0};
  const auto r = subcycle(tb, decay, 0.0, 1.0, y0, n, prop);
  return std::abs(r.y_final[0] - std::exp(-1.0));
}

}  // namespace

TEST_SUITE("rk-inner") {

TEST_CASE("coefficient parsing") {
  CHECK(coeff::parse_number("3/4") == 0.75);
  CHECK(coeff::parse_number("-1/8") == -0.125);
  CHECK(coeff::parse_number("0.25") == 0.25);
  CHECK(coeff::parse_number("-2") == -2.0);
  CHECK_THROWS(coeff::parse_number("1/0"));
  CHECK_THROWS(coeff::parse_number("abc"));
  const auto lines = coeff::tokenize("a 1 2\n# comment\n\n  b 3 # tail\n");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == std::vector<std::string>{"a", "1", "2"});
  CHECK(lines[1] == std::vector<std::string>{"b", "3"});
}

TEST_CASE("FNV-1a reference vectors") {
  // published test vectors for the 64-bit variant
  CHECK(coeff::fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(coeff::fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(coeff::fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("embedded coefficient texts are pinned") {
  CHECK(coeff::hex64(coeff::fnv1a(rk_table_source("heun-euler"))) == "c154d57fd00683ec");
  CHECK(coeff::hex64(coeff::fnv1a(rk_table_source("bogacki-shampine"))) == "17f6596f941565cd");
  CHECK(coeff::hex64(coeff::fnv1a(rk_table_source("zonneveld"))) == "15324ab769b11255");
  CHECK(coeff::hex64(coeff::fnv1a(rk_table_source("verner65"))) == "9aebd1f410266dda");
  CHECK(coeff::hex64(coeff::fnv1a(mri_method_source("ERK33"))) == "8a03775c67825d5b");
  CHECK(coeff::hex64(coeff::fnv1a(mri_method_source("ERK45a"))) == "3202b62915e66d18");
  CHECK(coeff::hex64(coeff::fnv1a(mri_method_source("IRK21a"))) == "f008406ef90f879d");
  CHECK(coeff::hex64(coeff::fnv1a(mri_method_source("ESDIRK34a"))) == "3f258e25405a0186");
}

TEST_CASE("tables match the published coefficients") {
  const auto bs = bogacki_shampine();
  CHECK(bs.stages == 4);
  CHECK(bs.a(1, 0) == 0.5);
  CHECK(bs.a(2, 1) == 0.75);
  CHECK(bs.a(3, 0) == doctest::Approx(2.0 / 9));
  CHECK(bs.a(3, 1) == doctest::Approx(1.0 / 3));
  CHECK(bs.a(3, 2) == doctest::Approx(4.0 / 9));
  const double bsb[] = {2.0 / 9, 1.0 / 3, 4.0 / 9, 0};
  const double bsh[] = {7.0 / 24, 0.25, 1.0 / 3, 0.125};
  for (int i = 0; i < 4; ++i) {
    CHECK(bs.b[i] == doctest::Approx(bsb[i]));
    CHECK(bs.b_hat[i] == doctest::Approx(bsh[i]));
  }
  const auto z = zonneveld();
  CHECK(z.stages == 5);
  const double zc[] = {0, 0.5, 0.5, 1, 0.75};
  const double zb[] = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6, 0};
  const double zh[] = {-0.5, 7.0 / 3, 7.0 / 3, 13.0 / 6, -16.0 / 3};
  for (int i = 0; i < 5; ++i) {
    CHECK(z.c[i] == doctest::Approx(zc[i]));
    CHECK(z.b[i] == doctest::Approx(zb[i]));
    CHECK(z.b_hat[i] == doctest::Approx(zh[i]));
  }
  CHECK(z.a(4, 0) == doctest::Approx(5.0 / 32));
  CHECK(z.a(4, 1) == doctest::Approx(7.0 / 32));
  CHECK(z.a(4, 2) == doctest::Approx(13.0 / 32));
  CHECK(z.a(4, 3) == doctest::Approx(-1.0 / 32));
  const auto he = heun_euler();
  CHECK(he.a(1, 0) == 1.0);
  CHECK(he.b == std::vector<double>{0.5, 0.5});
  CHECK(he.b_hat == std::vector<double>{1.0, 0.0});
}

TEST_CASE("table invariants") {
  for (const std::string n : {"heun-euler", "bogacki-shampine", "zonneveld", "verner65"}) {
    CAPTURE(n);
    const auto t = rk_table_by_name(n);
    CHECK_NOTHROW(t.validate());
    CHECK(t.is_explicit());
    double sb = 0, sh = 0;
    for (int i = 0; i < t.stages; ++i) {
      sb += t.b[i];
      sh += t.b_hat[i];
      double row = 0;
      for (int j = 0; j < t.stages; ++j) {
        row += t.a(i, j);
        if (j >= i) CHECK(t.a(i, j) == 0.0);
      }
      CHECK(row == doctest::Approx(t.c[i]).epsilon(1e-14));
    }
    CHECK(sb == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sh == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS(rk_table_by_name("dopri"));
}

TEST_CASE("rk_step on a zero field returns the input") {
  const double y[] = {1.5, -2.0};
  for (const std::string n : {"heun-euler", "bogacki-shampine", "zonneveld"}) {
    const auto r = rk_step(rk_table_by_name(n), zero, 0.0, y, 0.1);
    CHECK(r.y_next == StateVec{1.5, -2.0});
    CHECK(r.y_embedded == StateVec{1.5, -2.0});
  }
}

TEST_CASE("Heun-Euler on y'=y by hand") {
  const double y[] = {1.0};
  const auto r = rk_step(heun_euler(), growth, 0.0, y, 0.1);
  CHECK(r.y_next[0] == doctest::Approx(1.105).epsilon(1e-15));
  CHECK(r.y_embedded[0] == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("explicit rk_step costs exactly s evaluations") {
  for (const std::string n : {"heun-euler", "bogacki-shampine", "zonneveld", "verner65"}) {
    const auto t = rk_table_by_name(n);
    long calls = 0;
    const Rhs f = [&](double, std::span<const double> y, std::span<double> o) {
      ++calls;
      o[0] = -y[0];
    };
    const double y[] = {1.0};
    const auto r = rk_step(t, f, 0.0, y, 0.1);
    CHECK(calls == t.stages);
    CHECK(r.n_evals == t.stages);
  }
}

TEST_CASE("convergence orders on y'=-y") {
  for (const std::string n : {"heun-euler", "bogacki-shampine", "zonneveld", "verner65"}) {
    CAPTURE(n);
    const auto t = rk_table_by_name(n);
    std::vector<double> h, ep, eh;
    // the sixth-order pair is pre-asymptotic below 6 steps and hits roundoff past 24
    const int base = t.order_p >= 6 ? 6 : 8;
    const int levels = t.order_p >= 6 ? 3 : 4;
    for (int k = 0; k < levels; ++k) {
      const int m = base << k;
      h.push_back(1.0 / m);
      ep.push_back(decay_error(t, m, Propagate::primary));
      eh.push_back(decay_error(t, m, Propagate::embedded));
    }
    CHECK(loglog_slope(h, ep) == doctest::Approx(t.order_p).epsilon(0.2 / t.order_p));
    CHECK(loglog_slope(h, eh) == doctest::Approx(t.order_phat).epsilon(0.2 / t.order_phat));
  }
}

TEST_CASE("subcycle basics") {
  const auto he = heun_euler();
  const double y0[] = {1.0};
  // m = 1 is a single rk_step
  const auto one = subcycle(he, decay, 0.0, 0.3, y0, 1);
  const auto st = rk_step(he, decay, 0.0, y0, 0.3);
  CHECK(one.y_final == st.y_next);
  CHECK(one.local_err_sum == err_norm_diff(st.y_next, st.y_embedded, st.y_next));
  // zero field
  const auto z = subcycle(he, zero, 0.0, 1.0, y0, 5);
  CHECK(z.y_final[0] == 1.0);
  CHECK(z.local_err_sum == 0.0);
  CHECK(z.n_evals == 10);
  // hand recurrence (1 - h + h^2/2)^10
  const auto ten = subcycle(he, decay, 0.0, 1.0, y0, 10);
  const double want = std::pow(1 - 0.1 + 0.005, 10);
  CHECK(ten.y_final[0] == doctest::Approx(want).epsilon(1e-14));
  CHECK(std::abs(ten.y_final[0] - std::exp(-1.0)) < 2e-3);
  // the last step lands exactly on thetaF
  double last_t = 0;
  const Rhs probe = [&](double t, std::span<const double>, std::span<double> o) {
    last_t = std::max(last_t, t);
    o[0] = 0;
  };
  subcycle(he, probe, 0.1, 0.7, y0, 3);
  CHECK(last_t == 0.7);
}

TEST_CASE("newton_solve") {
  NewtonStats st;
  const Residual lin = [](std::span<const double> z, std::span<double> o) {
    o[0] = z[0] - 3.0;
    o[1] = z[1] + 1.5;
  };
  auto r = newton_solve(lin, {0.0, 0.0}, {}, &st);
  REQUIRE(r);
  CHECK((*r)[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK((*r)[1] == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(st.iterations <= 2);

  const Residual sq = [](std::span<const double> z, std::span<double> o) { o[0] = z[0] * z[0] - 4.0; };
  auto s = newton_solve(sq, {3.0});
  REQUIRE(s);
  CHECK((*s)[0] == doctest::Approx(2.0).epsilon(1e-10));

  // derivative vanishes at the guess
  const Residual flat = [](std::span<const double> z, std::span<double> o) { o[0] = z[0] * z[0] * z[0] + 1.0; };
  CHECK_FALSE(newton_solve(flat, {0.0}).has_value());
  const Residual none = [](std::span<const double> z, std::span<double> o) { o[0] = z[0] * z[0] + 1.0; };
  CHECK_FALSE(newton_solve(none, {0.5}, NewtonConfig{8, 1e-10, 1e-8}).has_value());
}

TEST_CASE("reference_solve matches closed forms") {
  for (const std::string n : {"bicoupling", "kaps", "kpr"}) {
    CAPTURE(n);
    const auto p = make_problem(n);
    const auto ref = reference_solve(p.ivp, p.checkpoints);
    double worst = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const auto e = (*p.ivp.exact)(p.checkpoints[i]);
      worst = std::max(worst, err_norm_diff(ref[i], e, e));
    }
    CHECK(worst <= 1e-9);
  }
  const auto k = make_problem("kaps");
  const auto ref = reference_solve(k.ivp, k.checkpoints);
  CHECK(ref.back()[0] == doctest::Approx(std::exp(-4.0)).epsilon(1e-10));
  CHECK(ref.back()[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
  const auto b = make_problem("bicoupling");
  const auto e1 = (*b.ivp.exact)(1.0);
  CHECK(e1[0] == doctest::Approx(std::cos(100.0) + std::exp(-5.0)).epsilon(1e-14));
  const double t0[] = {0.0};
  const auto kpr = make_problem("kpr");
  const auto r0 = reference_solve(kpr.ivp, t0);
  CHECK(r0[0][0] == 2.0);
  CHECK(r0[0][1] == std::sqrt(3.0));
}

TEST_CASE("reference cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "mri_refcache_test";
  std::filesystem::remove_all(dir);
  const ReferenceCache cache(dir);
  const auto p = make_problem("kaps");
  CHECK_FALSE(cache.load(p.name, p.checkpoints).has_value());
  const auto a = reference_solve(p.ivp, p.checkpoints, &cache);
  CHECK(std::filesystem::exists(cache.path_for(p.name, p.checkpoints)));
  const auto b = cache.load(p.name, p.checkpoints);
  REQUIRE(b);
  CHECK(*b == a);  // 17 digits round-trip exactly
  std::filesystem::remove_all(dir);
}

TEST_CASE("reference_solve rejects unsorted checkpoints") {
  const auto p = make_problem("kaps");
  const double bad[] = {1.0, 0.5};
  CHECK_THROWS_AS(reference_solve(p.ivp, bad), std::invalid_argument);
}

}
