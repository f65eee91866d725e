#include <cmath>

#include "doctest.h"
#include "mri/mri_method.hpp"
#include "mri/problems.hpp"

using namespace mri;
using Agg = FastErrorStrategy::Aggregate;

TEST_SUITE("fast-error") {

TEST_CASE("stage aggregation") {
  const double e[] = {1e-5, 3e-5};
  CHECK(aggregate_stage_errors(e, Agg::mean) == doctest::Approx(2e-5));
  CHECK(aggregate_stage_errors(e, Agg::max) == 3e-5);
  CHECK(aggregate_stage_errors({}, Agg::mean) == 0.0);
  CHECK(aggregate_stage_errors({}, Agg::max) == 0.0);
  const double f[] = {4e-7, 1e-7, 2.5e-7, 0.0};
  CHECK(aggregate_stage_errors(f, Agg::mean) == doctest::Approx(1.875e-7));
  CHECK(aggregate_stage_errors(f, Agg::max) == 4e-7);
}

TEST_CASE("parse and label round trip") {
  for (const char* s : {"fs", "sa-mean", "sa-max", "lasa-mean", "lasa-max"}) {
    CHECK(FastErrorStrategy::parse(s).label() == s);
  }
  CHECK(FastErrorStrategy::parse("fs") == FastErrorStrategy::full_step());
  CHECK(FastErrorStrategy::parse("sa-max") == FastErrorStrategy::stage_aggregate(Agg::max));
  CHECK_FALSE(FastErrorStrategy::parse("lasa-mean") == FastErrorStrategy::parse("lasa-max"));
  CHECK_THROWS_AS(FastErrorStrategy::parse("lasa"), std::invalid_argument);
  CHECK_THROWS_AS(FastErrorStrategy::parse("FS"), std::invalid_argument);
}

TEST_CASE("slow evaluation ratios between strategies") {
  const auto p = make_problem("kaps");
  const auto tb = bogacki_shampine();
  for (const auto& n : method_names()) {
    CAPTURE(n);
    const auto m = load_method(n);
    const auto fs = mri_step(m, tb, p.ivp, 0.0, p.ivp.y0, 0.01, 4, FastErrorStrategy::full_step());
    const auto sa = mri_step(m, tb, p.ivp, 0.0, p.ivp.y0, 0.01, 4, FastErrorStrategy::stage_aggregate(Agg::mean));
    const auto la = mri_step(m, tb, p.ivp, 0.0, p.ivp.y0, 0.01, 4, FastErrorStrategy::lasa(Agg::mean));
    CHECK(fs.n_slow_evals == 2 * la.n_slow_evals);
    CHECK(sa.n_slow_evals == la.n_slow_evals);
    CHECK(fs.n_fast_evals > la.n_fast_evals);
    CHECK(sa.n_fast_evals > la.n_fast_evals);
    // the primary solution does not depend on the estimator
    CHECK(fs.y_next == la.y_next);
    CHECK(sa.y_next == la.y_next);
  }
}

TEST_CASE("no fast dynamics, no fast error") {
  SplitIVP ivp;
  ivp.name = "const";
  ivp.dim = 2;
  ivp.y0 = {1.0, 2.0};
  ivp.f_slow = [](double, std::span<const double>, std::span<double> o) { o[0] = 0.5; o[1] = -1.0; };
  ivp.f_fast = [](double, std::span<const double>, std::span<double> o) { o[0] = 0.0; o[1] = 0.0; };
  const auto m = load_method("ERK33");
  for (const char* s : {"fs", "sa-mean", "lasa-max"}) {
    const auto r = mri_step(m, bogacki_shampine(), ivp, 0.0, ivp.y0, 0.1, 3, FastErrorStrategy::parse(s));
    // only roundoff is left
    CHECK(r.eps_fast < 1e-14);
  }
}

TEST_CASE("estimators agree in magnitude on Kaps") {
  const auto p = make_problem("kaps");
  const auto m = load_method("ERK33");
  const auto tb = bogacki_shampine();
  const auto fs = mri_step(m, tb, p.ivp, 0.0, p.ivp.y0, 0.01, 4, FastErrorStrategy::full_step());
  const auto la = mri_step(m, tb, p.ivp, 0.0, p.ivp.y0, 0.01, 4, FastErrorStrategy::lasa(Agg::mean));
  const auto sa_mean = mri_step(m, tb, p.ivp, 0.0, p.ivp.y0, 0.01, 4, FastErrorStrategy::stage_aggregate(Agg::mean));
  const auto sa_max = mri_step(m, tb, p.ivp, 0.0, p.ivp.y0, 0.01, 4, FastErrorStrategy::stage_aggregate(Agg::max));
  CHECK(fs.eps_fast > 0.0);
  CHECK(la.eps_fast > 0.0);
  const double ratio = fs.eps_fast / la.eps_fast;
  CHECK(ratio > 0.2);
  CHECK(ratio < 5.0);
  CHECK(sa_max.eps_fast >= sa_mean.eps_fast);
}

TEST_CASE("LASA with one substep is the inner embedded difference") {
  // one fast stage covering the whole step, no slow forcing
  const auto m = parse_method(R"(name one-stage
stages 2
order 2 1
dc 0 1
kind trivial fast
gamma 0
0 0
1 0
embed 0 1 0
)");
  SplitIVP ivp;
  ivp.name = "decay";
  ivp.dim = 1;
  ivp.y0 = {1.0};
  ivp.f_slow = [](double, std::span<const double>, std::span<double> o) { o[0] = 0.0; };
  ivp.f_fast = [](double, std::span<const double> y, std::span<double> o) { o[0] = -3.0 * y[0]; };
  const auto tb = bogacki_shampine();
  const double H = 0.05;
  const auto r = mri_step(m, tb, ivp, 0.0, ivp.y0, H, 1, FastErrorStrategy::lasa(Agg::mean));
  const auto k = rk_step(tb, ivp.f_fast, 0.0, ivp.y0, H);
  CHECK(r.y_next[0] == k.y_next[0]);
  const double d = std::abs(k.y_next[0] - k.y_embedded[0]) / std::max(std::abs(k.y_next[0]), 1e-8);
  CHECK(r.eps_fast == doctest::Approx(d).epsilon(1e-12));
}

}
