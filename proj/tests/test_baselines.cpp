#include <doctest.h>

#include <cmath>
#include <random>

#include "ehpc/baselines.hpp"
#include "ehpc/battery.hpp"
#include "ehpc/quadrature.hpp"

using namespace ehpc;

namespace {

/// Cutoff-equation left side by direct quadrature of its defining integral.
double lhs_by_quadrature(const GainLaw& law, double g0) {
  QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  opts.rel_tol = 1e-13;
  return integrate_to_infinity([&](double g) { return (1.0 / g0 - 1.0 / g) * law.pdf(g); }, g0, opts)
      .value;
}

}  // namespace

TEST_CASE("closed-form cutoff equation matches quadrature") {
  for (int shape : {1, 2, 4}) {
    for (double mean : {1.0, 10.0}) {
      const GainLaw law = GainLaw::gamma(shape, mean);
      for (double g0 : {0.05, 0.3, 1.0, 4.0, 20.0}) {
        const double ref = lhs_by_quadrature(law, g0);
        CHECK(eawf_lhs(law, g0) == doctest::Approx(ref).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("cutoff equation left side strictly decreases") {
  for (int shape : {1, 3}) {
    const GainLaw law = GainLaw::gamma(shape, 10.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double lg = -8.0; lg <= 2.0; lg += 0.01) {
      const double v = eawf_lhs(law, std::pow(10.0, lg));
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("cutoff for the exponential law") {
  const EawfConfig cfg{GainLaw::exponential(10.0), 1e-10};
  const auto g0 = eawf_cutoff(cfg, 1.0);
  REQUIRE(g0.has_value());
  CHECK(*g0 == doctest::Approx(0.7675915642498327).epsilon(1e-8));
  CHECK(std::abs(eawf_lhs(cfg.law, *g0) - 1.0) < cfg.root_tol);
  CHECK(lhs_by_quadrature(cfg.law, *g0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("cutoff residual is within tolerance across energies and laws") {
  for (int shape : {1, 2, 4}) {
    const EawfConfig cfg{GainLaw::gamma(shape, 10.0), 1e-10};
    for (double e_b : {1e-4, 0.01, 0.2, 1.0, 5.0, 49.0}) {
      const auto g0 = eawf_cutoff(cfg, e_b);
      REQUIRE(g0.has_value());
      if (*g0 > 1e-12) CHECK(std::abs(eawf_lhs(cfg.law, *g0) - e_b) < cfg.root_tol);
    }
  }
}

TEST_CASE("cutoff limits") {
  const EawfConfig cfg{GainLaw::exponential(10.0), 1e-10};
  CHECK_FALSE(eawf_cutoff(cfg, 0.0).has_value());
  CHECK_FALSE(eawf_cutoff(cfg, -1.0).has_value());
  const double tiny = *eawf_cutoff(cfg, 1e-6);
  const double small = *eawf_cutoff(cfg, 1e-3);
  CHECK(tiny > small);
  CHECK(*eawf_cutoff(cfg, 1e3) < *eawf_cutoff(cfg, 1.0));
  CHECK(*eawf_cutoff(cfg, 1e6) < 1e-5);
  BatteryConfig bat;
  CHECK(eawf_decide(cfg, bat, 1e-9, 5.0) == 0.0);
}

TEST_CASE("water-filling decision") {
  const GainLaw law = GainLaw::exponential(10.0);
  const EawfConfig cfg{law, 1e-12};
  BatteryConfig bat;
  const double e_b = eawf_lhs(law, 0.1);  // the energy whose cutoff is 0.1
  REQUIRE(*eawf_cutoff(cfg, e_b) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(eawf_decide(cfg, bat, e_b, 1.0) == 0.5);
  CHECK(eawf_decide(cfg, bat, e_b, 0.09) == 0.0);
  CHECK(eawf_decide(cfg, bat, e_b, 0.1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(eawf_decide(cfg, bat, e_b, 0.105) == doctest::Approx(10.0 - 1.0 / 0.105).epsilon(1e-6));
  CHECK(eawf_decide(cfg, bat, bat.e_min, 30.0) == 0.0);
  CHECK(eawf_decide(cfg, bat, 0.05, 1e9) <= 0.05);
}

TEST_CASE("greedy and halving") {
  BatteryConfig bat;
  CHECK(greedy_decide(bat, 0.2) == doctest::Approx(0.2));
  CHECK(greedy_decide(bat, 50.0) == 0.5);
  CHECK(greedy_decide(bat, 0.0) == 0.0);
  CHECK(halving_decide(bat, 0.2) == doctest::Approx(0.1));
  CHECK(halving_decide(bat, 0.0) == 0.0);
  CHECK(halving_decide(bat, 40.0) == 0.25);
}

TEST_CASE("empirical law approximates the analytic one") {
  std::mt19937_64 gen(13);
  std::exponential_distribution<double> ex(0.1);
  std::vector<double> xs(400000);
  for (double& x : xs) x = ex(gen);
  const GainLaw emp = GainLaw::empirical(xs);
  const GainLaw ref = GainLaw::exponential(10.0);
  for (double g : {1.0, 5.0, 20.0}) {
    CHECK(emp.tail(g) == doctest::Approx(ref.tail(g)).epsilon(0.02));
    CHECK(emp.inverse_tail(g) == doctest::Approx(ref.inverse_tail(g)).epsilon(0.02));
  }
  const EawfConfig cfg{emp, 1e-10};
  CHECK(*eawf_cutoff(cfg, 1.0) == doctest::Approx(0.7675915642498327).epsilon(0.02));
}

TEST_CASE("baseline trajectories are feasible") {
  BatteryConfig bat;
  bat.e_max = 2.0;
  const EawfConfig cfg{GainLaw::exponential(10.0), 1e-10};
  std::mt19937_64 gen(17);
  std::exponential_distribution<double> ex(0.1);
  std::uniform_real_distribution<double> u(0.0, 0.4);
  for (int which = 0; which < 3; ++which) {
    BatteryState b{1.0};
    for (int t = 0; t < 20000; ++t) {
      const double gamma = ex(gen);
      const double e_a = u(gen);
      double p = 0.0;
      if (which == 0) p = eawf_decide(cfg, bat, b.e_b, gamma);
      if (which == 1) p = greedy_decide(bat, b.e_b);
      if (which == 2) p = halving_decide(bat, b.e_b);
      REQUIRE(p >= 0.0);
      REQUIRE(p <= bat.p_max);
      REQUIRE(bat.drain(p) <= b.e_b - bat.e_min + 1e-12);
      b = step(bat, b, p, e_a).next;
    }
  }
}
