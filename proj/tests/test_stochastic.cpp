#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ehpc/quadrature.hpp"
#include "ehpc/rng.hpp"
#include "ehpc/stochastic.hpp"

using namespace ehpc;

namespace {

constexpr std::size_t kDraws = 1'000'000;

double mean_of_gains(const ChannelConfig& cfg, std::uint64_t seed) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    Rng rng = make_stream(seed, 0, i, StreamTag::kChannel);
    sum += draw_gamma(cfg, rng);
  }
  return sum / kDraws;
}

}  // namespace

TEST_CASE("streams are keyed by seed, replica, slot and purpose") {
  Rng a = make_stream(5, 2, 9, StreamTag::kArrival);
  Rng b = make_stream(5, 2, 9, StreamTag::kArrival);
  CHECK(a() == b());
  const auto base = make_stream(5, 2, 9, StreamTag::kArrival)();
  CHECK(make_stream(6, 2, 9, StreamTag::kArrival)() != base);
  CHECK(make_stream(5, 3, 9, StreamTag::kArrival)() != base);
  CHECK(make_stream(5, 2, 10, StreamTag::kArrival)() != base);
  CHECK(make_stream(5, 2, 9, StreamTag::kChannel)() != base);
  static_assert(make_stream(1, 0, 0, StreamTag::kChannel)() ==
                make_stream(1, 0, 0, StreamTag::kChannel)());
}

TEST_CASE("degenerate arrivals are always zero") {
  Rng rng(1);
  ArrivalConfig off{0.0, 0.2};
  ArrivalConfig empty{0.5, 0.0};
  for (int i = 0; i < 1000; ++i) {
    CHECK(draw_arrival(off, rng) == 0.0);
    CHECK(draw_arrival(empty, rng) == 0.0);
  }
}

TEST_CASE("compound Poisson arrival moments") {
  const ArrivalConfig cfg{0.5, 0.2};
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    Rng rng = make_stream(17, 0, i, StreamTag::kArrival);
    const double x = draw_arrival(cfg, rng);
    REQUIRE(x >= 0.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / kDraws;
  CHECK(mean == doctest::Approx(0.1).epsilon(0.01));
  // Var = lambda E[U^2] with U ~ Uniform[0, 2 alpha].
  const double var = sq / kDraws - mean * mean;
  CHECK(var == doctest::Approx(0.5 * 4.0 * 0.04 / 3.0).epsilon(0.02));
}

TEST_CASE("arrival validation") {
  CHECK_THROWS_AS(validate(ArrivalConfig{-1.0, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ArrivalConfig{0.5, -0.2}), std::invalid_argument);
}

TEST_CASE("scalar Rayleigh gain has the configured mean") {
  ChannelConfig cfg;
  CHECK(mean_of_gains(cfg, 3) == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("MISO and SIMO gains add one exponential per branch") {
  for (auto model : {ChannelModel::kMiso, ChannelModel::kSimo}) {
    ChannelConfig cfg;
    cfg.model = model;
    cfg.antennas = 3;
    cfg.mean_gain = 2.0;
    CHECK(mean_of_gains(cfg, 4) == doctest::Approx(6.0).epsilon(0.01));
  }
}

TEST_CASE("vanishing mean gain gives vanishing gains") {
  ChannelConfig cfg;
  cfg.mean_gain = 1e-12;
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) CHECK(draw_gamma(cfg, rng) < 1e-9);
}

TEST_CASE("2x2 largest singular value matches the characteristic polynomial") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::complex<double>> h(4);
    for (auto& z : h) z = {n(gen), n(gen)};
    // Eigenvalues of H H^H from trace and determinant.
    const double tr = std::norm(h[0]) + std::norm(h[1]) + std::norm(h[2]) + std::norm(h[3]);
    const double det = std::norm(h[0] * h[3] - h[1] * h[2]);
    const double lam = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    CHECK(largest_singular_value_squared(h, 2, 2) == doctest::Approx(lam).epsilon(1e-8));
  }
}

TEST_CASE("rectangular largest singular value matches a full SVD") {
  std::mt19937_64 gen(22);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto [rows, cols] : {std::pair{4, 3}, std::pair{2, 5}, std::pair{1, 4}, std::pair{6, 6}}) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::complex<double>> h(static_cast<std::size_t>(rows * cols));
      Eigen::MatrixXcd m(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          const std::complex<double> z{n(gen), n(gen)};
          h[static_cast<std::size_t>(r * cols + c)] = z;
          m(r, c) = z;
        }
      const double s = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
      CHECK(largest_singular_value_squared(h, rows, cols) == doctest::Approx(s * s).epsilon(1e-8));
    }
  }
}

TEST_CASE("MIMO gain has the expected mean for a single column") {
  // A 1 x N or N x 1 channel reduces to a sum of N exponentials.
  ChannelConfig cfg;
  cfg.model = ChannelModel::kMimo;
  cfg.n_tx = 1;
  cfg.n_rx = 2;
  cfg.mean_gain = 1.5;
  CHECK(mean_of_gains(cfg, 6) == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("outage cap for the single-antenna default") {
  ChannelConfig cfg;
  const double g = gamma_max_for_outage(cfg);
  CHECK(g == doctest::Approx(46.051701859880914).epsilon(1e-14));
  CHECK(linear_to_db(g) == doctest::Approx(16.63).epsilon(1e-3));
  CHECK(std::abs(linear_to_db(g) - 16.6) <= 0.1);
}

TEST_CASE("outage cap vanishes as the outage probability approaches one") {
  ChannelConfig cfg;
  cfg.outage_eta = 1.0 - 1e-9;
  CHECK(gamma_max_for_outage(cfg) < 1e-7);
}

TEST_CASE("outage cap for two branches solves the Gamma tail") {
  ChannelConfig cfg;
  cfg.model = ChannelModel::kMiso;
  cfg.antennas = 2;
  cfg.mean_gain = 1.0;
  const double x = gamma_max_for_outage(cfg);
  CHECK(x == doctest::Approx(6.638352067993813).epsilon(1e-10));
  // Independent check: integrate the Gamma(2, 1) density over the tail.
  const double tail =
      integrate_to_infinity([](double u) { return u * std::exp(-u); }, x).value;
  CHECK(tail == doctest::Approx(0.01).epsilon(1e-9));

  cfg.antennas = 4;
  cfg.mean_gain = 3.0;
  CHECK(gamma_max_for_outage(cfg) == doctest::Approx(3.0 * 10.045117514831617).epsilon(1e-10));
}

TEST_CASE("outage cap rejects probabilities outside (0, 1)") {
  ChannelConfig cfg;
  cfg.outage_eta = 0.0;
  CHECK_THROWS_AS(gamma_max_for_outage(cfg), std::invalid_argument);
  cfg.outage_eta = 1.0;
  CHECK_THROWS_AS(gamma_max_for_outage(cfg), std::invalid_argument);
}

TEST_CASE("empirical outage frequency is within three standard errors") {
  std::vector<ChannelConfig> cases(3);
  cases[1].model = ChannelModel::kSimo;
  cases[1].antennas = 2;
  cases[2].model = ChannelModel::kMimo;
  cases[2].n_tx = 2;
  cases[2].n_rx = 2;
  cases[2].mean_gain = 1.0;
  for (const ChannelConfig& cfg : cases) {
    const double g = gamma_max_for_outage(cfg);
    std::size_t over = 0;
    for (std::size_t i = 0; i < kDraws; ++i) {
      Rng rng = make_stream(99, 0, i, StreamTag::kChannel);
      over += draw_gamma(cfg, rng) > g ? 1 : 0;
    }
    const double eta = cfg.outage_eta;
    const double se = std::sqrt(eta * (1.0 - eta) / kDraws);
    CHECK(std::abs(static_cast<double>(over) / kDraws - eta) < 3.0 * se);
  }
}

TEST_CASE("truncation") {
  CHECK(truncate_gamma(50.0, 46.05) == 46.05);
  CHECK(truncate_gamma(3.0, 46.05) == 3.0);
  CHECK(truncate_gamma(46.05, 46.05) == 46.05);
}

TEST_CASE("dB conversions") {
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
  CHECK(db_to_linear(linear_to_db(7.3)) == doctest::Approx(7.3));
}

TEST_CASE("channel validation and names") {
  ChannelConfig cfg;
  cfg.mean_gain = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.mean_gain = 1.0;
  cfg.model = ChannelModel::kMiso;
  cfg.antennas = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  for (auto m : {ChannelModel::kRayleigh, ChannelModel::kMiso, ChannelModel::kSimo, ChannelModel::kMimo})
    CHECK(channel_model_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(channel_model_from_string("rician"), std::invalid_argument);
}
