#include <doctest.h>

#include <numbers>
#include <numeric>
#include <random>

#include "headmotion/calibration.hpp"
#include "headmotion/error.hpp"
#include "headmotion/linear_filter.hpp"
#include "headmotion/metrics.hpp"
#include "headmotion/noise.hpp"
#include "headmotion/spectrum.hpp"
#include "headmotion/synth.hpp"
#include "../support/oracles.hpp"

using namespace hm;

namespace {

Trajectory noise_trajectory(std::size_t n, std::uint64_t seed, double offset = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<Frame> f(n);
  for (auto& fr : f) fr = {d(rng) + offset, d(rng) + offset, d(rng) - offset};
  return Trajectory(f);
}

Trajectory sinusoid(double hz, std::size_t n, double rate = 100.0) {
  std::vector<Frame> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    f[i] = {std::sin(2 * std::numbers::pi * hz * t), std::cos(2 * std::numbers::pi * hz * t),
            0.5 * std::sin(2 * std::numbers::pi * hz * t + 1.0)};
  }
  return Trajectory(f, rate);
}

Trajectory noisy_prediction(std::uint64_t seed, double seconds = 30.0) {
  const Trajectory gt = synth_trajectory(seed, seconds);
  std::vector<NoiseSpec> chain;
  const NoiseRecipe recipe = NoiseRecipe::parse(kPredictionLikeNoise);
  for (auto s : recipe.options[0].chain) {
    s.seed = seed;
    chain.push_back(s);
  }
  const Trajectory ts[] = {gt};
  return corrupt_normalized(gt, chain, compute_stats(ts));
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("normalized_mse examples") {
  const Trajectory gt = noise_trajectory(500, 1);
  CHECK(normalized_mse(gt, gt) == 0.0);

  std::vector<Frame> mean(gt.size(), Frame{0, 0, 0});
  for (int c = 0; c < 3; ++c) {
    double m = 0;
    for (const auto& f : gt.frames()) m += f[c];
    for (auto& f : mean) f[c] = m / gt.size();
  }
  CHECK(normalized_mse(Trajectory(mean), gt) == doctest::Approx(1.0).epsilon(1e-12));

  const Trajectory pred = noise_trajectory(500, 2);
  std::vector<std::size_t> all(500);
  std::iota(all.begin(), all.end(), 0);
  CHECK(std::abs(normalized_mse(pred, gt) - oracle::loop_mse(pred, gt, all)) < 1e-12);
  // The ground truth's variance is the denominator, so the arguments do not commute.
  const Trajectory scaled = gt.with_frames([&] {
    auto f = gt.frames();
    for (auto& fr : f)
      for (double& v : fr) v *= 3.0;
    return f;
  }());
  CHECK(normalized_mse(scaled, gt) != doctest::Approx(normalized_mse(gt, scaled)));
}

TEST_CASE("normalized_mse over the speaking region") {
  const Trajectory gt = synth_trajectory(3, 30.0);
  const Trajectory pred = noisy_prediction(3);
  const auto idx = region_frames(pred, gt, Region::speaking_only);
  REQUIRE(!idx.empty());
  CHECK(idx.size() < gt.size());
  CHECK(std::abs(normalized_mse(pred, gt, Region::speaking_only) - oracle::loop_mse(pred, gt, idx)) < 1e-12);
  const Trajectory no_mask(gt.frames());
  CHECK_THROWS_AS(normalized_mse(no_mask, no_mask, Region::speaking_only), DataError);
  const Trajectory silent(gt.frames(), 100.0, std::vector<bool>(gt.size(), false));
  CHECK_THROWS_AS(normalized_mse(silent, silent, Region::speaking_only), DataError);
  CHECK_THROWS_AS(normalized_mse(noise_trajectory(10, 1), noise_trajectory(11, 1)), DataError);
}

TEST_CASE("local_cca identities") {
  const Trajectory gt = synth_trajectory(11, 20.0);
  CHECK(std::abs(local_cca(gt, gt) - 1.0) < 1e-6);

  // Channels permuted and scaled, plus an offset.
  std::vector<Frame> f;
  for (const auto& fr : gt.frames()) f.push_back({-4.0 * fr[2] + 1.0, 0.01 * fr[0], 7.0 * fr[1] - 2.0});
  CHECK(std::abs(local_cca(Trajectory(f), gt) - 1.0) < 1e-6);
  CHECK_THROWS_AS(local_cca(noise_trajectory(40, 1), noise_trajectory(40, 2)), DataError);
}

TEST_CASE("canonical correlation is invariant under invertible block maps") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd a(50, 3), b(50, 3);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = d(rng);
      b.data()[i] = d(rng);
    }
    b.col(0) += 0.8 * a.col(1);
    Eigen::Matrix3d M;
    for (int i = 0; i < 9; ++i) M.data()[i] = d(rng);
    REQUIRE(std::abs(M.determinant()) > 1e-2);
    const double base = canonical_correlation(a, b);
    CHECK(std::abs(canonical_correlation(a * M, b) - base) < 1e-6);
    CHECK(std::abs(canonical_correlation(a, b * M.transpose()) - base) < 1e-6);
    CHECK(std::abs(base - oracle::qr_cca(a, b)) < 1e-10);
  }
  Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(50, 3);
  CHECK(canonical_correlation(constant, Eigen::MatrixXd::Random(50, 3)) == 0.0);
}

TEST_CASE("local_cca matches the QR oracle on independent signals") {
  const Trajectory a = noise_trajectory(5025, 1), b = noise_trajectory(5025, 2);
  double sum = 0;
  int windows = 0;
  for (std::size_t s = 0; s + 50 <= a.size(); s += 25) {
    Eigen::MatrixXd x(50, 3), y(50, 3);
    for (int i = 0; i < 50; ++i)
      for (int c = 0; c < 3; ++c) {
        x(i, c) = a[s + i][c];
        y(i, c) = b[s + i][c];
      }
    sum += oracle::qr_cca(x, y);
    ++windows;
  }
  CHECK(windows == 200);
  CHECK(std::abs(local_cca(a, b) - sum / windows) < 1e-8);
  const double v = local_cca(a, b);
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);
}

TEST_CASE("sparc basics") {
  std::vector<double> x(400);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * std::numbers::pi * 0.5 * i / 100.0);
  const double clean = sparc(x, 100.0);
  CHECK(clean < 0.0);
  CHECK(std::abs(clean - oracle::direct_sparc(x, 100.0)) < 1e-9);

  std::vector<double> scaled(x);
  for (double& v : scaled) v *= 10.0;
  CHECK(std::abs(sparc(scaled, 100.0) - clean) < 1e-9);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.0, 0.1);
  std::vector<double> noisy(x);
  for (double& v : noisy) v += d(rng);
  CHECK(std::abs(sparc(noisy, 100.0)) > std::abs(clean));

  CHECK_THROWS_AS(sparc(std::vector<double>(50, 1.0), 100.0), NoMovement);
  CHECK_THROWS_WITH(sparc(std::vector<double>(50, 1.0), 100.0), "no movement");
  CHECK_THROWS_AS(sparc(std::vector<double>(5, 1.0), 100.0), DataError);
}

TEST_CASE("sparc matches the direct DFT oracle on synthetic channels") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = noisy_prediction(seed, 3.0).channel(static_cast<int>(seed % 3));
    CHECK(std::abs(sparc(x, 100.0) - oracle::direct_sparc(x, 100.0)) < 1e-9);
  }
}

TEST_CASE("gaussian smoothing never increases |sparc|") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 34; ++seed) {
    const Trajectory noisy = noisy_prediction(seed, 10.0);
    const Trajectory smooth = apply_linear(noisy, LinearFilterSpec::gaussian(2.0));
    for (int c = 0; c < 3 && checked < 100; ++c, ++checked) {
      CHECK(std::abs(sparc(smooth.channel(c), 100.0)) <= std::abs(sparc(noisy.channel(c), 100.0)));
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("region sparc skips short and still runs") {
  std::vector<Frame> f(300, Frame{0, 0, 0});
  std::vector<bool> mask(300, false);
  for (int i = 0; i < 300; ++i) f[i] = {std::sin(i * 0.05), std::cos(i * 0.05), std::sin(i * 0.03)};
  for (int i = 20; i < 25; ++i) mask[i] = true;    // too short
  for (int i = 100; i < 200; ++i) mask[i] = true;  // scored
  const Trajectory t(f, 100.0, mask);
  const Frame r = region_sparc_abs(t, Region::speaking_only);
  const auto x = t.channel(0);
  CHECK(r[0] == std::abs(sparc(std::vector<double>(x.begin() + 100, x.begin() + 200), 100.0)));
}

TEST_CASE("sym_kl properties") {
  const Trajectory a = noise_trajectory(4000, 1), b = noise_trajectory(4000, 2, 0.7);
  CHECK(std::abs(sym_kl(a, a)) < 1e-9);
  CHECK(sym_kl(a, b) == sym_kl(b, a));
  CHECK(sym_kl(a, b) > 0.0);
  CHECK(std::abs(sym_kl(a, b) - oracle::direct_sym_kl_yz(a, b, 50)) < 1e-10);
  CHECK(sym_kl(a, b, 50, Region::full, KlMode::per_channel) > 0.0);
  CHECK(sym_kl(a, b, 50, Region::full, KlMode::per_channel) ==
        sym_kl(b, a, 50, Region::full, KlMode::per_channel));
  const Trajectory still(std::vector<Frame>(100, Frame{1, 1, 1}));
  CHECK_THROWS_AS(sym_kl(still, still), DataError);
}

TEST_CASE("hf_ratio examples") {
  CHECK(hf_ratio(sinusoid(1.0, 6000)) < 0.01);
  CHECK(hf_ratio(sinusoid(10.0, 6000)) > 0.99);
  const double white = hf_ratio(noise_trajectory(6000, 4));
  CHECK(std::abs(white - 0.9) < 0.03);

  // Amplitude invariance.
  const Trajectory t = noisy_prediction(1);
  auto f = t.frames();
  for (auto& fr : f)
    for (double& v : fr) v *= 250.0;
  CHECK(std::abs(hf_ratio(t.with_frames(f)) - hf_ratio(t)) < 1e-12);

  CHECK_THROWS_AS(hf_ratio(Trajectory(std::vector<Frame>(100, Frame{2, 2, 2}))), DataError);
  CHECK_THROWS_AS(hf_ratio(sinusoid(1.0, 30)), DataError);
}

TEST_CASE("hf_ratio is monotone under gaussian smoothing") {
  // The unwindowed periodogram sees the jump between the last and first
  // sample, which puts a leakage floor under the ratio. Once smoothing has
  // pushed the ratio down to that floor, heavier smoothing removes total
  // power faster than the floor and the ratio climbs again, so the sweep
  // stays in the working range of the calibration.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Trajectory t = noisy_prediction(seed);
    double prev = hf_ratio(t);
    for (double sigma = 0.25; sigma <= 3.0; sigma *= 1.1) {
      const double r = hf_ratio(apply_linear(t, LinearFilterSpec::gaussian(sigma)));
      CHECK(r <= prev + 1e-9);
      prev = r;
    }
  }
}

TEST_CASE("hf_ratio rises again past the leakage floor") {
  const Trajectory t = noisy_prediction(2);
  const double mid = hf_ratio(apply_linear(t, LinearFilterSpec::gaussian(3.0)));
  const double heavy = hf_ratio(apply_linear(t, LinearFilterSpec::gaussian(40.0)));
  CHECK(heavy > mid);
}

TEST_CASE("power spectrum matches a direct DFT") {
  for (std::size_t n : {8u, 37u, 100u}) {
    const auto x = noise_trajectory(n, n).channel(0);
    const auto got = power_spectrum(x);
    const auto want = oracle::dft_power(x);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - want[k]) < 1e-9 * (1 + want[k]));
  }
}

TEST_CASE("metrics are pure") {
  const Trajectory gt = synth_trajectory(5, 20.0), pred = noisy_prediction(5, 20.0);
  const EvalReport a = evaluate(pred, gt, Region::speaking_only), b = evaluate(pred, gt, Region::speaking_only);
  CHECK(a.normalized_mse == b.normalized_mse);
  CHECK(a.local_cca == b.local_cca);
  CHECK(a.sparc_abs == b.sparc_abs);
  CHECK(a.sym_kl == b.sym_kl);
  CHECK(a.hf_ratio == b.hf_ratio);
  CHECK(a.region == Region::speaking_only);
}

TEST_CASE("region names") {
  CHECK(parse_region("speaking") == Region::speaking_only);
  CHECK(parse_region(region_name(Region::full)) == Region::full);
  CHECK_THROWS_AS(parse_region("loud"), DataError);
}

}  // TEST_SUITE

TEST_SUITE("calibration") {

TEST_CASE("equal ratios need no filtering") {
  const Trajectory t = noisy_prediction(1);
  const Calibration g = calibrate_linear(LinearKind::gaussian, t, t);
  CHECK(g.spec == LinearFilterSpec::gaussian(kMinSigma));
  const Calibration m = calibrate_linear(LinearKind::moving_average, t, t);
  CHECK(m.spec == LinearFilterSpec::moving_average(1));
  CHECK(m.achieved_ratio == m.target_ratio);
}

TEST_CASE("calibration meets the target and is minimal") {
  const Trajectory noisy = noisy_prediction(4);
  const Trajectory reference = apply_linear(noisy, LinearFilterSpec::gaussian(3.0));
  for (auto kind : {LinearKind::gaussian, LinearKind::moving_average}) {
    const Calibration c = calibrate_linear(kind, reference, noisy);
    CHECK(c.achieved_ratio <= c.target_ratio + kCalibrationTolerance);
    CHECK(std::abs(c.achieved_ratio - c.target_ratio) <= kCalibrationTolerance);
    CHECK(c.noisy_ratio > c.target_ratio);
    if (kind == LinearKind::moving_average) {
      const int w = static_cast<int>(c.spec.param);
      if (w > 1) {
        const double weaker = hf_ratio(apply_linear(noisy, LinearFilterSpec::moving_average(w - 2)));
        CHECK(weaker > c.target_ratio + kCalibrationTolerance);
      }
    } else {
      const double weaker = hf_ratio(apply_linear(noisy, LinearFilterSpec::gaussian(c.spec.param - 1e-3)));
      CHECK(weaker > c.target_ratio + kCalibrationTolerance);
    }
  }
}

TEST_CASE("unreachable target") {
  // Box sidelobes leave white noise well above a pure low tone's ratio even at width 501.
  const Trajectory reference = sinusoid(0.5, 3000);
  const Trajectory white = noise_trajectory(3000, 8);
  CHECK_THROWS_WITH_AS(calibrate_linear(LinearKind::moving_average, reference, white), "target ratio unreachable",
                       CalibrationError);
}

}  // TEST_SUITE
