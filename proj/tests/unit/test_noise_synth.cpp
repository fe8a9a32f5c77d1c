#include <doctest.h>

#include <cmath>

#include "headmotion/error.hpp"
#include "headmotion/metrics.hpp"
#include "headmotion/noise.hpp"
#include "headmotion/synth.hpp"

using namespace hm;

namespace {

Window ramp_window() {
  std::vector<double> v(kWindowDim);
  for (int i = 0; i < kWindowDim; ++i) v[i] = 1.0 + 0.01 * i;
  return Window(v);
}

}  // namespace

TEST_SUITE("noise_synth") {

TEST_CASE("dropout extremes") {
  const Window w = ramp_window();
  CHECK(frame_dropout(w, 0.0, 1) == w);
  const Window z = frame_dropout(w, 1.0, 1);
  for (double v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("dropout rate concentrates and never splits frames") {
  const Window w = ramp_window();
  long dropped = 0, total = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const Window out = frame_dropout(w, 0.5, s);
    for (int f = 0; f < out.frames(); ++f) {
      const bool z0 = out.at(f, 0) == 0.0, z1 = out.at(f, 1) == 0.0, z2 = out.at(f, 2) == 0.0;
      CHECK((z0 == z1 && z1 == z2));
      if (z0) {
        ++dropped;
      } else {
        for (int c = 0; c < 3; ++c) CHECK(out.at(f, c) == w.at(f, c));
      }
      ++total;
    }
  }
  CHECK(std::abs(static_cast<double>(dropped) / total - 0.5) < 0.02);
}

TEST_CASE("exact-count dropout") {
  const NoiseSpec spec = NoiseSpec::parse("dropout:0.5:exact");
  CHECK(spec.exact_count);
  for (std::uint64_t s = 0; s < 20; ++s) {
    NoiseSpec sp = spec;
    sp.seed = s;
    const Window out = apply_noise(ramp_window(), sp);
    int dropped = 0;
    for (int f = 0; f < 50; ++f) dropped += out.at(f, 0) == 0.0;
    CHECK(dropped == 25);
  }
}

TEST_CASE("gaussian noise moments and determinism") {
  const Window w = ramp_window();
  const Window tiny = add_gaussian(w, 1e-12, 4);
  for (int i = 0; i < kWindowDim; ++i) CHECK(std::abs(tiny.values()[i] - w.values()[i]) < 1e-9);

  double sum = 0, sq = 0;
  long n = 0;
  for (std::uint64_t s = 0; n < 1000000; ++s) {
    const Window out = add_gaussian(w, 0.2, s);
    for (int i = 0; i < kWindowDim; ++i) {
      const double d = out.values()[i] - w.values()[i];
      sum += d;
      sq += d * d;
      ++n;
    }
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(sd >= 0.198);
  CHECK(sd <= 0.202);
  CHECK(add_gaussian(w, 0.2, 99) == add_gaussian(w, 0.2, 99));
  CHECK_FALSE(add_gaussian(w, 0.2, 99) == add_gaussian(w, 0.2, 100));
}

TEST_CASE("spec validation and text round trip") {
  CHECK_THROWS_AS(NoiseSpec::dropout(1.5), DataError);
  CHECK_THROWS_AS(NoiseSpec::gaussian(0.0), DataError);
  CHECK_THROWS_AS(NoiseSpec::parse("pink:0.1"), DataError);
  CHECK_THROWS_AS(NoiseSpec::parse("gauss:abc"), DataError);
  for (const char* text : {"dropout:0.5", "dropout:0.25:exact", "gauss:0.2", "spike:0.03:1", "steps:0.2:15:40"}) {
    CHECK(NoiseSpec::parse(NoiseSpec::parse(text).to_string()).to_string() == NoiseSpec::parse(text).to_string());
  }
  const NoiseRecipe r = NoiseRecipe::parse("0.15*dropout:0.5,0.55*gauss:0.2,0.3*gauss:0.05+spike:0.03:1");
  REQUIRE(r.options.size() == 3);
  CHECK(r.options[2].chain.size() == 2);
  CHECK(NoiseRecipe::parse(r.to_string()).to_string() == r.to_string());
  CHECK(NoiseRecipe::parse("none").empty());
  CHECK_THROWS_AS(NoiseRecipe::parse("0*gauss:0.2"), DataError);
}

TEST_CASE("step offsets are piecewise constant per channel") {
  NoiseSpec s = NoiseSpec::steps(0.3, 5);
  std::vector<Frame> zero(400, Frame{0, 0, 0});
  const Trajectory out = apply_noise(Trajectory(zero), s);
  int changes = 0;
  for (std::size_t i = 1; i < out.size(); ++i) changes += out[i][0] != out[i - 1][0];
  // Segments are 15..40 frames long.
  CHECK(changes >= 400 / 40 - 1);
  CHECK(changes <= 400 / 15);
}

TEST_CASE("corruption happens in normalized units") {
  const Trajectory t(std::vector<Frame>(100, Frame{5, -2, 1}));
  NormStats st{{5, -2, 1}, {2, 3, 4}};
  const std::vector<NoiseSpec> chain{NoiseSpec::dropout(1.0, 3)};
  // A dropped frame sits at the channel mean.
  CHECK(corrupt_normalized(t, chain, st) == t);
}

TEST_CASE("synth is deterministic, finite and unit variance") {
  const Trajectory a = synth_trajectory(42, 60.0);
  CHECK(a == synth_trajectory(42, 60.0));
  CHECK_FALSE(a == synth_trajectory(43, 60.0));
  CHECK(a.size() == 6000);
  REQUIRE(a.has_mask());
  CHECK(a.speaking()->size() == a.size());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Trajectory t = synth_trajectory(seed, 60.0 + 10.0 * seed);
    for (int c = 0; c < 3; ++c) {
      const auto x = t.channel(c);
      double m = 0, v = 0;
      for (double d : x) {
        CHECK(std::isfinite(d));
        m += d;
      }
      m /= x.size();
      for (double d : x) v += (d - m) * (d - m);
      v /= x.size();
      CHECK(v >= 0.9);
      CHECK(v <= 1.1);
    }
  }
  CHECK_THROWS_AS(synth_trajectory(1, 0.5), DataError);
}

TEST_CASE("speaking mask alternates in 2-8 s runs") {
  const Trajectory t = synth_trajectory(7, 120.0);
  const auto& m = *t.speaking();
  std::size_t i = 0;
  int runs = 0;
  bool saw_true = false, saw_false = false;
  while (i < m.size()) {
    std::size_t j = i;
    while (j < m.size() && m[j] == m[i]) ++j;
    (m[i] ? saw_true : saw_false) = true;
    if (i > 0 && j < m.size()) {
      CHECK(j - i >= 200);
      CHECK(j - i <= 800);
    }
    ++runs;
    i = j;
  }
  CHECK(runs >= 120 / 8);
  CHECK(saw_true);
  CHECK(saw_false);
}

TEST_CASE("without nods almost all power is below 5 Hz") {
  SynthConfig cfg;
  cfg.nod_rate_hz = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(hf_ratio(synth_trajectory(seed, cfg)) < 0.05);
}

}  // TEST_SUITE
