#include "abjad/dsp.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace abjad;
using Catch::Approx;

TEST_CASE("resample is the identity at equal rates", "[dsp][resample]") {
  Rng rng(11);
  AudioClip clip{testutil::random_signal(rng, 1600), 16000};
  AudioClip out = resample(clip, 16000);
  REQUIRE(out.samples == clip.samples);
  REQUIRE(out.sample_rate == 16000);
}

TEST_CASE("resample length follows the rate ratio", "[dsp][resample]") {
  AudioClip clip{std::vector<double>(48000, 0.25), 48000};
  AudioClip out = resample(clip, 16000);
  REQUIRE(out.samples.size() == 16000);
  REQUIRE(out.sample_rate == 16000);
}

TEST_CASE("resample preserves a tone below both Nyquists", "[dsp][resample]") {
  AudioClip clip{testutil::sine(1000.0, 8000, 8000, 0.5), 8000};
  AudioClip out = resample(clip, 16000);
  REQUIRE(out.samples.size() == 16000);
  double peak = testutil::peak_frequency(out.samples, 16000);
  double bin_width = 16000.0 / 16384.0;
  REQUIRE(peak == Approx(1000.0).margin(bin_width + 1e-9));
}

TEST_CASE("resample rejects nonpositive target", "[dsp][resample]") {
  AudioClip clip{std::vector<double>(100, 0.0), 16000};
  REQUIRE_THROWS_AS(resample(clip, 0), Error);
}

TEST_CASE("pre-emphasis of constant input", "[dsp][preemph]") {
  auto y = pre_emphasis({1.0, 1.0, 1.0}, 0.97);
  REQUIRE(y[0] == Approx(1.0));
  REQUIRE(y[1] == Approx(0.03));
  REQUIRE(y[2] == Approx(0.03));
}

TEST_CASE("pre-emphasis impulse response", "[dsp][preemph]") {
  auto y = pre_emphasis({0.0, 1.0, 0.0}, 0.97);
  REQUIRE(y[0] == 0.0);
  REQUIRE(y[1] == 1.0);
  REQUIRE(y[2] == Approx(-0.97));
}

TEST_CASE("pre-emphasis matches the loop oracle exactly", "[dsp][preemph]") {
  Rng rng(42);
  auto x = testutil::random_signal(rng, 1000);
  auto got = pre_emphasis(x, 0.97);
  auto want = oracle::pre_emphasis_loop(x, 0.97);
  for (size_t i = 0; i < x.size(); ++i) REQUIRE(got[i] == want[i]);
}

TEST_CASE("pre-emphasis DC property", "[dsp][preemph]") {
  std::vector<double> x(64, 0.5);
  auto y = pre_emphasis(x, 0.9);
  for (size_t n = 1; n < y.size(); ++n)
    REQUIRE(std::abs(y[n]) == Approx((1.0 - 0.9) * 0.5));
}

TEST_CASE("frame counts follow the framing formula", "[dsp][framing]") {
  WindowSpec w;
  std::vector<double> x(32000, 0.0);
  REQUIRE(frame_signal(x, w).size() == 198);

  std::vector<double> just_one(size_t(w.frame_len), 0.0);
  REQUIRE(frame_signal(just_one, w).size() == 1);

  std::vector<double> short_sig(size_t(w.frame_len) - 1, 0.0);
  REQUIRE_THROWS_AS(frame_signal(short_sig, w), Error);
}

TEST_CASE("frame contents are hop-aligned slices", "[dsp][framing]") {
  WindowSpec w;
  Rng rng(7);
  auto x = testutil::random_signal(rng, 4000);
  auto frames = frame_signal(x, w);
  for (int i = 0; i < w.frame_len; ++i)
    REQUIRE(frames[3][size_t(i)] == x[size_t(3 * w.hop + i)]);
}

TEST_CASE("stft peak bin of a pure tone", "[dsp][stft]") {
  WindowSpec w;
  auto x = testutil::sine(1000.0, 16000, 32000, 0.8);
  auto spec = stft(x, w, 16000);
  size_t best = 0;
  double best_mag = -1.0;
  for (size_t k = 0; k < spec.bins; ++k) {
    if (spec.magnitude(50, k) > best_mag) {
      best_mag = spec.magnitude(50, k);
      best = k;
    }
  }
  REQUIRE(best == 32);  // 1000 / (16000/512)
  REQUIRE(spec.bin_freqs[32] == Approx(1000.0));
}

TEST_CASE("stft of silence is zero", "[dsp][stft]") {
  WindowSpec w;
  std::vector<double> x(3200, 0.0);
  auto spec = stft(x, w, 16000);
  for (const auto& c : spec.coeffs) REQUIRE(std::abs(c) == 0.0);
}

TEST_CASE("fft matches the naive DFT oracle", "[dsp][stft][oracle]") {
  Rng rng(123);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x = testutil::random_signal(rng, 512);
    FftPlan plan(512);
    auto fast = plan.rfft(x);
    auto slow = oracle::naive_rdft(x);
    for (size_t k = 0; k < slow.size(); ++k) {
      REQUIRE(fast[k].real() == Approx(slow[k].real()).margin(1e-9));
      REQUIRE(fast[k].imag() == Approx(slow[k].imag()).margin(1e-9));
    }
  }
}

TEST_CASE("stft satisfies Parseval per frame", "[dsp][stft]") {
  WindowSpec w;
  Rng rng(5);
  auto x = testutil::random_signal(rng, 2000);
  auto spec = stft(x, w, 16000);
  auto frames = frame_signal(x, w);
  auto window = hann_window(w.frame_len);
  for (size_t t = 0; t < spec.frames; ++t) {
    double spectral = 0.0;
    for (size_t k = 0; k < spec.bins; ++k) {
      double weight = (k == 0 || k == spec.bins - 1) ? 1.0 : 2.0;
      spectral += weight * std::norm(spec.at(t, k));
    }
    double time = 0.0;
    for (int i = 0; i < w.frame_len; ++i) {
      double v = frames[t][size_t(i)] * window[size_t(i)];
      time += v * v;
    }
    REQUIRE(spectral == Approx(double(w.fft_size) * time).epsilon(1e-9));
  }
}

TEST_CASE("istft reconstructs the interior of the signal", "[dsp][istft]") {
  WindowSpec w;
  Rng rng(99);
  auto x = testutil::random_signal(rng, 32000);
  auto spec = stft(x, w, 16000);
  auto y = istft(spec, x.size());
  double max_err = 0.0;
  for (size_t i = size_t(w.frame_len); i + size_t(w.frame_len) < 31920; ++i)
    max_err = std::max(max_err, std::abs(y[i] - x[i]));
  REQUIRE(max_err < 1e-6);
}

TEST_CASE("istft of a zero spectrogram is zero", "[dsp][istft]") {
  WindowSpec w;
  std::vector<double> x(3200, 0.0);
  auto spec = stft(x, w, 16000);
  auto y = istft(spec, x.size());
  for (double v : y) REQUIRE(v == 0.0);
}

TEST_CASE("unit-magnitude mask leaves reconstruction unchanged", "[dsp][istft]") {
  WindowSpec w;
  Rng rng(3);
  auto x = testutil::random_signal(rng, 8000);
  auto spec = stft(x, w, 16000);
  auto direct = istft(spec, x.size());
  for (auto& c : spec.coeffs) c *= 1.0;
  auto masked = istft(spec, x.size());
  REQUIRE(direct == masked);
}

namespace {

// 2 s clip: tone enveloped over the middle second, noise over the whole clip.
AudioClip tone_plus_noise(double tone_amp, double noise_rms, uint64_t seed) {
  const int sr = 16000;
  const size_t n = 32000;
  Rng rng(seed);
  AudioClip clip;
  clip.sample_rate = sr;
  clip.samples.resize(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double t = double(i) / sr;
    double env = 0.0;
    if (t >= 0.5 && t < 1.5)
      env = std::sin(abjad::kPi * (t - 0.5)) * std::sin(abjad::kPi * (t - 0.5));
    clip.samples[i] = tone_amp * env *
                          std::sin(2.0 * abjad::kPi * 1000.0 * double(i) / sr) +
                      rng.normal(0.0, noise_rms);
  }
  return clip;
}

double band_snr_db(const AudioClip& clip, double tone_hz) {
  WindowSpec w;
  auto spec = stft(clip.samples, w, clip.sample_rate);
  size_t tone_bin = size_t(std::llround(tone_hz / (double(clip.sample_rate) / w.fft_size)));
  double in_band = 0.0, off_band = 0.0;
  for (size_t t = 0; t < spec.frames; ++t) {
    for (size_t k = 1; k < spec.bins; ++k) {
      double p = std::norm(spec.at(t, k));
      if (k + 2 >= tone_bin && k <= tone_bin + 2)
        in_band += p;
      else
        off_band += p;
    }
  }
  return 10.0 * std::log10(in_band / std::max(off_band, 1e-300));
}

}  // namespace

TEST_CASE("noise gate improves tone SNR by at least 5 dB", "[dsp][gate]") {
  AudioClip noisy = tone_plus_noise(0.5, 0.05, 2024);
  NoiseGateParams p;
  WindowSpec w;
  AudioClip gated = noise_gate(noisy, p, w);
  double before = band_snr_db(noisy, 1000.0);
  double after = band_snr_db(gated, 1000.0);
  REQUIRE(after - before >= 5.0);
}

TEST_CASE("noise gate never amplifies silence", "[dsp][gate]") {
  AudioClip silence{std::vector<double>(32000, 0.0), 16000};
  NoiseGateParams p;
  WindowSpec w;
  AudioClip out = noise_gate(silence, p, w);
  REQUIRE(rms(out.samples) <= rms(silence.samples));
}

TEST_CASE("noise gate preserves a clean enveloped tone", "[dsp][gate]") {
  AudioClip clean = tone_plus_noise(0.6, 0.0, 1);
  NoiseGateParams p;
  WindowSpec w;
  AudioClip out = noise_gate(clean, p, w);

  auto spec_in = stft(clean.samples, w, 16000);
  auto spec_out = stft(out.samples, w, 16000);
  size_t tone_bin = 32;
  double peak_in = 0.0, peak_out = 0.0;
  for (size_t t = 0; t < spec_in.frames; ++t) {
    peak_in = std::max(peak_in, spec_in.magnitude(t, tone_bin));
    peak_out = std::max(peak_out, spec_out.magnitude(t, tone_bin));
  }
  double ratio_db = 20.0 * std::log10(peak_out / peak_in);
  REQUIRE(std::abs(ratio_db) <= 1.0);
}

TEST_CASE("noise gate mask stays within [min_gain, 1]", "[dsp][gate]") {
  AudioClip noisy = tone_plus_noise(0.4, 0.1, 77);
  NoiseGateParams p;
  WindowSpec w;
  auto spec = stft(noisy.samples, w, 16000);
  auto mask = noise_gate_mask(spec, p);
  for (double m : mask) {
    REQUIRE(m >= p.min_gain - 1e-12);
    REQUIRE(m <= 1.0 + 1e-12);
  }
}
