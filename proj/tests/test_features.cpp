#include "abjad/features.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace abjad;
using Catch::Approx;

namespace {

Spectrogram random_spectrogram(Rng& rng, size_t frames, int fft_size,
                               int sample_rate) {
  Spectrogram spec;
  spec.window.fft_size = fft_size;
  spec.window.frame_len = fft_size;
  spec.window.hop = fft_size / 2;
  spec.sample_rate = sample_rate;
  spec.frames = frames;
  spec.bins = size_t(fft_size) / 2 + 1;
  spec.coeffs.resize(frames * spec.bins);
  for (auto& c : spec.coeffs) c = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  spec.bin_freqs.resize(spec.bins);
  for (size_t k = 0; k < spec.bins; ++k)
    spec.bin_freqs[k] = double(k) * sample_rate / fft_size;
  return spec;
}

FrameFeatures random_frame_features(Rng& rng, size_t t) {
  FrameFeatures ff;
  for (size_t i = 0; i < t; ++i) {
    ff.zcr.push_back(rng.uniform());
    ff.ste.push_back(rng.uniform());
    ff.centroid.push_back(rng.uniform(0, 8000));
    ff.entropy.push_back(rng.uniform(0, 5));
    ff.flux.push_back(rng.uniform(0, 2));
    ff.rolloff.push_back(rng.uniform(0, 8000));
  }
  return ff;
}

MfccMatrix random_mfcc(Rng& rng, size_t t, size_t c = 13) {
  MfccMatrix m;
  m.frames = t;
  m.coeffs = c;
  m.values.resize(t * c);
  for (auto& v : m.values) v = rng.uniform(-20, 20);
  return m;
}

}  // namespace

TEST_CASE("zcr basics", "[features][zcr]") {
  REQUIRE(zcr({1, 1, 1, 1}) == 0.0);
  REQUIRE(zcr({1, -1, 1, -1}) == 1.0);
  REQUIRE_THROWS_AS(zcr({1.0}), Error);
}

TEST_CASE("zcr of a 1 kHz sine frame", "[features][zcr]") {
  auto x = testutil::sine(1000.0, 16000, 400);
  // 25 ms of a 1 kHz sine holds 25 cycles = 50 crossings
  REQUIRE(zcr(x) == Approx(50.0 / 399.0).margin(0.01));
}

TEST_CASE("zcr zero samples adopt the previous nonzero sign", "[features][zcr]") {
  REQUIRE(zcr({1, 0, 1}) == 0.0);
  REQUIRE(zcr({1, 0, -1}) == Approx(0.5));
}

TEST_CASE("ste basics", "[features][ste]") {
  REQUIRE(ste({0, 0, 0}) == 0.0);
  REQUIRE(ste({0.5, 0.5, 0.5, 0.5}) == Approx(0.25));
}

TEST_CASE("zcr/ste match loop oracles on random frames", "[features][oracle]") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = testutil::random_signal(rng, 400);
    REQUIRE(zcr(x) == oracle::zcr_loop(x));
    REQUIRE(ste(x) == oracle::ste_loop(x));
  }
}

TEST_CASE("spectral features of a one-hot spectrum", "[features][spectral]") {
  FeatureConfig cfg;
  std::vector<double> bin_freqs(257), mag(257, 0.0);
  for (size_t k = 0; k < 257; ++k) bin_freqs[k] = double(k) * 16000 / 512;
  mag[64] = 3.0;  // 2000 Hz
  auto sf = spectral_features({}, mag, bin_freqs, cfg);
  REQUIRE(sf.centroid == Approx(2000.0));
  REQUIRE(sf.entropy == Approx(0.0).margin(1e-12));
  REQUIRE(sf.rolloff == Approx(2000.0));
  REQUIRE(sf.flux == 0.0);  // first frame
}

TEST_CASE("spectral features of a uniform spectrum", "[features][spectral]") {
  FeatureConfig cfg;
  size_t bins = 257;
  std::vector<double> bin_freqs(bins), mag(bins, 0.7);
  double mean_freq = 0.0;
  for (size_t k = 0; k < bins; ++k) {
    bin_freqs[k] = double(k) * 16000 / 512;
    mean_freq += bin_freqs[k];
  }
  mean_freq /= double(bins);
  auto sf = spectral_features({}, mag, bin_freqs, cfg);
  REQUIRE(sf.entropy == Approx(std::log(double(bins))));
  REQUIRE(sf.centroid == Approx(mean_freq));
}

TEST_CASE("flux of identical consecutive frames is zero", "[features][spectral]") {
  FeatureConfig cfg;
  Rng rng(8);
  std::vector<double> bin_freqs(129), mag(129);
  for (size_t k = 0; k < 129; ++k) {
    bin_freqs[k] = double(k) * 16000 / 256;
    mag[k] = rng.uniform();
  }
  auto sf = spectral_features(mag, mag, bin_freqs, cfg);
  REQUIRE(sf.flux == Approx(0.0).margin(1e-15));
}

TEST_CASE("entropy bounds with uniformity attained only at uniform",
          "[features][spectral][property]") {
  FeatureConfig cfg;
  Rng rng(17);
  std::vector<double> bin_freqs(65);
  for (size_t k = 0; k < 65; ++k) bin_freqs[k] = double(k) * 16000 / 128;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> mag(65);
    for (auto& m : mag) m = rng.uniform(0.0, 2.0);
    auto sf = spectral_features({}, mag, bin_freqs, cfg);
    REQUIRE(sf.entropy >= 0.0);
    REQUIRE(sf.entropy <= std::log(65.0) + 1e-12);
    REQUIRE(sf.entropy < std::log(65.0) - 1e-6);  // random magnitudes are not uniform
  }
}

TEST_CASE("rolloff is monotone in rolloff_pct", "[features][spectral][property]") {
  Rng rng(21);
  std::vector<double> bin_freqs(129), mag(129);
  for (size_t k = 0; k < 129; ++k) {
    bin_freqs[k] = double(k) * 16000 / 256;
    mag[k] = rng.uniform();
  }
  double prev = 0.0;
  for (double pct : {0.1, 0.25, 0.5, 0.75, 0.85, 0.95, 1.0}) {
    FeatureConfig cfg;
    cfg.rolloff_pct = pct;
    auto sf = spectral_features({}, mag, bin_freqs, cfg);
    REQUIRE(sf.rolloff >= prev);
    prev = sf.rolloff;
  }
}

TEST_CASE("mfcc of constant filterbank energies", "[features][mfcc]") {
  std::vector<double> log_energies(40, std::log(2.5));
  auto coeffs = dct2_ortho(log_energies, 13);
  REQUIRE(coeffs[0] == Approx(std::log(2.5) * std::sqrt(40.0)));
  for (size_t j = 1; j < coeffs.size(); ++j)
    REQUIRE(coeffs[j] == Approx(0.0).margin(1e-12));
}

TEST_CASE("mfcc of an all-zero spectrogram hits the log floor", "[features][mfcc]") {
  WindowSpec w;
  std::vector<double> x(3200, 0.0);
  auto spec = stft(x, w, 16000);
  FeatureConfig cfg;
  auto m = mfcc(spec, cfg);
  for (size_t t = 0; t < m.frames; ++t) {
    REQUIRE(m.at(t, 0) == Approx(std::log(1e-10) * std::sqrt(40.0)));
    for (size_t c = 1; c < m.coeffs; ++c)
      REQUIRE(m.at(t, c) == Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("mfcc matches the brute-force oracle", "[features][mfcc][oracle]") {
  Rng rng(4711);
  FeatureConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    auto spec = random_spectrogram(rng, 4, 512, 16000);
    auto m = mfcc(spec, cfg);
    for (size_t t = 0; t < spec.frames; ++t) {
      std::vector<double> mag(spec.bins);
      for (size_t k = 0; k < spec.bins; ++k) mag[k] = spec.magnitude(t, k);
      auto want = oracle::mfcc_frame_oracle(mag, cfg.n_mels, cfg.n_mfcc,
                                            cfg.mel_fmin, cfg.mel_fmax,
                                            cfg.log_floor, 16000, 512);
      for (size_t c = 0; c < m.coeffs; ++c)
        REQUIRE(m.at(t, c) == Approx(want[c]).margin(1e-6));
    }
  }
}

TEST_CASE("aggregate_mean has length 19 and matches the mean oracle",
          "[features][aggregate]") {
  Rng rng(5);
  auto ff = random_frame_features(rng, 11);
  auto m = random_mfcc(rng, 11);
  auto v = aggregate_mean(ff, m);
  REQUIRE(v.values.size() == 19);
  REQUIRE(v.values[0] == Approx(oracle::mean_loop(ff.zcr)));
  REQUIRE(v.values[5] == Approx(oracle::mean_loop(ff.rolloff)));
  for (size_t c = 0; c < 13; ++c) {
    std::vector<double> col(m.frames);
    for (size_t t = 0; t < m.frames; ++t) col[t] = m.at(t, c);
    REQUIRE(v.values[6 + c] == Approx(oracle::mean_loop(col)));
  }
}

TEST_CASE("aggregate_mean of identical frames returns the frame",
          "[features][aggregate]") {
  Rng rng(6);
  auto ff = random_frame_features(rng, 1);
  auto m = random_mfcc(rng, 1);
  FrameFeatures rep;
  MfccMatrix mrep;
  mrep.frames = 5;
  mrep.coeffs = 13;
  for (int i = 0; i < 5; ++i) {
    rep.zcr.push_back(ff.zcr[0]);
    rep.ste.push_back(ff.ste[0]);
    rep.centroid.push_back(ff.centroid[0]);
    rep.entropy.push_back(ff.entropy[0]);
    rep.flux.push_back(ff.flux[0]);
    rep.rolloff.push_back(ff.rolloff[0]);
    mrep.values.insert(mrep.values.end(), m.values.begin(), m.values.end());
  }
  auto v = aggregate_mean(rep, mrep);
  REQUIRE(v.values[0] == Approx(ff.zcr[0]));
  REQUIRE(v.values[3] == Approx(ff.entropy[0]));
  REQUIRE(v.values[6] == Approx(m.at(0, 0)));
  REQUIRE(v.values[18] == Approx(m.at(0, 12)));
}

TEST_CASE("aggregate_stats layout and hand-computed moments",
          "[features][aggregate]") {
  FrameFeatures ff;
  ff.zcr = {1, 2, 3};
  ff.ste = {0.5, 0.5, 0.5};
  ff.centroid = {0, 0, 0};
  ff.entropy = {0, 0, 0};
  ff.flux = {0, 0, 0};
  ff.rolloff = {0, 0, 0};
  MfccMatrix m;
  m.frames = 3;
  m.coeffs = 13;
  m.values.assign(39, 0.0);
  auto v = aggregate_stats(ff, m);
  REQUIRE(v.values.size() == 114);
  // zcr column [1,2,3]: mean 2, std sqrt(2/3), skew 0, max 3, min 1, median 2
  REQUIRE(v.values[0] == Approx(2.0));
  REQUIRE(v.values[1] == Approx(std::sqrt(2.0 / 3.0)));
  REQUIRE(v.values[2] == Approx(0.0).margin(1e-12));
  REQUIRE(v.values[3] == Approx(3.0));
  REQUIRE(v.values[4] == Approx(1.0));
  REQUIRE(v.values[5] == Approx(2.0));
  // constant ste column: (c, 0, 0, c, c, c)
  REQUIRE(v.values[6] == Approx(0.5));
  REQUIRE(v.values[7] == Approx(0.0).margin(1e-12));
  REQUIRE(v.values[8] == Approx(0.0).margin(1e-12));
  REQUIRE(v.values[9] == Approx(0.5));
  REQUIRE(v.values[10] == Approx(0.5));
  REQUIRE(v.values[11] == Approx(0.5));
}

TEST_CASE("aggregate_stats matches the loop oracle and respects order bounds",
          "[features][aggregate][property]") {
  Rng rng(12);
  auto ff = random_frame_features(rng, 30);
  auto m = random_mfcc(rng, 30);
  auto v = aggregate_stats(ff, m);
  auto cols = std::vector<std::vector<double>>{ff.zcr, ff.ste, ff.centroid,
                                               ff.entropy, ff.flux, ff.rolloff};
  for (size_t c = 0; c < 13; ++c) {
    std::vector<double> col(m.frames);
    for (size_t t = 0; t < m.frames; ++t) col[t] = m.at(t, c);
    cols.push_back(col);
  }
  for (size_t f = 0; f < 19; ++f) {
    auto want = oracle::stats_loop(cols[f]);
    double mean = v.values[f * 6 + 0], stddev = v.values[f * 6 + 1],
           skew = v.values[f * 6 + 2], mx = v.values[f * 6 + 3],
           mn = v.values[f * 6 + 4], med = v.values[f * 6 + 5];
    REQUIRE(mean == Approx(want.mean));
    REQUIRE(stddev == Approx(want.stddev));
    REQUIRE(skew == Approx(want.skew));
    REQUIRE(mx == want.max);
    REQUIRE(mn == want.min);
    REQUIRE(med == want.median);
    REQUIRE(mn <= med);
    REQUIRE(med <= mx);
    REQUIRE(mn <= mean);
    REQUIRE(mean <= mx);
  }
}

TEST_CASE("extract shapes and determinism", "[features][extract]") {
  Rng rng(2025);
  AudioClip clip{testutil::random_signal(rng, 32000, 0.5), 16000};
  WindowSpec w;
  FeatureConfig cfg;

  auto r1 = extract(clip, w, cfg);
  REQUIRE(r1.mfcc.frames == 198);
  REQUIRE(r1.mfcc.coeffs == 13);
  REQUIRE(r1.vector.values.size() == 19);

  cfg.aggregation = Aggregation::Stats;
  auto r2 = extract(clip, w, cfg);
  REQUIRE(r2.vector.values.size() == 114);

  auto r3 = extract(clip, w, cfg);
  REQUIRE(r2.vector.values == r3.vector.values);
  REQUIRE(r2.mfcc.values == r3.mfcc.values);
}

TEST_CASE("centroid of a pure tone sits within one bin", "[features][property]") {
  WindowSpec w;
  FeatureConfig cfg;
  auto x = testutil::sine(2000.0, 16000, 8000, 0.8);
  auto spec = stft(x, w, 16000);
  std::vector<double> mag(spec.bins);
  for (size_t k = 0; k < spec.bins; ++k) mag[k] = spec.magnitude(20, k);
  auto sf = spectral_features({}, mag, spec.bin_freqs, cfg);
  double bin_width = 16000.0 / 512.0;
  REQUIRE(sf.centroid == Approx(2000.0).margin(bin_width));
}
