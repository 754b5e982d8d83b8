#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "abjad/audio.hpp"
#include "abjad/common.hpp"

namespace abjad {

namespace detail {

inline uint32_t read_u32le(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}
inline uint16_t read_u16le(const uint8_t* p) {
  return uint16_t(p[0]) | uint16_t(p[1]) << 8;
}
inline void put_u32le(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 24));
}
inline void put_u16le(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v));
  out.push_back(uint8_t(v >> 8));
}

}  // namespace detail

// RIFF/WAVE decoder for mono PCM16 and float32. 16-bit codes map to
// code / 32768, so -32768 reads as exactly -1.0.
inline AudioClip read_wav(const std::vector<uint8_t>& bytes) {
  using namespace detail;
  require(bytes.size() >= 44, ErrorCode::MalformedWav, "wav: file too small");
  require(std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
              std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          ErrorCode::MalformedWav, "wav: missing RIFF/WAVE header");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  const uint8_t* data = nullptr;
  uint32_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    uint32_t chunk_len = read_u32le(chunk + 4);
    if (pos + 8 + chunk_len > bytes.size())
      throw Error(ErrorCode::MalformedWav, "wav: chunk overruns file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      require(chunk_len >= 16, ErrorCode::MalformedWav, "wav: short fmt chunk");
      format = read_u16le(chunk + 8);
      channels = read_u16le(chunk + 10);
      sample_rate = read_u32le(chunk + 12);
      bits = read_u16le(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = chunk_len;
    }
    pos += 8 + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }
  require(have_fmt && data != nullptr, ErrorCode::MalformedWav,
          "wav: missing fmt or data chunk");
  require(sample_rate > 0, ErrorCode::MalformedWav, "wav: zero sample rate");
  require(channels == 1, ErrorCode::WavChannelCount,
          "wav: expected mono, got " + std::to_string(channels) + " channels");

  AudioClip clip;
  clip.sample_rate = int(sample_rate);
  if (format == 1 && bits == 16) {
    size_t n = data_len / 2;
    clip.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t code = int16_t(read_u16le(data + 2 * i));
      clip.samples[i] = double(code) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    size_t n = data_len / 4;
    clip.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = read_u32le(data + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      clip.samples[i] = double(f);
    }
  } else {
    throw Error(ErrorCode::UnsupportedWavEncoding,
                "wav: unsupported encoding (format=" + std::to_string(format) +
                    ", bits=" + std::to_string(bits) + ")");
  }
  return clip;
}

// 16-bit PCM mono container. Samples clamp to [-1, 1]; 1.0 stores as 32767,
// so read_wav inverts the file up to one quantization step.
inline std::vector<uint8_t> write_wav(const AudioClip& clip) {
  using namespace detail;
  require(clip.sample_rate > 0, ErrorCode::BadArgument, "wav: sample_rate must be > 0");
  uint32_t n = uint32_t(clip.samples.size());
  uint32_t data_len = n * 2;
  std::vector<uint8_t> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32le(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32le(out, 16);
  put_u16le(out, 1);  // PCM
  put_u16le(out, 1);  // mono
  put_u32le(out, uint32_t(clip.sample_rate));
  put_u32le(out, uint32_t(clip.sample_rate) * 2);
  put_u16le(out, 2);
  put_u16le(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32le(out, data_len);
  for (uint32_t i = 0; i < n; ++i) {
    double v = clip.samples[i];
    long code = std::lround(v * 32768.0);
    if (code > 32767) code = 32767;
    if (code < -32768) code = -32768;
    put_u16le(out, uint16_t(int16_t(code)));
  }
  return out;
}

inline std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorCode::IoError, "cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

inline void write_file_bytes(const std::string& path,
                             const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), ErrorCode::IoError, "cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  require(f.good(), ErrorCode::IoError, "short write to " + path);
}

inline AudioClip read_wav_file(const std::string& path) {
  return read_wav(read_file_bytes(path));
}

inline void write_wav_file(const std::string& path, const AudioClip& clip) {
  write_file_bytes(path, write_wav(clip));
}

}  // namespace abjad
