// Copyright 2026 The capisdr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// RIFF/WAVE reading and writing: integer PCM (16/24-bit) and IEEE float
// (32/64-bit), any channel count, WAVE_FORMAT_EXTENSIBLE headers included.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "capisdr/error.hpp"
#include "capisdr/signal.hpp"

namespace capisdr {

enum class SampleFormat { kPcm16, kPcm24, kFloat32, kFloat64 };

struct WavData {
  int sample_rate_hz = 0;
  SampleFormat format = SampleFormat::kFloat32;
  std::vector<std::vector<double>> channels;  // channels[c][i]

  std::size_t num_channels() const noexcept { return channels.size(); }
  std::size_t num_frames() const noexcept { return channels.empty() ? 0 : channels[0].size(); }

  Waveform channel(std::size_t index) const {
    if (index >= channels.size()) {
      throw Error(ErrorCode::kChannelOutOfRange,
                  "channel " + std::to_string(index) + " requested from a " +
                      std::to_string(channels.size()) + "-channel file");
    }
    return Waveform(channels[index], sample_rate_hz);
  }
};

namespace detail {

inline std::uint32_t read_le(const unsigned char* p, int bytes) {
  std::uint32_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline void write_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace detail

inline WavData parse_wav(const std::vector<unsigned char>& bytes, const std::string& name = "") {
  auto corrupt = [&](const std::string& why) {
    return Error(ErrorCode::kCorruptFile, name + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw corrupt("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t tag = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = detail::read_le(chunk + 4, 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw corrupt("truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      tag = static_cast<std::uint16_t>(detail::read_le(f, 2));
      channels = static_cast<std::uint16_t>(detail::read_le(f + 2, 2));
      rate = detail::read_le(f + 4, 4);
      block_align = static_cast<std::uint16_t>(detail::read_le(f + 12, 2));
      bits = static_cast<std::uint16_t>(detail::read_le(f + 14, 2));
      if (tag == 0xFFFE) {
        if (size < 40) throw corrupt("truncated extensible fmt chunk");
        tag = static_cast<std::uint16_t>(detail::read_le(f + 24, 2));
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw corrupt("data chunk before fmt chunk");
      data = bytes.data() + body;
      // Streaming writers leave the size unset; clamp to what is present.
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw corrupt("missing fmt chunk");
  if (data == nullptr) throw corrupt("missing data chunk");
  if (channels == 0 || rate == 0) throw corrupt("zero channels or sample rate");

  WavData out;
  out.sample_rate_hz = static_cast<int>(rate);
  if (tag == 1 && bits == 16) {
    out.format = SampleFormat::kPcm16;
  } else if (tag == 1 && bits == 24) {
    out.format = SampleFormat::kPcm24;
  } else if (tag == 3 && bits == 32) {
    out.format = SampleFormat::kFloat32;
  } else if (tag == 3 && bits == 64) {
    out.format = SampleFormat::kFloat64;
  } else {
    throw Error(ErrorCode::kUnsupportedFormat, name + ": format tag " + std::to_string(tag) +
                                                   " with " + std::to_string(bits) +
                                                   " bits per sample");
  }
  const std::size_t width = bits / 8;
  if (block_align != width * channels) throw corrupt("inconsistent block alignment");
  const std::size_t frames = data_size / block_align;
  out.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + i * block_align + c * width;
      double v = 0.0;
      switch (out.format) {
        case SampleFormat::kPcm16:
          v = static_cast<std::int16_t>(detail::read_le(p, 2)) / 32768.0;
          break;
        case SampleFormat::kPcm24: {
          std::int32_t s = static_cast<std::int32_t>(detail::read_le(p, 3) << 8) >> 8;
          v = s / 8388608.0;
          break;
        }
        case SampleFormat::kFloat32: {
          const std::uint32_t u = detail::read_le(p, 4);
          float f;
          std::memcpy(&f, &u, 4);
          v = f;
          break;
        }
        case SampleFormat::kFloat64: {
          const std::uint64_t u = detail::read_le(p, 4) |
                                  (static_cast<std::uint64_t>(detail::read_le(p + 4, 4)) << 32);
          std::memcpy(&v, &u, 8);
          break;
        }
      }
      if (!std::isfinite(v)) throw corrupt("non-finite sample");
      out.channels[c][i] = v;
    }
  }
  return out;
}

inline WavData load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return parse_wav(bytes, path.string());
}

inline Waveform load_wav_channel(const std::filesystem::path& path, std::size_t channel = 0) {
  return load_wav(path).channel(channel);
}

inline std::string encode_wav(const std::vector<std::vector<double>>& channels,
                              int sample_rate_hz, SampleFormat format) {
  if (channels.empty()) throw Error(ErrorCode::kInvalidArgument, "no channels to write");
  const std::size_t frames = channels[0].size();
  for (const auto& ch : channels) {
    if (ch.size() != frames) throw Error(ErrorCode::kLengthMismatch, "channel lengths differ");
  }
  const bool is_float = format == SampleFormat::kFloat32 || format == SampleFormat::kFloat64;
  const int width = format == SampleFormat::kPcm16   ? 2
                    : format == SampleFormat::kPcm24 ? 3
                    : format == SampleFormat::kFloat32 ? 4
                                                       : 8;
  const std::uint64_t data_bytes = frames * channels.size() * width;
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::write_le(out, 36 + data_bytes, 4);
  out += "WAVEfmt ";
  detail::write_le(out, 16, 4);
  detail::write_le(out, is_float ? 3 : 1, 2);
  detail::write_le(out, channels.size(), 2);
  detail::write_le(out, static_cast<std::uint32_t>(sample_rate_hz), 4);
  detail::write_le(out, static_cast<std::uint64_t>(sample_rate_hz) * channels.size() * width, 4);
  detail::write_le(out, channels.size() * width, 2);
  detail::write_le(out, width * 8, 2);
  out += "data";
  detail::write_le(out, data_bytes, 4);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : channels) {
      const double v = ch[i];
      switch (format) {
        case SampleFormat::kPcm16: {
          const double s = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
          detail::write_le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)), 2);
          break;
        }
        case SampleFormat::kPcm24: {
          const double s = std::clamp(std::round(v * 8388608.0), -8388608.0, 8388607.0);
          detail::write_le(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(s)) & 0xffffffu, 3);
          break;
        }
        case SampleFormat::kFloat32: {
          const float f = static_cast<float>(v);
          std::uint32_t u;
          std::memcpy(&u, &f, 4);
          detail::write_le(out, u, 4);
          break;
        }
        case SampleFormat::kFloat64: {
          std::uint64_t u;
          std::memcpy(&u, &v, 8);
          detail::write_le(out, u, 8);
          break;
        }
      }
    }
  }
  return out;
}

inline void write_wav(const std::filesystem::path& path,
                      const std::vector<std::vector<double>>& channels, int sample_rate_hz,
                      SampleFormat format = SampleFormat::kFloat32) {
  const std::string bytes = encode_wav(channels, sample_rate_hz, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

inline void write_wav(const std::filesystem::path& path, const Waveform& w,
                      SampleFormat format = SampleFormat::kFloat32) {
  write_wav(path, {std::vector<double>(w.samples().begin(), w.samples().end())},
            w.sample_rate_hz(), format);
}

}  // namespace capisdr
