#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "aec/audio.hpp"

namespace aec {
namespace {

constexpr std::uint16_t kFmtPcm = 1;
constexpr std::uint16_t kFmtFloat = 3;
constexpr std::uint16_t kFmtExtensible = 0xFFFE;

template <class T>
T read_le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <class T>
void append_le(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("read_wav: cannot open " + path);
  }
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(f)),
                                std::istreambuf_iterator<char>());
  if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("read_wav: malformed RIFF header in " + path);
  }

  std::uint16_t fmt_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    char id[5] = {0};
    std::memcpy(id, raw.data() + pos, 4);
    const std::uint32_t chunk_len = read_le<std::uint32_t>(raw.data() + pos + 4);
    pos += 8;
    if (pos + chunk_len > raw.size()) {
      throw std::runtime_error("read_wav: truncated chunk '" + std::string(id) + "' in " + path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) {
        throw std::runtime_error("read_wav: malformed fmt chunk in " + path);
      }
      fmt_tag = read_le<std::uint16_t>(raw.data() + pos);
      channels = read_le<std::uint16_t>(raw.data() + pos + 2);
      rate = read_le<std::uint32_t>(raw.data() + pos + 4);
      bits = read_le<std::uint16_t>(raw.data() + pos + 14);
      if (fmt_tag == kFmtExtensible) {
        // Sub-format GUID starts with the effective format tag.
        if (chunk_len < 40) {
          throw std::runtime_error("read_wav: malformed extensible fmt chunk in " + path);
        }
        fmt_tag = read_le<std::uint16_t>(raw.data() + pos + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = raw.data() + pos;
      data_len = chunk_len;
    }
    pos += chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || channels == 0 || rate == 0) {
    throw std::runtime_error("read_wav: missing or malformed fmt chunk in " + path);
  }
  const bool pcm16 = fmt_tag == kFmtPcm && bits == 16;
  const bool f32 = fmt_tag == kFmtFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw std::runtime_error("read_wav: unsupported codec (format " + std::to_string(fmt_tag) +
                             ", " + std::to_string(bits) + " bit) in " + path);
  }
  if (data == nullptr || data_len == 0) {
    throw std::runtime_error("read_wav: zero-length audio in " + path);
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t num_frames = data_len / frame_bytes;
  if (num_frames == 0) {
    throw std::runtime_error("read_wav: zero-length audio in " + path);
  }

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  clip.samples.resize(num_frames);
  for (std::size_t i = 0; i < num_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t ch = 0; ch < channels; ++ch) {
      const std::uint8_t* p = data + i * frame_bytes + ch * bytes_per_sample;
      if (pcm16) {
        acc += read_le<std::int16_t>(p) / 32768.0;
      } else {
        acc += read_le<float>(p);
      }
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

void write_wav(const AudioClip& clip, const std::string& path, WavFormat format) {
  for (double s : clip.samples) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("write_wav: non-finite sample");
    }
  }
  const bool pcm16 = format == WavFormat::pcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint32_t rate = static_cast<std::uint32_t>(clip.sample_rate_hz);
  const std::uint32_t data_len = static_cast<std::uint32_t>(clip.samples.size() * bits / 8);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  append_le<std::uint32_t>(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  append_le<std::uint32_t>(out, 16);
  append_le<std::uint16_t>(out, pcm16 ? kFmtPcm : kFmtFloat);
  append_le<std::uint16_t>(out, 1);
  append_le<std::uint32_t>(out, rate);
  append_le<std::uint32_t>(out, rate * bits / 8);
  append_le<std::uint16_t>(out, bits / 8);
  append_le<std::uint16_t>(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  append_le<std::uint32_t>(out, data_len);

  for (double s : clip.samples) {
    if (pcm16) {
      const double clamped = std::clamp(s, -1.0, 1.0);
      const auto q = static_cast<std::int32_t>(std::lrint(clamped * 32768.0));
      append_le<std::int16_t>(out, static_cast<std::int16_t>(std::clamp(q, -32768, 32767)));
    } else {
      append_le<float>(out, static_cast<float>(s));
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw std::runtime_error("write_wav: cannot open " + path);
  }
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw std::runtime_error("write_wav: write failed for " + path);
  }
}

}  // namespace aec
