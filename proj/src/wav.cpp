#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "snorelda/audio_io.hpp"
#include "snorelda/error.hpp"

namespace snore {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorKind::Decode, "invalid WAV: " + what);
}

float decode_sample(const std::uint8_t* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float f;
      std::uint32_t u = read_u32(p);
      std::memcpy(&f, &u, sizeof f);
      return f;
    }
    std::uint64_t u = static_cast<std::uint64_t>(read_u32(p)) |
                      (static_cast<std::uint64_t>(read_u32(p + 4)) << 32);
    double d;
    std::memcpy(&d, &u, sizeof d);
    return static_cast<float>(d);
  }
  switch (bits) {
    case 8:
      return (static_cast<float>(p[0]) - 128.0f) / 128.0f;
    case 16:
      return static_cast<float>(static_cast<std::int16_t>(read_u16(p))) / 32768.0f;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(
          (static_cast<std::uint32_t>(p[0]) << 8) |
          (static_cast<std::uint32_t>(p[1]) << 16) |
          (static_cast<std::uint32_t>(p[2]) << 24));
      return static_cast<float>(static_cast<double>(v >> 8) / 8388608.0);
    }
    default:  // 32
      return static_cast<float>(
          static_cast<double>(static_cast<std::int32_t>(read_u32(p))) / 2147483648.0);
  }
}

}  // namespace

std::int16_t pcm16_code(float sample) {
  const double scaled = std::lround(static_cast<double>(sample) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

float quantize_pcm16(float sample) {
  return static_cast<float>(pcm16_code(sample)) / 32768.0f;
}

DecodedWav decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) fail("shorter than RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail("missing RIFF/WAVE signature");
  }

  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    std::uint32_t size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t available = bytes.size() - body;

    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available) fail("truncated fmt chunk");
      const std::uint8_t* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      block_align = read_u16(f + 12);
      bits = read_u16(f + 14);
      if (format == kFormatExtensible) {
        if (size < 40) fail("truncated WAVE_FORMAT_EXTENSIBLE header");
        format = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) fail("data chunk precedes fmt chunk");
      if (size > available) fail("truncated data chunk");
      if (channels == 0) fail("zero channels");
      if (rate == 0) fail("zero sample rate");
      bool pcm_ok = format == kFormatPcm &&
                    (bits == 8 || bits == 16 || bits == 24 || bits == 32);
      bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
      if (!pcm_ok && !float_ok) {
        fail("unsupported encoding (format " + std::to_string(format) + ", " +
             std::to_string(bits) + " bits)");
      }
      std::size_t sample_bytes = bits / 8;
      if (block_align != sample_bytes * channels) fail("inconsistent block alignment");
      if (size % block_align != 0) fail("data size is not a whole number of frames");

      DecodedWav out;
      out.sample_rate_hz = static_cast<int>(rate);
      out.channels = channels;
      std::size_t count = size / sample_bytes;
      out.interleaved.resize(count);
      const std::uint8_t* d = bytes.data() + body;
      for (std::size_t i = 0; i < count; ++i) {
        out.interleaved[i] = decode_sample(d + i * sample_bytes, format, bits);
      }
      return out;
    }
    std::size_t advance = 8 + static_cast<std::size_t>(size) + (size & 1u);
    if (advance > bytes.size() - pos) fail("truncated chunk");
    pos += advance;
  }
  fail(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

std::vector<std::uint8_t> encode_wav_pcm16(std::span<const float> samples,
                                           int sample_rate_hz,
                                           const std::string& comment) {
  std::vector<std::uint8_t> info;
  if (!comment.empty()) {
    std::string text = comment;
    text.push_back('\0');
    if (text.size() % 2 != 0) text.push_back('\0');
    put_tag(info, "INFO");
    put_tag(info, "ICMT");
    put_u32(info, static_cast<std::uint32_t>(text.size()));
    info.insert(info.end(), text.begin(), text.end());
  }

  std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::uint32_t riff_size = 4 + (8 + 16) + (8 + data_bytes);
  if (!info.empty()) riff_size += 8 + static_cast<std::uint32_t>(info.size());

  std::vector<std::uint8_t> out;
  out.reserve(riff_size + 8);
  put_tag(out, "RIFF");
  put_u32(out, riff_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  if (!info.empty()) {
    put_tag(out, "LIST");
    put_u32(out, static_cast<std::uint32_t>(info.size()));
    out.insert(out.end(), info.begin(), info.end());
  }
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (float s : samples) {
    put_u16(out, static_cast<std::uint16_t>(pcm16_code(s)));
  }
  return out;
}

void write_wav_pcm16(const std::filesystem::path& path,
                     std::span<const float> samples, int sample_rate_hz,
                     const std::string& comment) {
  auto bytes = encode_wav_pcm16(samples, sample_rate_hz, comment);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace snore
