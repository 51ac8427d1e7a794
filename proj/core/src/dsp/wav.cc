#include "cogspeech/dsp/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "cogspeech/common/error.h"

namespace cogspeech::dsp {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t U32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t U16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void PutU16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

double DecodeSample(const unsigned char* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float f;
      std::uint32_t u = U32(p);
      std::memcpy(&f, &u, 4);
      return f;
    }
    double d;
    std::uint64_t u = static_cast<std::uint64_t>(U32(p)) |
                      (static_cast<std::uint64_t>(U32(p + 4)) << 32);
    std::memcpy(&d, &u, 8);
    return d;
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(U16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<std::int32_t>(U32(p)) / 2147483648.0;
  }
  return 0.0;
}

}  // namespace

Signal ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open WAV file " + path.string());
  const std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) {
    return InputError(path.string() + ": " + why);
  };
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* samples = nullptr;
  std::size_t sample_bytes = 0;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char* chunk = data.data() + pos;
    const std::size_t size = U32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, data.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw fail("truncated fmt chunk");
      format = U16(chunk + 8);
      channels = U16(chunk + 10);
      rate = U32(chunk + 12);
      bits = U16(chunk + 22);
      if (format == kFormatExtensible) {
        if (avail < 26) throw fail("truncated extensible fmt chunk");
        format = U16(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      samples = data.data() + body;
      sample_bytes = avail;
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || rate == 0) throw fail("missing fmt chunk");
  if (samples == nullptr) throw fail("missing data chunk");
  const bool pcm_ok = format == kFormatPcm &&
                      (bits == 8 || bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!pcm_ok && !float_ok) {
    throw fail("unsupported sample format " + std::to_string(format) + "/" +
               std::to_string(bits) + " bit");
  }
  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t n_frames = sample_bytes / frame_bytes;

  Signal x;
  x.sample_rate = rate;
  x.samples.resize(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      acc += DecodeSample(samples + f * frame_bytes + c * bytes_per_sample,
                          format, bits);
    }
    x.samples[f] = acc / channels;
  }
  return x;
}

std::size_t WriteWav(const std::filesystem::path& path, const Signal& x,
                     WavFormat format) {
  const std::uint16_t bits =
      format == WavFormat::kPcm16 ? 16 : (format == WavFormat::kPcm24 ? 24 : 32);
  const std::uint16_t tag = format == WavFormat::kFloat32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(x.sample_rate));
  const std::uint32_t bytes_per_sample = bits / 8;
  const auto data_bytes = static_cast<std::uint32_t>(x.size() * bytes_per_sample);

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(out, 16);
  PutU16(out, tag);
  PutU16(out, 1);
  PutU32(out, rate);
  PutU32(out, rate * bytes_per_sample);
  PutU16(out, static_cast<std::uint16_t>(bytes_per_sample));
  PutU16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(out, data_bytes);

  std::size_t saturated = 0;
  for (double s : x.samples) {
    if (format == WavFormat::kFloat32) {
      const float f = static_cast<float>(s);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      PutU32(out, u);
      continue;
    }
    const double scale = format == WavFormat::kPcm16 ? 32768.0 : 8388608.0;
    const double max_code = scale - 1.0;
    double v = std::round(s * scale);
    if (v > max_code || v < -scale) {
      ++saturated;
      v = std::clamp(v, -scale, max_code);
    }
    const auto code = static_cast<std::int32_t>(v);
    out.push_back(static_cast<unsigned char>(code & 0xFF));
    out.push_back(static_cast<unsigned char>((code >> 8) & 0xFF));
    if (format == WavFormat::kPcm24) {
      out.push_back(static_cast<unsigned char>((code >> 16) & 0xFF));
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write WAV file " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw InputError("write failed for " + path.string());
  return saturated;
}

}  // namespace cogspeech::dsp
