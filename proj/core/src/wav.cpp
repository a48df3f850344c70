#include "aeclab/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "aeclab/common.hpp"

namespace aeclab {

namespace {

constexpr uint16_t kFmtPcm = 1;
constexpr uint16_t kFmtFloat = 3;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));  // little-endian host
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

TimeSignal read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_wav: cannot open " + path);

  char riff[4], wave[4];
  is.read(riff, 4);
  get<uint32_t>(is);
  is.read(wave, 4);
  if (!is || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0) {
    throw IoError("read_wav: not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<char> data;

  while (is) {
    char id[4];
    is.read(id, 4);
    if (!is) break;
    const auto size = get<uint32_t>(is);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = get<uint16_t>(is);
      channels = get<uint16_t>(is);
      rate = get<uint32_t>(is);
      get<uint32_t>(is);  // byte rate
      get<uint16_t>(is);  // block align
      bits = get<uint16_t>(is);
      is.seekg(size > 16 ? size - 16 : 0, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data.resize(size);
      is.read(data.data(), size);
      break;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
    }
  }

  if (!have_fmt || data.empty()) throw IoError("read_wav: missing fmt/data chunk: " + path);
  if (channels != 1) throw IoError("read_wav: only mono supported: " + path);
  if (rate != static_cast<uint32_t>(kSampleRate)) {
    throw IoError("read_wav: only 16 kHz supported (got " + std::to_string(rate) + "): " + path);
  }

  TimeSignal out;
  out.sample_rate = static_cast<int>(rate);
  if (format == kFmtPcm && bits == 16) {
    const std::size_t n = data.size() / 2;
    out.samples.resize(n);
    const auto* src = reinterpret_cast<const int16_t*>(data.data());
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = src[i] / 32768.0;
  } else if (format == kFmtFloat && bits == 32) {
    const std::size_t n = data.size() / 4;
    out.samples.resize(n);
    const auto* src = reinterpret_cast<const float*>(data.data());
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = src[i];
  } else {
    throw IoError("read_wav: unsupported sample format: " + path);
  }
  return out;
}

void write_wav(const std::string& path, const TimeSignal& signal, WavFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_wav: cannot open " + path);

  const bool f32 = format == WavFormat::Float32;
  const uint16_t bytes_per = f32 ? 4 : 2;
  const auto n = static_cast<uint32_t>(signal.size());
  const uint32_t data_bytes = n * bytes_per;

  os.write("RIFF", 4);
  put<uint32_t>(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put<uint32_t>(os, 16);
  put<uint16_t>(os, f32 ? kFmtFloat : kFmtPcm);
  put<uint16_t>(os, 1);
  put<uint32_t>(os, static_cast<uint32_t>(signal.sample_rate));
  put<uint32_t>(os, static_cast<uint32_t>(signal.sample_rate) * bytes_per);
  put<uint16_t>(os, bytes_per);
  put<uint16_t>(os, bytes_per * 8);
  os.write("data", 4);
  put<uint32_t>(os, data_bytes);

  if (f32) {
    for (double v : signal.samples) put<float>(os, static_cast<float>(v));
  } else {
    for (double v : signal.samples) {
      const double clipped = std::clamp(v, -1.0, 32767.0 / 32768.0);
      put<int16_t>(os, static_cast<int16_t>(std::lround(clipped * 32768.0)));
    }
  }
  if (!os) throw IoError("write_wav: write failed: " + path);
}

}  // namespace aeclab
