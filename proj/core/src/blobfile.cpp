#include "aeclab/blobfile.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "aeclab/common.hpp"

namespace aeclab {

namespace {

constexpr char kMagic[4] = {'A', 'E', 'C', 'L'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

uint32_t crc_of(const std::vector<float>& data) {
  return static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data.data()), data.size() * sizeof(float)));
}

}  // namespace

void BlobFile::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("BlobFile: cannot open for write: " + path);
  os.write(kMagic, 4);
  put<uint32_t>(os, kVersion);
  const std::string meta = metadata.dump();
  put<uint32_t>(os, static_cast<uint32_t>(meta.size()));
  os.write(meta.data(), meta.size());
  put<uint32_t>(os, static_cast<uint32_t>(blobs.size()));
  for (const auto& b : blobs) {
    put<uint32_t>(os, static_cast<uint32_t>(b.name.size()));
    os.write(b.name.data(), b.name.size());
    put<uint32_t>(os, static_cast<uint32_t>(b.shape.size()));
    for (uint32_t d : b.shape) put<uint32_t>(os, d);
    put<uint32_t>(os, crc_of(b.data));
    put<uint64_t>(os, b.data.size() * sizeof(float));
    os.write(reinterpret_cast<const char*>(b.data.data()), b.data.size() * sizeof(float));
  }
  if (!os) throw IoError("BlobFile: write failed: " + path);
}

BlobFile BlobFile::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("BlobFile: cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("BlobFile: bad magic: " + path);
  }
  const auto version = get<uint32_t>(is);
  if (version != kVersion) {
    throw IoError("BlobFile: unsupported version " + std::to_string(version) + ": " + path);
  }
  BlobFile out;
  const auto meta_len = get<uint32_t>(is);
  std::string meta(meta_len, '\0');
  is.read(meta.data(), meta_len);
  try {
    out.metadata = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("BlobFile: bad metadata: " + std::string(e.what()));
  }
  const auto count = get<uint32_t>(is);
  out.blobs.resize(count);
  for (auto& b : out.blobs) {
    const auto name_len = get<uint32_t>(is);
    b.name.resize(name_len);
    is.read(b.name.data(), name_len);
    const auto rank = get<uint32_t>(is);
    b.shape.resize(rank);
    for (auto& d : b.shape) d = get<uint32_t>(is);
    const auto crc = get<uint32_t>(is);
    const auto bytes = get<uint64_t>(is);
    b.data.resize(bytes / sizeof(float));
    is.read(reinterpret_cast<char*>(b.data.data()), bytes);
    if (!is) throw IoError("BlobFile: truncated blob '" + b.name + "': " + path);
    if (crc_of(b.data) != crc) {
      throw IoError("BlobFile: checksum mismatch in blob '" + b.name + "': " + path);
    }
  }
  return out;
}

const Blob& BlobFile::find(const std::string& name) const {
  for (const auto& b : blobs) {
    if (b.name == name) return b;
  }
  throw IoError("BlobFile: missing blob '" + name + "'");
}

}  // namespace aeclab
