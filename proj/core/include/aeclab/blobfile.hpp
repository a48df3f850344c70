#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace aeclab {

/// Named float32 tensor inside a checkpoint container.
struct Blob {
  std::string name;
  std::vector<uint32_t> shape;
  std::vector<float> data;
};

/// Checkpoint container: magic "AECL", format version, one JSON metadata
/// block, then named little-endian float32 blobs with per-blob CRC32.
struct BlobFile {
  static constexpr uint32_t kVersion = 1;

  nlohmann::json metadata;
  std::vector<Blob> blobs;

  void save(const std::string& path) const;
  static BlobFile load(const std::string& path);

  const Blob& find(const std::string& name) const;
};

}  // namespace aeclab
