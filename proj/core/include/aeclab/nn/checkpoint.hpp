#pragma once

#include "aeclab/blobfile.hpp"
#include "aeclab/nn/model.hpp"

namespace aeclab::nn {

inline nlohmann::json model_config_to_json(const ModelConfig& cfg) {
  return {
      {"frame_len", cfg.frame.frame_len},
      {"hop", cfg.frame.hop},
      {"fft_size", cfg.frame.fft_size},
      {"window", to_string(cfg.frame.window)},
      {"conv_filters", cfg.conv_filters},
      {"conv_kernel", cfg.conv_kernel},
      {"gru_units", cfg.gru_units},
      {"score_channels", cfg.score_channels},
      {"score_stride", cfg.score_stride},
  };
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.frame.frame_len = j.at("frame_len").get<int>();
  cfg.frame.hop = j.at("hop").get<int>();
  cfg.frame.fft_size = j.at("fft_size").get<int>();
  cfg.frame.window = window_from_string(j.at("window").get<std::string>());
  cfg.conv_filters = j.at("conv_filters").get<int>();
  cfg.conv_kernel = j.at("conv_kernel").get<int>();
  cfg.gru_units = j.at("gru_units").get<int>();
  cfg.score_channels = j.at("score_channels").get<int>();
  cfg.score_stride = j.at("score_stride").get<int>();
  return cfg;
}

template <class S>
void save_model(const AecModel<S>& model, const std::string& path) {
  BlobFile file;
  file.metadata = {
      {"kind", "aec_model"},
      {"config", model_config_to_json(model.cfg)},
      {"packing", "mic_R,mic_I,far_R,far_I"},
  };
  auto& m = const_cast<AecModel<S>&>(model);
  m.for_each_param([&](const std::string& name, MatX<S>& p) {
    Blob b;
    b.name = name;
    b.shape = {static_cast<uint32_t>(p.rows()), static_cast<uint32_t>(p.cols())};
    b.data.resize(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) b.data[i] = static_cast<float>(p(i));
    file.blobs.push_back(std::move(b));
  });
  file.save(path);
}

template <class S>
AecModel<S> load_model(const std::string& path) {
  const BlobFile file = BlobFile::load(path);
  if (file.metadata.value("kind", "") != "aec_model") {
    throw IoError("load_model: not a model checkpoint: " + path);
  }
  const ModelConfig cfg = model_config_from_json(file.metadata.at("config"));
  AecModel<S> model = AecModel<S>::init(cfg, 0);
  model.for_each_param([&](const std::string& name, MatX<S>& p) {
    const Blob& b = file.find(name);
    if (b.shape.size() != 2 || b.shape[0] != static_cast<uint32_t>(p.rows()) ||
        b.shape[1] != static_cast<uint32_t>(p.cols())) {
      throw IoError("load_model: shape mismatch for '" + name + "'");
    }
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = static_cast<S>(b.data[i]);
  });
  return model;
}

}  // namespace aeclab::nn
