#pragma once

#include <random>

#include "aeclab/datagen.hpp"
#include "aeclab/losses.hpp"
#include "aeclab/nn/model.hpp"

namespace aeclab {

/// Anchor + P positives (same near end, fresh far end / echo path / noise)
/// + N negatives (fully distinct corpus mixtures).
struct ContrastiveGroup {
  MixtureExample anchor;
  std::vector<MixtureExample> positives;
  std::vector<MixtureExample> negatives;
};

/// Deterministic group construction. Positives remix the anchor's near-end
/// channel (sample-exact) against freshly sampled echo paths; negatives are
/// drawn from other manifest rows whose near end differs from the anchor's.
/// Throws when the corpus cannot supply enough distinct near ends.
ContrastiveGroup build_group(const Manifest& manifest, const std::string& base_dir,
                             const GenConfig& gen, std::size_t anchor_index, int positives,
                             int negatives, std::uint64_t seed);

namespace nn {

template <class S>
struct ContrastiveResult {
  double loss = 0.0;
  std::vector<VecX<S>> pair_scores;  // per positive, then per negative; T' each
};

/// Shared-weight contrastive pass: features for every member through the
/// same model, bilinear scores per downsampled frame, InfoNCE-form loss
/// averaged over frames. With `grads`, backpropagates through the score head
/// and every member's feature pass.
template <class S>
ContrastiveResult<S> contrastive_step(const ContrastiveGroup& group, const AecModel<S>& model,
                                      AecModel<S>* grads = nullptr, int threads = 1) {
  const int P = static_cast<int>(group.positives.size());
  const int N = static_cast<int>(group.negatives.size());
  require(P >= 1 && N >= 1, "contrastive_step: need at least one positive and one negative");

  const FrameConfig& fc = model.cfg.frame;
  auto pack = [&](const MixtureExample& ex) {
    return pack_model_input<S>(stft(ex.mic, fc).grid, stft(ex.far_end, fc).grid);
  };

  // Member order: anchor, positives, negatives.
  const int members = 1 + P + N;
  std::vector<MatX<S>> inputs(members);
  inputs[0] = pack(group.anchor);
  for (int i = 0; i < P; ++i) inputs[1 + i] = pack(group.positives[i]);
  for (int i = 0; i < N; ++i) inputs[1 + P + i] = pack(group.negatives[i]);

  std::vector<MatX<S>> features(members);
  std::vector<FeatureTape<S>> tapes(members);
  parallel_for(members, threads, [&](std::size_t i) {
    features[i] = model_features(model, inputs[i], grads ? &tapes[i] : nullptr);
  });

  ContrastiveResult<S> out;
  std::vector<ScoreTape<S>> score_tapes(P + N);
  out.pair_scores.resize(P + N);
  for (int i = 0; i < P + N; ++i) {
    out.pair_scores[i] =
        score_head(model, features[0], features[1 + i], grads ? &score_tapes[i] : nullptr);
  }

  const Eigen::Index Td = out.pair_scores[0].size();
  std::vector<VecX<S>> d_scores(P + N);
  for (auto& d : d_scores) d = VecX<S>::Zero(Td);

  // Per-frame InfoNCE over the P positives vs N negatives, then average.
  double loss_acc = 0.0;
  std::vector<S> pos(P), neg(N), d_pos(P), d_neg(N);
  for (Eigen::Index t = 0; t < Td; ++t) {
    for (int i = 0; i < P; ++i) pos[i] = out.pair_scores[i](t);
    for (int i = 0; i < N; ++i) neg[i] = out.pair_scores[P + i](t);
    loss_acc += static_cast<double>(contrastive_loss<S>(pos, neg));
    if (grads) {
      contrastive_loss_backward<S>(pos, neg, d_pos, d_neg, S(1) / static_cast<S>(Td));
      for (int i = 0; i < P; ++i) d_scores[i](t) = d_pos[i];
      for (int i = 0; i < N; ++i) d_scores[P + i](t) = d_neg[i];
    }
  }
  out.loss = loss_acc / static_cast<double>(Td);

  if (grads) {
    MatX<S> d_anchor = MatX<S>::Zero(features[0].rows(), features[0].cols());
    std::vector<MatX<S>> d_member(P + N);
    for (int i = 0; i < P + N; ++i) {
      MatX<S> da, dm;
      score_head_backward(model, score_tapes[i], d_scores[i], *grads, da, dm);
      d_anchor += da;
      d_member[i] = std::move(dm);
    }
    // Fixed member order keeps the reduction deterministic; feature passes
    // accumulate into per-member grads in parallel, then fold in order.
    std::vector<AecModel<S>> member_grads(members, AecModel<S>::zeros_like(*grads));
    parallel_for(members, threads, [&](std::size_t i) {
      const MatX<S>& upstream = i == 0 ? d_anchor : d_member[i - 1];
      model_features_backward(model, tapes[i], upstream, member_grads[i]);
    });
    for (auto& mg : member_grads) add_params(*grads, mg);
  }
  return out;
}

}  // namespace nn
}  // namespace aeclab
