#pragma once

#include "aeclab/mask.hpp"
#include "aeclab/nn/layers.hpp"

namespace aeclab::nn {

/// Layer geometry. The packed real input is [mic_R | mic_I | far_R | far_I]
/// over F bins (4F reals = 2F complex features); masks are 2F reals
/// (F complex bins).
struct ModelConfig {
  FrameConfig frame;
  int conv_filters = 128;
  int conv_kernel = 3;
  int gru_units = 512;
  int score_channels = 128;
  int score_stride = 4;

  int bins() const { return frame.bins(); }
  int packed_width() const { return 4 * bins(); }
  int mask_width() const { return 2 * bins(); }

  bool operator==(const ModelConfig&) const = default;
};

/// All trainable parameters. Gradient accumulators and Adam moments reuse
/// this struct via zeros_like(), so for_each_param fixes one deterministic
/// traversal order for updates, checkpoints, and reductions.
template <class S>
struct AecModel {
  ModelConfig cfg;

  // FEN: one CGRU block (conv + GRU + projection back to the packed width),
  // applied twice with shared weights; pass 1 is residual.
  Conv1dParams<S> fen_conv;
  GruParams<S> fen_gru;
  DenseParams<S> fen_proj;

  // ASN: two GRU layers then projection to the complex mask.
  GruParams<S> asn_gru1;
  GruParams<S> asn_gru2;
  DenseParams<S> asn_proj;

  // MON: CGRU-style refinement over [coarse mask | mic]; residual output.
  Conv1dParams<S> mon_conv;
  GruParams<S> mon_gru;
  DenseParams<S> mon_proj;

  // Contrastive score head: strided downsampling conv + bilinear form.
  Conv1dParams<S> score_conv;
  MatX<S> score_bilinear;

  template <class F>
  void for_each_param(F&& fn) {
    fn("fen_conv.w", fen_conv.w);
    fn("fen_conv.b", fen_conv.b);
    fn("fen_gru.w", fen_gru.w);
    fn("fen_gru.r", fen_gru.r);
    fn("fen_gru.b", fen_gru.b);
    fn("fen_proj.w", fen_proj.w);
    fn("fen_proj.b", fen_proj.b);
    fn("asn_gru1.w", asn_gru1.w);
    fn("asn_gru1.r", asn_gru1.r);
    fn("asn_gru1.b", asn_gru1.b);
    fn("asn_gru2.w", asn_gru2.w);
    fn("asn_gru2.r", asn_gru2.r);
    fn("asn_gru2.b", asn_gru2.b);
    fn("asn_proj.w", asn_proj.w);
    fn("asn_proj.b", asn_proj.b);
    fn("mon_conv.w", mon_conv.w);
    fn("mon_conv.b", mon_conv.b);
    fn("mon_gru.w", mon_gru.w);
    fn("mon_gru.r", mon_gru.r);
    fn("mon_gru.b", mon_gru.b);
    fn("mon_proj.w", mon_proj.w);
    fn("mon_proj.b", mon_proj.b);
    fn("score_conv.w", score_conv.w);
    fn("score_conv.b", score_conv.b);
    fn("score_bilinear", score_bilinear);
  }

  /// Parameter tensors in declaration order; two models of the same shape
  /// zip index-for-index.
  std::vector<MatX<S>*> param_list() {
    std::vector<MatX<S>*> out;
    for_each_param([&](const std::string&, MatX<S>& p) { out.push_back(&p); });
    return out;
  }

  /// Fresh model: fan-in uniform weights, orthogonal GRU recurrences, zero
  /// biases. The FEN and MON output projections start at zero so both
  /// residual paths are exact identities at initialization.
  static AecModel init(const ModelConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    AecModel m;
    m.cfg = cfg;
    const int W = cfg.packed_width();
    const int MW = cfg.mask_width();
    m.fen_conv = conv1d_init<S>(W, cfg.conv_filters, cfg.conv_kernel, rng);
    m.fen_gru = gru_init<S>(cfg.conv_filters, cfg.gru_units, rng);
    m.fen_proj = dense_init_zero<S>(cfg.gru_units, W);
    m.asn_gru1 = gru_init<S>(W, cfg.gru_units, rng);
    m.asn_gru2 = gru_init<S>(cfg.gru_units, cfg.gru_units, rng);
    m.asn_proj = dense_init<S>(cfg.gru_units, MW, rng);
    m.mon_conv = conv1d_init<S>(2 * MW, cfg.conv_filters, cfg.conv_kernel, rng);
    m.mon_gru = gru_init<S>(cfg.conv_filters, cfg.gru_units, rng);
    m.mon_proj = dense_init_zero<S>(cfg.gru_units, MW);
    m.score_conv = conv1d_init<S>(W, cfg.score_channels, cfg.score_stride, rng);
    m.score_bilinear =
        uniform_fan_in<S>(cfg.score_channels, cfg.score_channels, cfg.score_channels, rng);
    return m;
  }

  static AecModel zeros_like(const AecModel& other) {
    AecModel m = other;
    m.for_each_param([](const std::string&, MatX<S>& p) { p.setZero(); });
    return m;
  }

  /// Copy with a different scalar type (full-precision tests cast down/up).
  template <class T>
  AecModel<T> cast() const {
    auto cv = [](const MatX<S>& m) { return m.template cast<T>().eval(); };
    AecModel<T> out;
    out.cfg = cfg;
    out.fen_conv = {cv(fen_conv.w), cv(fen_conv.b), fen_conv.kernel};
    out.fen_gru = {cv(fen_gru.w), cv(fen_gru.r), cv(fen_gru.b)};
    out.fen_proj = {cv(fen_proj.w), cv(fen_proj.b)};
    out.asn_gru1 = {cv(asn_gru1.w), cv(asn_gru1.r), cv(asn_gru1.b)};
    out.asn_gru2 = {cv(asn_gru2.w), cv(asn_gru2.r), cv(asn_gru2.b)};
    out.asn_proj = {cv(asn_proj.w), cv(asn_proj.b)};
    out.mon_conv = {cv(mon_conv.w), cv(mon_conv.b), mon_conv.kernel};
    out.mon_gru = {cv(mon_gru.w), cv(mon_gru.r), cv(mon_gru.b)};
    out.mon_proj = {cv(mon_proj.w), cv(mon_proj.b)};
    out.score_conv = {cv(score_conv.w), cv(score_conv.b), score_conv.kernel};
    out.score_bilinear = cv(score_bilinear);
    return out;
  }
};

/// dst += src over all parameter tensors (fixed declaration order).
template <class S>
void add_params(AecModel<S>& dst, AecModel<S>& src) {
  auto d = dst.param_list();
  auto s = src.param_list();
  for (std::size_t i = 0; i < d.size(); ++i) *d[i] += *s[i];
}

template <class S>
struct CgruTape {
  Conv1dTape<S> conv;
  GruTape<S> gru;
  DenseTape<S> proj;
};

template <class S>
struct ModelTape {
  MatX<S> input;
  CgruTape<S> fen1, fen2;
  GruTape<S> asn1, asn2;
  DenseTape<S> asn_proj;
  CgruTape<S> mon;
};

template <class S>
struct ModelOutput {
  MatX<S> refined_mask;  // T x 2F
  MatX<S> coarse_mask;   // T x 2F (ASN output, pre-refinement)
  MatX<S> features;      // T x 4F; FEN output h_x, the contrastive tap point
  MatX<S> fen_residual;  // T x 4F; FEN pass-1 output (input + projection)
};

namespace detail {

template <class S>
MatX<S> cgru_forward(const Conv1dParams<S>& conv, const GruParams<S>& gru,
                     const DenseParams<S>& proj, const MatX<S>& x, CgruTape<S>* tape) {
  const MatX<S> c = conv1d_forward(conv, x, tape ? &tape->conv : nullptr);
  const VecX<S> h0 = VecX<S>::Zero(gru.hidden());
  const MatX<S> g = gru_forward(gru, c, h0, tape ? &tape->gru : nullptr);
  return dense_forward(proj, g, tape ? &tape->proj : nullptr);
}

template <class S>
MatX<S> cgru_backward(const Conv1dParams<S>& conv, const GruParams<S>& gru,
                      const DenseParams<S>& proj, const CgruTape<S>& tape, const MatX<S>& dy,
                      Conv1dParams<S>& g_conv, GruParams<S>& g_gru, DenseParams<S>& g_proj) {
  const MatX<S> dg = dense_backward(proj, tape.proj, dy, g_proj);
  const MatX<S> dc = gru_backward(gru, tape.gru, dg, g_gru);
  return conv1d_backward(conv, tape.conv, dc, g_conv);
}

}  // namespace detail

/// Offline forward over a packed input sequence (T x 4F).
template <class S>
ModelOutput<S> model_forward(const AecModel<S>& model, const MatX<S>& input,
                             ModelTape<S>* tape = nullptr) {
  const auto& cfg = model.cfg;
  require(input.cols() == cfg.packed_width(), "model_forward: packed width mismatch");
  if (tape) tape->input = input;

  // FEN pass 1 (residual) and pass 2, shared weights.
  const MatX<S> p1 = detail::cgru_forward(model.fen_conv, model.fen_gru, model.fen_proj, input,
                                          tape ? &tape->fen1 : nullptr);
  const MatX<S> e1 = input + p1;
  const MatX<S> features = detail::cgru_forward(model.fen_conv, model.fen_gru, model.fen_proj,
                                                e1, tape ? &tape->fen2 : nullptr);

  // ASN.
  const VecX<S> h0 = VecX<S>::Zero(cfg.gru_units);
  const MatX<S> a1 = gru_forward(model.asn_gru1, features, h0, tape ? &tape->asn1 : nullptr);
  const MatX<S> a2 = gru_forward(model.asn_gru2, a1, h0, tape ? &tape->asn2 : nullptr);
  const MatX<S> coarse = dense_forward(model.asn_proj, a2, tape ? &tape->asn_proj : nullptr);

  // MON: refinement over [coarse | mic], added back to the coarse mask.
  const Eigen::Index T = input.rows();
  const int MW = cfg.mask_width();
  MatX<S> mon_in(T, 2 * MW);
  mon_in.leftCols(MW) = coarse;
  mon_in.rightCols(MW) = input.leftCols(MW);
  const MatX<S> corr = detail::cgru_forward(model.mon_conv, model.mon_gru, model.mon_proj,
                                            mon_in, tape ? &tape->mon : nullptr);

  ModelOutput<S> out;
  out.coarse_mask = coarse;
  out.refined_mask = coarse + corr;
  out.features = features;
  out.fen_residual = e1;
  return out;
}

/// Backward through the whole stack. d_refined and (optionally) d_features
/// are the upstream gradients; parameter gradients accumulate into `grads`.
/// Returns the gradient with respect to the packed input.
template <class S>
MatX<S> model_backward(const AecModel<S>& model, const ModelTape<S>& tape,
                       const MatX<S>& d_refined, std::type_identity_t<const MatX<S>*> d_features,
                       AecModel<S>& grads) {
  const auto& cfg = model.cfg;
  const int MW = cfg.mask_width();

  // MON (refined = coarse + corr).
  const MatX<S> d_mon_in =
      detail::cgru_backward(model.mon_conv, model.mon_gru, model.mon_proj, tape.mon, d_refined,
                            grads.mon_conv, grads.mon_gru, grads.mon_proj);
  MatX<S> d_coarse = d_refined + d_mon_in.leftCols(MW);

  // ASN.
  const MatX<S> d_a2 = dense_backward(model.asn_proj, tape.asn_proj, d_coarse, grads.asn_proj);
  const MatX<S> d_a1 = gru_backward(model.asn_gru2, tape.asn2, d_a2, grads.asn_gru2);
  MatX<S> d_feat = gru_backward(model.asn_gru1, tape.asn1, d_a1, grads.asn_gru1);
  if (d_features != nullptr) d_feat += *d_features;

  // FEN pass 2 then pass 1 (shared parameters accumulate twice).
  const MatX<S> d_e1 =
      detail::cgru_backward(model.fen_conv, model.fen_gru, model.fen_proj, tape.fen2, d_feat,
                            grads.fen_conv, grads.fen_gru, grads.fen_proj);
  MatX<S> d_input =
      d_e1 + detail::cgru_backward(model.fen_conv, model.fen_gru, model.fen_proj, tape.fen1,
                                   d_e1, grads.fen_conv, grads.fen_gru, grads.fen_proj);
  d_input.leftCols(MW) += d_mon_in.rightCols(MW);  // mic feeds MON directly
  return d_input;
}

// ---------------------------------------------------------------------------
// Feature-only path: the contrastive objective depends on the FEN output
// h_x and the score head alone, so group members skip ASN/MON.

template <class S>
struct FeatureTape {
  MatX<S> input;
  CgruTape<S> fen1, fen2;
};

template <class S>
MatX<S> model_features(const AecModel<S>& model, const MatX<S>& input,
                       FeatureTape<S>* tape = nullptr) {
  require(input.cols() == model.cfg.packed_width(), "model_features: packed width mismatch");
  if (tape) tape->input = input;
  const MatX<S> p1 = detail::cgru_forward(model.fen_conv, model.fen_gru, model.fen_proj, input,
                                          tape ? &tape->fen1 : nullptr);
  const MatX<S> e1 = input + p1;
  return detail::cgru_forward(model.fen_conv, model.fen_gru, model.fen_proj, e1,
                              tape ? &tape->fen2 : nullptr);
}

template <class S>
void model_features_backward(const AecModel<S>& model, const FeatureTape<S>& tape,
                             const MatX<S>& d_features, AecModel<S>& grads) {
  const MatX<S> d_e1 =
      detail::cgru_backward(model.fen_conv, model.fen_gru, model.fen_proj, tape.fen2, d_features,
                            grads.fen_conv, grads.fen_gru, grads.fen_proj);
  detail::cgru_backward(model.fen_conv, model.fen_gru, model.fen_proj, tape.fen1, d_e1,
                        grads.fen_conv, grads.fen_gru, grads.fen_proj);
}

// ---------------------------------------------------------------------------
// Contrastive score head

template <class S>
struct ScoreTape {
  DownConvTape<S> anchor, other;
  MatX<S> anchor_down, other_down;  // T' x C
};

/// Downsample both feature sequences with the strided conv, then one
/// bilinear score per downsampled frame: s_m = a_m^T B o_m.
template <class S>
VecX<S> score_head(const AecModel<S>& model, const MatX<S>& anchor_features,
                   const MatX<S>& other_features, ScoreTape<S>* tape = nullptr) {
  require(anchor_features.rows() == other_features.rows() &&
              anchor_features.cols() == other_features.cols(),
          "score_head: feature shape mismatch");
  ScoreTape<S> local;
  ScoreTape<S>* tp = tape ? tape : &local;
  tp->anchor_down = downconv_forward(model.score_conv, anchor_features, &tp->anchor);
  tp->other_down = downconv_forward(model.score_conv, other_features, &tp->other);
  const MatX<S> ab = tp->anchor_down * model.score_bilinear;  // T' x C
  return (ab.cwiseProduct(tp->other_down)).rowwise().sum();
}

template <class S>
void score_head_backward(const AecModel<S>& model, const ScoreTape<S>& tape,
                         const VecX<S>& d_scores, AecModel<S>& grads,
                         MatX<S>& d_anchor_features, MatX<S>& d_other_features) {
  const MatX<S> ds_o = d_scores.asDiagonal() * tape.other_down;   // T' x C
  const MatX<S> ds_a = d_scores.asDiagonal() * tape.anchor_down;  // T' x C
  grads.score_bilinear.noalias() += tape.anchor_down.transpose() * ds_o;
  const MatX<S> d_anchor_down = ds_o * model.score_bilinear.transpose();
  const MatX<S> d_other_down = ds_a * model.score_bilinear;
  d_anchor_features =
      downconv_backward(model.score_conv, tape.anchor, d_anchor_down, grads.score_conv);
  d_other_features =
      downconv_backward(model.score_conv, tape.other, d_other_down, grads.score_conv);
}

// ---------------------------------------------------------------------------
// Streaming inference

/// Recurrent state for frame-by-frame inference. reset() (or construction)
/// yields the all-zero state; after N frames the state is a pure function of
/// those frames, matching the offline forward exactly.
template <class S>
struct StreamingState {
  Conv1dState<S> fen1_conv, fen2_conv, mon_conv;
  VecX<S> fen1_gru, fen2_gru, asn1_gru, asn2_gru, mon_gru;
  bool initialized = false;

  static StreamingState make(const AecModel<S>& model) {
    StreamingState s;
    s.fen1_conv = conv1d_state(model.fen_conv);
    s.fen2_conv = conv1d_state(model.fen_conv);
    s.mon_conv = conv1d_state(model.mon_conv);
    s.fen1_gru = VecX<S>::Zero(model.cfg.gru_units);
    s.fen2_gru = VecX<S>::Zero(model.cfg.gru_units);
    s.asn1_gru = VecX<S>::Zero(model.cfg.gru_units);
    s.asn2_gru = VecX<S>::Zero(model.cfg.gru_units);
    s.mon_gru = VecX<S>::Zero(model.cfg.gru_units);
    s.initialized = true;
    return s;
  }

  void reset() {
    fen1_conv.history.setZero();
    fen2_conv.history.setZero();
    mon_conv.history.setZero();
    fen1_gru.setZero();
    fen2_gru.setZero();
    asn1_gru.setZero();
    asn2_gru.setZero();
    mon_gru.setZero();
  }
};

/// One spectral frame through the model: packed input frame (4F) to refined
/// mask frame (2F). Mirrors model_forward step for step.
template <class S>
VecX<S> model_step(const AecModel<S>& model, StreamingState<S>& state, const VecX<S>& input) {
  require(state.initialized, "model_step: uninitialized streaming state");
  require(input.size() == model.cfg.packed_width(), "model_step: packed width mismatch");
  const int MW = model.cfg.mask_width();

  auto cgru_step = [&](Conv1dState<S>& cs, VecX<S>& gs, const VecX<S>& x) {
    const VecX<S> c = conv1d_step(model.fen_conv, x, cs);
    gru_step(model.fen_gru, c, gs);
    return VecX<S>(model.fen_proj.w * gs + model.fen_proj.b.row(0).transpose());
  };

  const VecX<S> e1 = input + cgru_step(state.fen1_conv, state.fen1_gru, input);
  const VecX<S> features = cgru_step(state.fen2_conv, state.fen2_gru, e1);

  gru_step(model.asn_gru1, features, state.asn1_gru);
  gru_step(model.asn_gru2, state.asn1_gru, state.asn2_gru);
  const VecX<S> coarse =
      model.asn_proj.w * state.asn2_gru + model.asn_proj.b.row(0).transpose();

  VecX<S> mon_in(2 * MW);
  mon_in.head(MW) = coarse;
  mon_in.tail(MW) = input.head(MW);
  const VecX<S> mc = conv1d_step(model.mon_conv, mon_in, state.mon_conv);
  gru_step(model.mon_gru, mc, state.mon_gru);
  return coarse + model.mon_proj.w * state.mon_gru + model.mon_proj.b.row(0).transpose();
}

// ---------------------------------------------------------------------------
// Spectrogram-level wrapper used by inference and evaluation.

template <class S>
struct InferenceResult {
  ComplexMask refined_mask;
  ComplexSpectrogram est_near;
  MatX<S> features;
};

/// Packs mic/far spectra, runs the model, applies the refined mask to the
/// microphone spectrogram.
template <class S>
InferenceResult<S> model_infer(const AecModel<S>& model, const ComplexSpectrogram& mic,
                               const ComplexSpectrogram& far) {
  require(mic.grid.rows() == far.grid.rows() && mic.grid.cols() == far.grid.cols(),
          "model_infer: mic/far shape mismatch");
  require(mic.bins() == model.cfg.bins(), "model_infer: bin count mismatch");
  const MatX<S> input = pack_model_input<S>(mic.grid, far.grid);
  const ModelOutput<S> out = model_forward(model, input);
  InferenceResult<S> res;
  res.refined_mask.grid = unpack_complex(out.refined_mask);
  res.refined_mask.is_true_mask = false;
  res.est_near = apply_mask(res.refined_mask, mic);
  res.features = out.features;
  return res;
}

}  // namespace aeclab::nn
