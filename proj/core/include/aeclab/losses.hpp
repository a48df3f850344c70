#pragma once

#include <cmath>
#include <span>
#include <string>

#include "aeclab/common.hpp"
#include "aeclab/tensor.hpp"

namespace aeclab {

enum class ErrorLossMode { Product, Difference };

/// Per-step loss components. Component values are always >= 0; `total`
/// follows the active stage formula.
struct LossBreakdown {
  double mask_mse = 0.0;
  double sdw_loss = 0.0;
  double esw_loss = 0.0;
  double error_loss = 0.0;
  double contrastive = 0.0;
  double total = 0.0;
  double alpha = 0.0;
  double lambda_err = 0.0;

  std::string log_line() const {
    auto kv = [](const char* k, double v) { return std::string(k) + "=" + std::to_string(v); };
    return kv("mask_mse", mask_mse) + " " + kv("sdw", sdw_loss) + " " + kv("esw", esw_loss) +
           " " + kv("err", error_loss) + " " + kv("con", contrastive) + " " +
           kv("total", total) + " " + kv("alpha", alpha) + " " + kv("lambda_err", lambda_err);
  }
};

struct FinetuneLossConfig {
  double sdw_n = 2.0;
  double sdw_bound = 10.0;
  double esw_n = -1.0;
  double esw_bound = 10.0;
  double lambda_err = 0.1;
  ErrorLossMode error_mode = ErrorLossMode::Product;
};

// Masks and spectra below are packed T x 2F reals ([real | imag], see
// tensor.hpp); weight maps are T x F. All reductions are means over the
// T*F bins so values are scale-free across segment lengths.

namespace detail {
template <class S>
void check_packed_pair(const MatX<S>& a, const MatX<S>& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() % 2 != 0) {
    throw NumericError(std::string(who) + ": shape mismatch");
  }
}
}  // namespace detail

template <class S>
S mask_mse(const MatX<S>& m_true, const MatX<S>& m_est) {
  detail::check_packed_pair(m_true, m_est, "mask_mse");
  const auto bins = static_cast<S>(m_true.rows() * (m_true.cols() / 2));
  return (m_true - m_est).squaredNorm() / bins;
}

/// d(mask_mse)/d(m_est), scaled by `upstream`.
template <class S>
MatX<S> mask_mse_backward(const MatX<S>& m_true, const MatX<S>& m_est, S upstream = S(1)) {
  const auto bins = static_cast<S>(m_true.rows() * (m_true.cols() / 2));
  return (S(2) * upstream / bins) * (m_est - m_true);
}

template <class S>
S weighted_mask_loss(const MatX<S>& m_true, const MatX<S>& m_est, const MatX<S>& weights) {
  detail::check_packed_pair(m_true, m_est, "weighted_mask_loss");
  const Eigen::Index F = m_true.cols() / 2;
  if (weights.rows() != m_true.rows() || weights.cols() != F) {
    throw NumericError("weighted_mask_loss: weight shape mismatch");
  }
  S acc = S(0);
  for (Eigen::Index t = 0; t < m_true.rows(); ++t) {
    for (Eigen::Index k = 0; k < F; ++k) {
      const S dr = m_true(t, k) - m_est(t, k);
      const S di = m_true(t, F + k) - m_est(t, F + k);
      acc += weights(t, k) * (dr * dr + di * di);
    }
  }
  return acc / static_cast<S>(m_true.rows() * F);
}

template <class S>
MatX<S> weighted_mask_loss_backward(const MatX<S>& m_true, const MatX<S>& m_est,
                                    const MatX<S>& weights, S upstream = S(1)) {
  const Eigen::Index F = m_true.cols() / 2;
  const S scale = S(2) * upstream / static_cast<S>(m_true.rows() * F);
  MatX<S> grad(m_true.rows(), m_true.cols());
  for (Eigen::Index t = 0; t < m_true.rows(); ++t) {
    for (Eigen::Index k = 0; k < F; ++k) {
      grad(t, k) = scale * weights(t, k) * (m_est(t, k) - m_true(t, k));
      grad(t, F + k) = scale * weights(t, k) * (m_est(t, F + k) - m_true(t, F + k));
    }
  }
  return grad;
}

/// Product mode (default): mean of (|M_est| |E|)^2 = (M_R^2 + M_I^2) |E|^2.
/// Difference mode: mean of (|M_est| - |E|)^2.
template <class S>
S error_reduction_loss(const MatX<S>& m_est, const MatX<S>& error_spec,
                       ErrorLossMode mode = ErrorLossMode::Product) {
  detail::check_packed_pair(m_est, error_spec, "error_reduction_loss");
  const Eigen::Index F = m_est.cols() / 2;
  S acc = S(0);
  for (Eigen::Index t = 0; t < m_est.rows(); ++t) {
    for (Eigen::Index k = 0; k < F; ++k) {
      const S m2 = m_est(t, k) * m_est(t, k) + m_est(t, F + k) * m_est(t, F + k);
      const S e2 = error_spec(t, k) * error_spec(t, k) +
                   error_spec(t, F + k) * error_spec(t, F + k);
      if (mode == ErrorLossMode::Product) {
        acc += m2 * e2;
      } else {
        const S d = std::sqrt(m2) - std::sqrt(e2);
        acc += d * d;
      }
    }
  }
  return acc / static_cast<S>(m_est.rows() * F);
}

template <class S>
MatX<S> error_reduction_loss_backward(const MatX<S>& m_est, const MatX<S>& error_spec,
                                      ErrorLossMode mode = ErrorLossMode::Product,
                                      S upstream = S(1)) {
  const Eigen::Index F = m_est.cols() / 2;
  const S scale = upstream / static_cast<S>(m_est.rows() * F);
  MatX<S> grad = MatX<S>::Zero(m_est.rows(), m_est.cols());
  for (Eigen::Index t = 0; t < m_est.rows(); ++t) {
    for (Eigen::Index k = 0; k < F; ++k) {
      const S mr = m_est(t, k), mi = m_est(t, F + k);
      const S e2 = error_spec(t, k) * error_spec(t, k) +
                   error_spec(t, F + k) * error_spec(t, F + k);
      if (mode == ErrorLossMode::Product) {
        grad(t, k) = scale * S(2) * mr * e2;
        grad(t, F + k) = scale * S(2) * mi * e2;
      } else {
        const S mmag = std::sqrt(mr * mr + mi * mi);
        if (mmag > S(0)) {
          const S d = mmag - std::sqrt(e2);
          grad(t, k) = scale * S(2) * d * mr / mmag;
          grad(t, F + k) = scale * S(2) * d * mi / mmag;
        }
      }
    }
  }
  return grad;
}

/// InfoNCE-form loss for one frame group: mean over positives p of
///   -log( exp(p) / (exp(p) + sum_j exp(neg_j)) ),
/// evaluated with max subtraction. Throws if either side is empty.
template <class S>
S contrastive_loss(std::span<const S> pos_scores, std::span<const S> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw NumericError("contrastive_loss: empty score set");
  }
  S neg_max = neg_scores[0];
  for (S v : neg_scores) neg_max = std::max(neg_max, v);
  S acc = S(0);
  for (S p : pos_scores) {
    const S m = std::max(p, neg_max);
    S z = std::exp(p - m);
    for (S v : neg_scores) z += std::exp(v - m);
    acc += -(p - m) + std::log(z);
  }
  return acc / static_cast<S>(pos_scores.size());
}

/// Gradients of contrastive_loss with respect to each score.
template <class S>
void contrastive_loss_backward(std::span<const S> pos_scores, std::span<const S> neg_scores,
                               std::span<S> d_pos, std::span<S> d_neg, S upstream = S(1)) {
  const S inv_p = upstream / static_cast<S>(pos_scores.size());
  for (std::size_t j = 0; j < neg_scores.size(); ++j) d_neg[j] = S(0);
  S neg_max = neg_scores[0];
  for (S v : neg_scores) neg_max = std::max(neg_max, v);
  for (std::size_t i = 0; i < pos_scores.size(); ++i) {
    const S p = pos_scores[i];
    const S m = std::max(p, neg_max);
    S z = std::exp(p - m);
    for (S v : neg_scores) z += std::exp(v - m);
    d_pos[i] = inv_p * (std::exp(p - m) / z - S(1));
    for (std::size_t j = 0; j < neg_scores.size(); ++j) {
      d_neg[j] += inv_p * std::exp(neg_scores[j] - m) / z;
    }
  }
}

template <class S>
S total_loss(S aec, S con, S alpha) {
  require(alpha >= S(0), "total_loss: alpha must be >= 0");
  return aec + alpha * con;
}

/// Fine-tune objective: SQA-weighted mask loss (combined SDW*ESW weights)
/// plus lambda_err * error_reduction_loss. Weights are derived from the
/// true mask, so they are constants with respect to m_est.
template <class S>
LossBreakdown finetune_objective(const MatX<S>& m_true, const MatX<S>& m_est,
                                 const MatX<S>& error_spec, const FinetuneLossConfig& cfg,
                                 MatX<S>* grad_out = nullptr) {
  detail::check_packed_pair(m_true, m_est, "finetune_objective");
  const Eigen::Index T = m_true.rows(), F = m_true.cols() / 2;

  MatX<S> w_sdw(T, F), w_esw(T, F);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index k = 0; k < F; ++k) {
      const S mag = std::sqrt(m_true(t, k) * m_true(t, k) +
                              m_true(t, F + k) * m_true(t, F + k));
      w_sdw(t, k) = mag <= S(1)
                        ? S(1)
                        : std::min(std::pow(mag, static_cast<S>(cfg.sdw_n)),
                                   static_cast<S>(cfg.sdw_bound));
      if (mag >= S(1)) {
        w_esw(t, k) = S(1);
      } else if (mag == S(0)) {
        w_esw(t, k) = static_cast<S>(cfg.esw_bound);
      } else {
        w_esw(t, k) = std::min(std::pow(mag, static_cast<S>(cfg.esw_n)),
                               static_cast<S>(cfg.esw_bound));
      }
    }
  }
  const MatX<S> w_combined = w_sdw.cwiseProduct(w_esw);

  LossBreakdown out;
  out.lambda_err = cfg.lambda_err;
  out.mask_mse = static_cast<double>(mask_mse(m_true, m_est));
  out.sdw_loss = static_cast<double>(weighted_mask_loss(m_true, m_est, w_sdw));
  out.esw_loss = static_cast<double>(weighted_mask_loss(m_true, m_est, w_esw));
  out.error_loss = static_cast<double>(error_reduction_loss(m_est, error_spec, cfg.error_mode));
  out.total = static_cast<double>(weighted_mask_loss(m_true, m_est, w_combined)) +
              cfg.lambda_err * out.error_loss;

  if (grad_out != nullptr) {
    *grad_out = weighted_mask_loss_backward(m_true, m_est, w_combined) +
                error_reduction_loss_backward(m_est, error_spec, cfg.error_mode,
                                              static_cast<S>(cfg.lambda_err));
  }
  return out;
}

}  // namespace aeclab
