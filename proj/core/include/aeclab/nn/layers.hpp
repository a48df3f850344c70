#pragma once

#include <Eigen/QR>
#include <cmath>
#include <random>
#include <string>

#include "aeclab/common.hpp"
#include "aeclab/tensor.hpp"

namespace aeclab::nn {

using aeclab::MatX;
using aeclab::VecX;

// Parameters are plain structs of matrices; gradient accumulators are a
// second instance of the same struct (zeros_like). Forward passes write the
// activations a matching backward pass needs into small tape structs, so a
// read-only parameter set can serve many concurrent forward/backward pairs.

template <class S>
struct DenseParams {
  MatX<S> w;  // out x in
  MatX<S> b;  // 1 x out
};

template <class S>
struct Conv1dParams {
  MatX<S> w;  // out x (in * kernel); tap j lives in cols [j*in, (j+1)*in)
  MatX<S> b;  // 1 x out
  int kernel = 0;
  int in_features() const { return kernel > 0 ? static_cast<int>(w.cols()) / kernel : 0; }
};

template <class S>
struct GruParams {
  MatX<S> w;  // 3h x in, gate rows ordered [update z; reset r; candidate c]
  MatX<S> r;  // 3h x h
  MatX<S> b;  // 1 x 3h
  int hidden() const { return static_cast<int>(r.cols()); }
};

// ---------------------------------------------------------------------------
// Initialization

template <class S>
MatX<S> uniform_fan_in(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in,
                       std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  MatX<S> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = static_cast<S>(dist(rng));
  return m;
}

/// Orthogonal square matrix from the QR of a Gaussian draw, signs fixed by
/// the R diagonal so the result is deterministic.
template <class S>
MatX<S> orthogonal(Eigen::Index n, std::mt19937_64& rng);

template <class S>
DenseParams<S> dense_init(int in, int out, std::mt19937_64& rng) {
  return {uniform_fan_in<S>(out, in, in, rng), MatX<S>::Zero(1, out)};
}

template <class S>
DenseParams<S> dense_init_zero(int in, int out) {
  return {MatX<S>::Zero(out, in), MatX<S>::Zero(1, out)};
}

template <class S>
Conv1dParams<S> conv1d_init(int in, int out, int kernel, std::mt19937_64& rng) {
  Conv1dParams<S> p;
  p.w = uniform_fan_in<S>(out, static_cast<Eigen::Index>(in) * kernel,
                          static_cast<Eigen::Index>(in) * kernel, rng);
  p.b = MatX<S>::Zero(1, out);
  p.kernel = kernel;
  return p;
}

template <class S>
GruParams<S> gru_init(int in, int hidden, std::mt19937_64& rng) {
  GruParams<S> p;
  p.w = uniform_fan_in<S>(3 * hidden, in, in, rng);
  p.r.resize(3 * hidden, hidden);
  for (int g = 0; g < 3; ++g) {
    p.r.middleRows(g * hidden, hidden) = orthogonal<S>(hidden, rng);
  }
  p.b = MatX<S>::Zero(1, 3 * hidden);
  return p;
}

// ---------------------------------------------------------------------------
// Dense

template <class S>
struct DenseTape {
  MatX<S> x;
};

template <class S>
MatX<S> dense_forward(const DenseParams<S>& p, const MatX<S>& x, DenseTape<S>* tape = nullptr) {
  require(x.cols() == p.w.cols(), "dense_forward: feature width mismatch");
  if (tape) tape->x = x;
  return (x * p.w.transpose()).rowwise() + p.b.row(0);
}

template <class S>
MatX<S> dense_backward(const DenseParams<S>& p, const DenseTape<S>& tape, const MatX<S>& dy,
                       DenseParams<S>& grads) {
  grads.w.noalias() += dy.transpose() * tape.x;
  grads.b.row(0) += dy.colwise().sum();
  return dy * p.w;
}

// ---------------------------------------------------------------------------
// Causal Conv1d over time (left zero padding; output frame t sees frames <= t)

template <class S>
struct Conv1dTape {
  MatX<S> x;
};

template <class S>
MatX<S> conv1d_forward(const Conv1dParams<S>& p, const MatX<S>& x, Conv1dTape<S>* tape = nullptr) {
  const int in = p.in_features();
  require(x.cols() == in, "conv1d_forward: feature width mismatch");
  require(x.rows() >= 1, "conv1d_forward: empty sequence");
  if (tape) tape->x = x;
  const Eigen::Index T = x.rows();
  const Eigen::Index out = p.w.rows();
  MatX<S> y = p.b.row(0).replicate(T, 1);
  for (int j = 0; j < p.kernel; ++j) {
    if (j >= T) break;
    y.bottomRows(T - j).noalias() +=
        x.topRows(T - j) * p.w.middleCols(static_cast<Eigen::Index>(j) * in, in).transpose();
  }
  return y;
}

template <class S>
MatX<S> conv1d_backward(const Conv1dParams<S>& p, const Conv1dTape<S>& tape, const MatX<S>& dy,
                        Conv1dParams<S>& grads) {
  const int in = p.in_features();
  const Eigen::Index T = tape.x.rows();
  MatX<S> dx = MatX<S>::Zero(T, in);
  for (int j = 0; j < p.kernel; ++j) {
    if (j >= T) break;
    const auto wj = p.w.middleCols(static_cast<Eigen::Index>(j) * in, in);
    dx.topRows(T - j).noalias() += dy.bottomRows(T - j) * wj;
    grads.w.middleCols(static_cast<Eigen::Index>(j) * in, in).noalias() +=
        dy.bottomRows(T - j).transpose() * tape.x.topRows(T - j);
  }
  grads.b.row(0) += dy.colwise().sum();
  return dx;
}

/// Streaming conv: history holds the previous kernel-1 input frames.
template <class S>
struct Conv1dState {
  MatX<S> history;  // (kernel-1) x in, row 0 = oldest
};

template <class S>
Conv1dState<S> conv1d_state(const Conv1dParams<S>& p) {
  return {MatX<S>::Zero(p.kernel - 1, p.in_features())};
}

template <class S>
VecX<S> conv1d_step(const Conv1dParams<S>& p, const VecX<S>& x_t, Conv1dState<S>& state) {
  const int in = p.in_features();
  VecX<S> y = p.b.row(0).transpose();
  y.noalias() += p.w.leftCols(in) * x_t;
  for (int j = 1; j < p.kernel; ++j) {
    y.noalias() += p.w.middleCols(static_cast<Eigen::Index>(j) * in, in) *
                   state.history.row(p.kernel - 1 - j).transpose();
  }
  if (p.kernel > 1) {
    for (int r = 0; r + 1 < p.kernel - 1; ++r) state.history.row(r) = state.history.row(r + 1);
    state.history.row(p.kernel - 2) = x_t.transpose();
  }
  return y;
}

// ---------------------------------------------------------------------------
// Strided downsampling conv (kernel == stride, zero tail padding); used by
// the contrastive score head. Output has ceil(T / stride) frames.

template <class S>
struct DownConvTape {
  MatX<S> x;
};

template <class S>
MatX<S> downconv_forward(const Conv1dParams<S>& p, const MatX<S>& x,
                         DownConvTape<S>* tape = nullptr) {
  const int in = p.in_features();
  const int stride = p.kernel;
  require(x.cols() == in, "downconv_forward: feature width mismatch");
  if (tape) tape->x = x;
  const Eigen::Index T = x.rows();
  const Eigen::Index Td = (T + stride - 1) / stride;
  MatX<S> y = p.b.row(0).replicate(Td, 1);
  for (Eigen::Index m = 0; m < Td; ++m) {
    for (int j = 0; j < stride; ++j) {
      const Eigen::Index src = m * stride + j;
      if (src >= T) break;
      y.row(m).noalias() +=
          x.row(src) * p.w.middleCols(static_cast<Eigen::Index>(j) * in, in).transpose();
    }
  }
  return y;
}

template <class S>
MatX<S> downconv_backward(const Conv1dParams<S>& p, const DownConvTape<S>& tape,
                          const MatX<S>& dy, Conv1dParams<S>& grads) {
  const int in = p.in_features();
  const int stride = p.kernel;
  const Eigen::Index T = tape.x.rows();
  MatX<S> dx = MatX<S>::Zero(T, in);
  for (Eigen::Index m = 0; m < dy.rows(); ++m) {
    for (int j = 0; j < stride; ++j) {
      const Eigen::Index src = m * stride + j;
      if (src >= T) break;
      const auto wj = p.w.middleCols(static_cast<Eigen::Index>(j) * in, in);
      dx.row(src).noalias() += dy.row(m) * wj;
      grads.w.middleCols(static_cast<Eigen::Index>(j) * in, in).noalias() +=
          dy.row(m).transpose() * tape.x.row(src);
    }
  }
  grads.b.row(0) += dy.colwise().sum();
  return dx;
}

// ---------------------------------------------------------------------------
// GRU (update gate z, reset gate r, candidate c):
//   z_t = sigmoid(Wz x_t + Rz h_{t-1} + bz)
//   r_t = sigmoid(Wr x_t + Rr h_{t-1} + br)
//   c_t = tanh(Wc x_t + Rc (r_t .* h_{t-1}) + bc)
//   h_t = (1 - z_t) .* h_{t-1} + z_t .* c_t

namespace detail {
template <class S>
S sigmoid(S x) {
  if (x >= S(0)) {
    const S e = std::exp(-x);
    return S(1) / (S(1) + e);
  }
  const S e = std::exp(x);
  return e / (S(1) + e);
}
}  // namespace detail

template <class S>
struct GruTape {
  MatX<S> x;        // T x in
  MatX<S> z, r, c;  // T x h gate activations
  MatX<S> h;        // T x h outputs
  MatX<S> rh;       // T x h, r .* h_prev (input to Rc)
  VecX<S> h0;
};

template <class S>
MatX<S> gru_forward(const GruParams<S>& p, const MatX<S>& x, const VecX<S>& h0,
                    GruTape<S>* tape = nullptr) {
  const int h = p.hidden();
  require(x.cols() == p.w.cols(), "gru_forward: feature width mismatch");
  require(h0.size() == h, "gru_forward: state width mismatch");
  const Eigen::Index T = x.rows();

  // Input projections for the whole sequence in one product.
  MatX<S> proj = (x * p.w.transpose()).rowwise() + p.b.row(0);

  MatX<S> Z(T, h), R(T, h), C(T, h), H(T, h), RH(T, h);
  VecX<S> prev = h0;
  VecX<S> gates(2 * h), cand(h), rh(h);
  const auto r_zr = p.r.topRows(2 * h);
  const auto r_c = p.r.bottomRows(h);
  for (Eigen::Index t = 0; t < T; ++t) {
    gates.noalias() = r_zr * prev;
    for (int i = 0; i < h; ++i) {
      Z(t, i) = detail::sigmoid(proj(t, i) + gates(i));
      R(t, i) = detail::sigmoid(proj(t, h + i) + gates(h + i));
      rh(i) = R(t, i) * prev(i);
    }
    RH.row(t) = rh.transpose();
    cand.noalias() = r_c * rh;
    for (int i = 0; i < h; ++i) {
      C(t, i) = std::tanh(proj(t, 2 * h + i) + cand(i));
      H(t, i) = (S(1) - Z(t, i)) * prev(i) + Z(t, i) * C(t, i);
    }
    prev = H.row(t).transpose();
  }
  if (tape) {
    tape->x = x;
    tape->z = Z;
    tape->r = R;
    tape->c = C;
    tape->h = H;
    tape->rh = RH;
    tape->h0 = h0;
  }
  return H;
}

/// Full backpropagation through time. dy holds per-step upstream gradients;
/// d_h_final (optional) is the gradient arriving at the final state.
template <class S>
MatX<S> gru_backward(const GruParams<S>& p, const GruTape<S>& tape, const MatX<S>& dy,
                     GruParams<S>& grads, const VecX<S>* d_h_final = nullptr) {
  const int h = p.hidden();
  const Eigen::Index T = tape.x.rows();
  MatX<S> dA(T, 3 * h);  // pre-activation gradients [z | r | c]
  VecX<S> carry = VecX<S>::Zero(h);
  if (d_h_final) carry = *d_h_final;

  const auto r_z = p.r.topRows(h);
  const auto r_r = p.r.middleRows(h, h);
  const auto r_c = p.r.bottomRows(h);

  VecX<S> dh(h), drh(h), daz(h), dar(h), dac(h);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    dh = dy.row(t).transpose() + carry;
    const auto h_prev = (t == 0) ? tape.h0 : VecX<S>(tape.h.row(t - 1).transpose());
    for (int i = 0; i < h; ++i) {
      const S z = tape.z(t, i), c = tape.c(t, i);
      const S dz = dh(i) * (c - h_prev(i));
      const S dc = dh(i) * z;
      dac(i) = dc * (S(1) - c * c);
      daz(i) = dz * z * (S(1) - z);
      carry(i) = dh(i) * (S(1) - z);
    }
    drh.noalias() = r_c.transpose() * dac;
    for (int i = 0; i < h; ++i) {
      const S r = tape.r(t, i);
      dar(i) = drh(i) * h_prev(i) * r * (S(1) - r);
      carry(i) += drh(i) * r;
    }
    carry.noalias() += r_z.transpose() * daz;
    carry.noalias() += r_r.transpose() * dar;
    dA.row(t).segment(0, h) = daz.transpose();
    dA.row(t).segment(h, h) = dar.transpose();
    dA.row(t).segment(2 * h, h) = dac.transpose();
  }

  // Batched parameter gradients.
  grads.w.noalias() += dA.transpose() * tape.x;
  grads.b.row(0) += dA.colwise().sum();
  MatX<S> h_prev_seq(T, h);
  h_prev_seq.row(0) = tape.h0.transpose();
  if (T > 1) h_prev_seq.bottomRows(T - 1) = tape.h.topRows(T - 1);
  grads.r.topRows(2 * h).noalias() += dA.leftCols(2 * h).transpose() * h_prev_seq;
  grads.r.bottomRows(h).noalias() += dA.rightCols(h).transpose() * tape.rh;
  return dA * p.w;
}

/// One streaming step; returns h_t and updates the state in place.
template <class S>
void gru_step(const GruParams<S>& p, const VecX<S>& x_t, VecX<S>& state) {
  const int h = p.hidden();
  VecX<S> proj = p.w * x_t + p.b.row(0).transpose();
  VecX<S> gates = p.r.topRows(2 * h) * state;
  VecX<S> rh(h);
  for (int i = 0; i < h; ++i) {
    const S r = detail::sigmoid(proj(h + i) + gates(h + i));
    rh(i) = r * state(i);
  }
  VecX<S> cand = p.r.bottomRows(h) * rh;
  for (int i = 0; i < h; ++i) {
    const S z = detail::sigmoid(proj(i) + gates(i));
    const S c = std::tanh(proj(2 * h + i) + cand(i));
    state(i) = (S(1) - z) * state(i) + z * c;
  }
}

// ---------------------------------------------------------------------------

template <class S>
MatX<S> orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = static_cast<S>(dist(rng));
  Eigen::HouseholderQR<decltype(g)> qr(g);
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> q =
      qr.householderQ() * Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
  const auto r_diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r_diag(j) < S(0)) q.col(j) = -q.col(j);
  }
  return MatX<S>(q);
}

}  // namespace aeclab::nn
