#include <doctest.h>

#include <random>

#include "aeclab/nn/layers.hpp"
#include "test_util.hpp"

using namespace aeclab;
using namespace aeclab::nn;
using aeclab::testutil::gradient_rel_error;
using aeclab::testutil::random_mat;

TEST_CASE("dense: identity, scalar case, gradients") {
  DenseParams<double> id{MatX<double>::Identity(3, 3), MatX<double>::Zero(1, 3)};
  const auto x = random_mat(4, 3, 1);
  CHECK((dense_forward(id, x) - x).cwiseAbs().maxCoeff() == 0.0);

  DenseParams<double> scalar{MatX<double>::Constant(1, 1, 2.0), MatX<double>::Constant(1, 1, 1.0)};
  MatX<double> three = MatX<double>::Constant(1, 1, 3.0);
  CHECK(dense_forward(scalar, three)(0, 0) == 7.0);

  // Random 4x3 layer: analytic vs central finite differences.
  DenseParams<double> p{random_mat(4, 3, 2), random_mat(1, 4, 3)};
  const auto input = random_mat(5, 3, 4);
  DenseTape<double> tape;
  const auto y = dense_forward(p, input, &tape);
  const MatX<double> probe = random_mat(y.rows(), y.cols(), 5);

  DenseParams<double> grads{MatX<double>::Zero(4, 3), MatX<double>::Zero(1, 4)};
  const MatX<double> dx = dense_backward(p, tape, probe, grads);

  const auto num_dx = testutil::numeric_gradient(
      [&](const MatX<double>& xx) { return (dense_forward(p, xx).cwiseProduct(probe)).sum(); },
      input);
  CHECK(gradient_rel_error(dx, num_dx) <= 1e-6);

  const auto num_dw = testutil::numeric_gradient(
      [&](const MatX<double>& ww) {
        DenseParams<double> q{ww, p.b};
        return (dense_forward(q, input).cwiseProduct(probe)).sum();
      },
      p.w);
  CHECK(gradient_rel_error(grads.w, num_dw) <= 1e-6);

  const auto num_db = testutil::numeric_gradient(
      [&](const MatX<double>& bb) {
        DenseParams<double> q{p.w, bb};
        return (dense_forward(q, input).cwiseProduct(probe)).sum();
      },
      p.b);
  CHECK(gradient_rel_error(grads.b, num_db) <= 1e-6);
}

TEST_CASE("conv1d: identity kernel, hand case, causality") {
  // Single channel, tap 0 = 1 -> identity.
  Conv1dParams<double> id;
  id.kernel = 3;
  id.w = MatX<double>::Zero(1, 3);
  id.w(0, 0) = 1.0;
  id.b = MatX<double>::Zero(1, 1);
  const auto x = random_mat(6, 1, 7);
  CHECK((conv1d_forward(id, x) - x).cwiseAbs().maxCoeff() == 0.0);

  // Kernel [1, 1] on [1, 2, 3], causal -> [1, 3, 5].
  Conv1dParams<double> sum2;
  sum2.kernel = 2;
  sum2.w = MatX<double>::Ones(1, 2);
  sum2.b = MatX<double>::Zero(1, 1);
  MatX<double> ramp(3, 1);
  ramp << 1, 2, 3;
  const auto y = conv1d_forward(sum2, ramp);
  CHECK(y(0, 0) == 1.0);
  CHECK(y(1, 0) == 3.0);
  CHECK(y(2, 0) == 5.0);

  // Causality: perturbing frame t leaves frames < t untouched.
  Conv1dParams<double> p;
  p.kernel = 3;
  p.w = random_mat(4, 9, 8);
  p.b = random_mat(1, 4, 9);
  auto base_in = random_mat(6, 3, 10);
  const auto base_out = conv1d_forward(p, base_in);
  base_in(3, 1) += 0.5;
  const auto bumped = conv1d_forward(p, base_in);
  CHECK((bumped.topRows(3) - base_out.topRows(3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((bumped.row(3) - base_out.row(3)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("conv1d gradients vs finite differences") {
  Conv1dParams<double> p;
  p.kernel = 3;
  p.w = random_mat(4, 9, 11);
  p.b = random_mat(1, 4, 12);
  const auto x = random_mat(7, 3, 13);

  Conv1dTape<double> tape;
  const auto y = conv1d_forward(p, x, &tape);
  const MatX<double> probe = random_mat(y.rows(), y.cols(), 14);
  Conv1dParams<double> grads;
  grads.kernel = 3;
  grads.w = MatX<double>::Zero(4, 9);
  grads.b = MatX<double>::Zero(1, 4);
  const auto dx = conv1d_backward(p, tape, probe, grads);

  const auto num_dx = testutil::numeric_gradient(
      [&](const MatX<double>& xx) { return (conv1d_forward(p, xx).cwiseProduct(probe)).sum(); },
      x);
  CHECK(gradient_rel_error(dx, num_dx) <= 1e-6);

  const auto num_dw = testutil::numeric_gradient(
      [&](const MatX<double>& ww) {
        Conv1dParams<double> q = p;
        q.w = ww;
        return (conv1d_forward(q, x).cwiseProduct(probe)).sum();
      },
      p.w);
  CHECK(gradient_rel_error(grads.w, num_dw) <= 1e-6);
}

TEST_CASE("downconv: frame count and gradients") {
  Conv1dParams<double> p;
  p.kernel = 4;  // stride
  p.w = random_mat(3, 8, 15);
  p.b = random_mat(1, 3, 16);

  for (int T : {16, 17, 19, 20}) {
    const auto x = random_mat(T, 2, 17 + T);
    const auto y = downconv_forward(p, x);
    CHECK(y.rows() == (T + 3) / 4);  // ceil(T / stride)
  }

  const auto x = random_mat(10, 2, 18);
  DownConvTape<double> tape;
  const auto y = downconv_forward(p, x, &tape);
  const MatX<double> probe = random_mat(y.rows(), y.cols(), 19);
  Conv1dParams<double> grads;
  grads.kernel = 4;
  grads.w = MatX<double>::Zero(3, 8);
  grads.b = MatX<double>::Zero(1, 3);
  const auto dx = downconv_backward(p, tape, probe, grads);

  const auto num_dx = testutil::numeric_gradient(
      [&](const MatX<double>& xx) { return (downconv_forward(p, xx).cwiseProduct(probe)).sum(); },
      x);
  CHECK(gradient_rel_error(dx, num_dx) <= 1e-6);

  const auto num_dw = testutil::numeric_gradient(
      [&](const MatX<double>& ww) {
        Conv1dParams<double> q = p;
        q.w = ww;
        return (downconv_forward(q, x).cwiseProduct(probe)).sum();
      },
      p.w);
  CHECK(gradient_rel_error(grads.w, num_dw) <= 1e-6);
}

TEST_CASE("gru: zero parameters give zero output") {
  GruParams<double> p;
  p.w = MatX<double>::Zero(9, 2);
  p.r = MatX<double>::Zero(9, 3);
  p.b = MatX<double>::Zero(1, 9);
  const auto x = random_mat(5, 2, 20);
  const VecX<double> h0 = VecX<double>::Zero(3);
  const auto h = gru_forward(p, x, h0);
  CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gru: single step matches hand-evaluated recurrence") {
  // Scalar hidden, scalar input, hand-set weights.
  GruParams<double> p;
  p.w.resize(3, 1);
  p.w << 0.5, -0.3, 0.8;  // wz, wr, wc
  p.r.resize(3, 1);
  p.r << 0.2, 0.4, -0.6;  // rz, rr, rc
  p.b.resize(1, 3);
  p.b << 0.1, -0.2, 0.05;

  const double x = 0.7, h0 = 0.3;
  const double z = 1.0 / (1.0 + std::exp(-(0.5 * x + 0.2 * h0 + 0.1)));
  const double r = 1.0 / (1.0 + std::exp(-(-0.3 * x + 0.4 * h0 - 0.2)));
  const double c = std::tanh(0.8 * x + (-0.6) * (r * h0) + 0.05);
  const double expect = (1.0 - z) * h0 + z * c;

  MatX<double> xin(1, 1);
  xin << x;
  VecX<double> state(1);
  state << h0;
  const auto h = gru_forward(p, xin, state);
  CHECK(h(0, 0) == doctest::Approx(expect).epsilon(1e-14));

  // Streaming step agrees with the batch forward.
  VecX<double> s2(1);
  s2 << h0;
  VecX<double> xv(1);
  xv << x;
  gru_step(p, xv, s2);
  CHECK(s2(0) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("gru: BPTT gradients vs finite differences on a 5-step sequence") {
  std::mt19937_64 rng(77);
  GruParams<double> p = gru_init<double>(3, 4, rng);
  const auto x = random_mat(5, 3, 21);
  const VecX<double> h0 = VecX<double>::Zero(4);

  GruTape<double> tape;
  const auto h = gru_forward(p, x, h0, &tape);
  const MatX<double> probe = random_mat(h.rows(), h.cols(), 22);

  GruParams<double> grads;
  grads.w = MatX<double>::Zero(12, 3);
  grads.r = MatX<double>::Zero(12, 4);
  grads.b = MatX<double>::Zero(1, 12);
  const auto dx = gru_backward(p, tape, probe, grads);

  auto loss_with = [&](const GruParams<double>& q, const MatX<double>& xx) {
    return (gru_forward(q, xx, h0).cwiseProduct(probe)).sum();
  };

  const auto num_dx = testutil::numeric_gradient(
      [&](const MatX<double>& xx) { return loss_with(p, xx); }, x);
  CHECK(gradient_rel_error(dx, num_dx) <= 1e-6);

  const auto num_dw = testutil::numeric_gradient(
      [&](const MatX<double>& ww) {
        GruParams<double> q = p;
        q.w = ww;
        return loss_with(q, x);
      },
      p.w);
  CHECK(gradient_rel_error(grads.w, num_dw) <= 1e-6);

  const auto num_dr = testutil::numeric_gradient(
      [&](const MatX<double>& rr) {
        GruParams<double> q = p;
        q.r = rr;
        return loss_with(q, x);
      },
      p.r);
  CHECK(gradient_rel_error(grads.r, num_dr) <= 1e-6);

  const auto num_db = testutil::numeric_gradient(
      [&](const MatX<double>& bb) {
        GruParams<double> q = p;
        q.b = bb;
        return loss_with(q, x);
      },
      p.b);
  CHECK(gradient_rel_error(grads.b, num_db) <= 1e-6);
}

TEST_CASE("gru streaming steps replay the batch forward") {
  std::mt19937_64 rng(31);
  GruParams<double> p = gru_init<double>(3, 4, rng);
  const auto x = random_mat(6, 3, 23);
  const auto h = gru_forward(p, x, VecX<double>(VecX<double>::Zero(4)));
  VecX<double> state = VecX<double>::Zero(4);
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    gru_step(p, VecX<double>(x.row(t).transpose()), state);
    CHECK((state.transpose() - h.row(t)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("orthogonal init is orthogonal and deterministic") {
  std::mt19937_64 rng1(5), rng2(5);
  const auto q1 = orthogonal<double>(6, rng1);
  const auto q2 = orthogonal<double>(6, rng2);
  CHECK((q1 - q2).cwiseAbs().maxCoeff() == 0.0);
  const MatX<double> eye = q1 * q1.transpose();
  CHECK((eye - MatX<double>::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}
