#pragma once

// Dense numeric kernels shared by training, inference and relevance
// propagation. Activations hold one record per column; within a column,
// channel c at sequence position l lives in row c + l * channels, so a
// kernel window over positions [p, p + k) is the contiguous row block
// [p * channels, (p + k) * channels).

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace tabxai::kernels {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Valid (unpadded) stride-1 convolution. `weight` is out_channels x
/// (kernel * in_channels) with column j * in_channels + c for tap j, channel c.
template <typename DerivedW, typename DerivedB, typename DerivedX>
Mat<typename DerivedX::Scalar> conv1d_forward(const Eigen::MatrixBase<DerivedW>& weight,
                                              const Eigen::MatrixBase<DerivedB>& bias,
                                              const Eigen::MatrixBase<DerivedX>& input, Eigen::Index in_channels) {
  const Eigen::Index out_ch = weight.rows();
  const Eigen::Index window = weight.cols();
  const Eigen::Index in_len = input.rows() / in_channels;
  const Eigen::Index out_len = in_len - window / in_channels + 1;
  Mat<typename DerivedX::Scalar> out(out_ch * out_len, input.cols());
  for (Eigen::Index p = 0; p < out_len; ++p) {
    auto block = out.middleRows(p * out_ch, out_ch);
    block.noalias() = weight * input.middleRows(p * in_channels, window);
    block.colwise() += bias;
  }
  return out;
}

/// Accumulates parameter gradients of conv1d_forward and, when `grad_input`
/// is non-null, the gradient with respect to its input.
template <typename DerivedW, typename DerivedX, typename DerivedG, typename Scalar>
void conv1d_backward(const Eigen::MatrixBase<DerivedW>& weight, const Eigen::MatrixBase<DerivedX>& input,
                     const Eigen::MatrixBase<DerivedG>& grad_out, Eigen::Index in_channels,
                     Mat<Scalar>& grad_weight, Vec<Scalar>& grad_bias, Mat<Scalar>* grad_input) {
  const Eigen::Index out_ch = weight.rows();
  const Eigen::Index window = weight.cols();
  const Eigen::Index out_len = grad_out.rows() / out_ch;
  grad_weight.setZero(weight.rows(), weight.cols());
  grad_bias.setZero(out_ch);
  if (grad_input) grad_input->setZero(input.rows(), input.cols());
  for (Eigen::Index p = 0; p < out_len; ++p) {
    const auto g = grad_out.middleRows(p * out_ch, out_ch);
    grad_weight.noalias() += g * input.middleRows(p * in_channels, window).transpose();
    grad_bias += g.rowwise().sum();
    if (grad_input) grad_input->middleRows(p * in_channels, window).noalias() += weight.transpose() * g;
  }
}

template <typename DerivedW, typename DerivedB, typename DerivedX>
Mat<typename DerivedX::Scalar> dense_forward(const Eigen::MatrixBase<DerivedW>& weight,
                                             const Eigen::MatrixBase<DerivedB>& bias,
                                             const Eigen::MatrixBase<DerivedX>& input) {
  Mat<typename DerivedX::Scalar> out(weight.rows(), input.cols());
  out.noalias() = weight * input;
  out.colwise() += bias;
  return out;
}

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseMax(typename Derived::Scalar(0));
}

/// Column-wise log-sum-exp stabilised softmax.
template <typename Derived>
Mat<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Mat<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const Scalar m = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - m).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

/// Column-wise log-softmax.
template <typename Derived>
Mat<typename Derived::Scalar> log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Mat<Scalar> out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const Scalar m = logits.col(c).maxCoeff();
    const Scalar lse = m + std::log((logits.col(c).array() - m).exp().sum());
    out.col(c) = logits.col(c).array() - lse;
  }
  return out;
}

enum class LrpRule { z, epsilon, alpha_beta };

template <typename Scalar>
struct LrpParams {
  LrpRule rule = LrpRule::epsilon;
  Scalar epsilon = Scalar(1e-6);
  Scalar alpha = Scalar(1);
  Scalar beta = Scalar(0);
};

class ZeroDenominator : public std::runtime_error {
 public:
  ZeroDenominator() : std::runtime_error("zero denominator under the z-rule") {}
};

/// Redistributes the relevance `r_out` of an affine map out = W x + b onto x.
/// `z` holds the stored outputs (bias included, so bias relevance is absorbed).
template <typename DerivedW, typename DerivedB, typename DerivedX, typename DerivedZ, typename DerivedR>
Vec<typename DerivedX::Scalar> lrp_affine(const Eigen::MatrixBase<DerivedW>& weight,
                                          const Eigen::MatrixBase<DerivedB>& bias,
                                          const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedZ>& z,
                                          const Eigen::MatrixBase<DerivedR>& r_out,
                                          const LrpParams<typename DerivedX::Scalar>& params) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index units = weight.rows();
  if (params.rule != LrpRule::alpha_beta) {
    const Scalar eps = params.rule == LrpRule::epsilon ? params.epsilon : Scalar(0);
    Vec<Scalar> s(units);
    for (Eigen::Index j = 0; j < units; ++j) {
      if (r_out(j) == Scalar(0)) {
        s(j) = Scalar(0);
        continue;
      }
      const Scalar denom = z(j) + (z(j) >= Scalar(0) ? eps : -eps);
      if (denom == Scalar(0)) throw ZeroDenominator();
      s(j) = r_out(j) / denom;
    }
    Vec<Scalar> c(weight.cols());
    c.noalias() = weight.transpose() * s;
    return x.cwiseProduct(c);
  }

  const Vec<Scalar> xp = x.cwiseMax(Scalar(0));
  const Vec<Scalar> xn = x.cwiseMin(Scalar(0));
  const Mat<Scalar> wp = weight.cwiseMax(Scalar(0));
  const Mat<Scalar> wn = weight.cwiseMin(Scalar(0));
  Vec<Scalar> zp = wp * xp + wn * xn + bias.cwiseMax(Scalar(0));
  Vec<Scalar> zn = wn * xp + wp * xn + bias.cwiseMin(Scalar(0));
  Vec<Scalar> sp(units), sn(units);
  for (Eigen::Index j = 0; j < units; ++j) {
    sp(j) = zp(j) > Scalar(0) ? params.alpha * r_out(j) / zp(j) : Scalar(0);
    sn(j) = zn(j) < Scalar(0) ? params.beta * r_out(j) / zn(j) : Scalar(0);
  }
  Vec<Scalar> out = xp.cwiseProduct(wp.transpose() * sp) + xn.cwiseProduct(wn.transpose() * sp);
  out -= xp.cwiseProduct(wn.transpose() * sn) + xn.cwiseProduct(wp.transpose() * sn);
  return out;
}

/// Relevance through a valid stride-1 convolution: each output position is
/// an affine map of its window, and window contributions accumulate.
template <typename DerivedW, typename DerivedB, typename DerivedX, typename DerivedZ, typename DerivedR>
Vec<typename DerivedX::Scalar> lrp_conv1d(const Eigen::MatrixBase<DerivedW>& weight,
                                          const Eigen::MatrixBase<DerivedB>& bias,
                                          const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedZ>& z,
                                          const Eigen::MatrixBase<DerivedR>& r_out, Eigen::Index in_channels,
                                          const LrpParams<typename DerivedX::Scalar>& params) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index out_ch = weight.rows();
  const Eigen::Index window = weight.cols();
  const Eigen::Index out_len = z.rows() / out_ch;
  Vec<Scalar> r_in = Vec<Scalar>::Zero(x.rows());
  for (Eigen::Index p = 0; p < out_len; ++p) {
    r_in.segment(p * in_channels, window) +=
        lrp_affine(weight, bias, x.segment(p * in_channels, window), z.segment(p * out_ch, out_ch),
                   r_out.segment(p * out_ch, out_ch), params);
  }
  return r_in;
}

}  // namespace tabxai::kernels
