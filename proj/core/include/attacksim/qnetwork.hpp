#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "attacksim/rng.hpp"

namespace attacksim {

// One-hidden-layer fully connected action value network:
// q = W2 * relu(W1 * x + b1) + b2.  Weights are row major.  The
// template parameter picks the arithmetic: float for training,
// double for test oracles.
template <typename T>
struct QNetworkT {
  int in_dim = 0;
  int hidden_dim = 0;
  int out_dim = 0;
  std::vector<T> w1;  // hidden x in
  std::vector<T> b1;  // hidden
  std::vector<T> w2;  // out x hidden
  std::vector<T> b2;  // out

  // Glorot-style init: weights uniform in +-sqrt(6/(fan_in+fan_out)),
  // biases zero.
  static QNetworkT xavier(int in, int hidden, int out, Rng& rng);

  std::vector<T> forward(std::span<const T> x) const;

  // Forward pass that also exposes the post-relu hidden activations
  // needed for backprop.
  void forward_cached(std::span<const T> x, std::span<T> hidden_out,
                      std::span<T> q_out) const;

  std::size_t param_count() const;

  bool operator==(const QNetworkT&) const = default;
};

template <typename T>
struct QNetGrad {
  std::vector<T> w1, b1, w2, b2;
  static QNetGrad zeros_like(const QNetworkT<T>& net);
  void zero();
};

// Mean over the batch of (target - q(state)[action])^2.  States are
// packed row major, one row per sample.
template <typename T>
T batch_loss(const QNetworkT<T>& net, std::span<const T> states,
             std::span<const int> actions, std::span<const T> targets);

// Same loss, plus its analytic gradient with respect to every
// parameter (overwrites `grad`).
template <typename T>
T batch_loss_grad(const QNetworkT<T>& net, std::span<const T> states,
                  std::span<const int> actions, std::span<const T> targets,
                  QNetGrad<T>& grad);

// Element-wise update: m <- rho*m + (1-rho)*g^2; p <- p - lr*g/sqrt(m+eps).
template <typename T>
void rmsprop_update(std::span<T> params, std::span<const T> grads,
                    std::span<T> mean_square, T lr, T rho, T eps);

template <typename T>
struct RmspropState {
  std::vector<T> w1, b1, w2, b2;
  static RmspropState zeros_like(const QNetworkT<T>& net);
};

template <typename T>
void rmsprop_step(QNetworkT<T>& net, const QNetGrad<T>& grad,
                  RmspropState<T>& opt, T lr, T rho, T eps);

// Binary checkpoint: magic, element width, the three dimensions,
// then the flat parameter arrays in layer order.
template <typename T>
void save_qnetwork(std::ostream& out, const QNetworkT<T>& net);

template <typename T>
QNetworkT<T> load_qnetwork(std::istream& in);

extern template struct QNetworkT<float>;
extern template struct QNetworkT<double>;
extern template struct QNetGrad<float>;
extern template struct QNetGrad<double>;
extern template struct RmspropState<float>;
extern template struct RmspropState<double>;

extern template float batch_loss<float>(const QNetworkT<float>&, std::span<const float>,
                                        std::span<const int>, std::span<const float>);
extern template double batch_loss<double>(const QNetworkT<double>&,
                                          std::span<const double>, std::span<const int>,
                                          std::span<const double>);
extern template float batch_loss_grad<float>(const QNetworkT<float>&,
                                             std::span<const float>, std::span<const int>,
                                             std::span<const float>, QNetGrad<float>&);
extern template double batch_loss_grad<double>(const QNetworkT<double>&,
                                               std::span<const double>,
                                               std::span<const int>,
                                               std::span<const double>, QNetGrad<double>&);
extern template void rmsprop_update<float>(std::span<float>, std::span<const float>,
                                           std::span<float>, float, float, float);
extern template void rmsprop_update<double>(std::span<double>, std::span<const double>,
                                            std::span<double>, double, double, double);
extern template void rmsprop_step<float>(QNetworkT<float>&, const QNetGrad<float>&,
                                         RmspropState<float>&, float, float, float);
extern template void rmsprop_step<double>(QNetworkT<double>&, const QNetGrad<double>&,
                                          RmspropState<double>&, double, double, double);
extern template void save_qnetwork<float>(std::ostream&, const QNetworkT<float>&);
extern template void save_qnetwork<double>(std::ostream&, const QNetworkT<double>&);
extern template QNetworkT<float> load_qnetwork<float>(std::istream&);
extern template QNetworkT<double> load_qnetwork<double>(std::istream&);

}  // namespace attacksim
