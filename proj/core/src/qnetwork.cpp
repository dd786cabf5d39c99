#include "attacksim/qnetwork.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

#include "attacksim/errors.hpp"

namespace attacksim {

namespace {

constexpr char kMagic[4] = {'A', 'Q', 'N', 'W'};

template <typename T>
void check_input(const QNetworkT<T>& net, std::size_t x_size) {
  if (static_cast<int>(x_size) != net.in_dim)
    throw Error("qnetwork: input size mismatch");
}

}  // namespace

template <typename T>
QNetworkT<T> QNetworkT<T>::xavier(int in, int hidden, int out, Rng& rng) {
  if (in <= 0 || hidden <= 0 || out <= 0)
    throw Error("qnetwork: dimensions must be positive");
  QNetworkT net;
  net.in_dim = in;
  net.hidden_dim = hidden;
  net.out_dim = out;
  net.w1.resize(static_cast<std::size_t>(hidden) * static_cast<std::size_t>(in));
  net.b1.assign(static_cast<std::size_t>(hidden), T(0));
  net.w2.resize(static_cast<std::size_t>(out) * static_cast<std::size_t>(hidden));
  net.b2.assign(static_cast<std::size_t>(out), T(0));
  const double lim1 = std::sqrt(6.0 / (in + hidden));
  const double lim2 = std::sqrt(6.0 / (hidden + out));
  for (T& w : net.w1) w = static_cast<T>((2.0 * uniform_double(rng) - 1.0) * lim1);
  for (T& w : net.w2) w = static_cast<T>((2.0 * uniform_double(rng) - 1.0) * lim2);
  return net;
}

template <typename T>
void QNetworkT<T>::forward_cached(std::span<const T> x, std::span<T> hidden_out,
                                  std::span<T> q_out) const {
  check_input(*this, x.size());
  for (int j = 0; j < hidden_dim; ++j) {
    T z = b1[static_cast<std::size_t>(j)];
    const T* row = w1.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(in_dim);
    for (int i = 0; i < in_dim; ++i) z += row[i] * x[static_cast<std::size_t>(i)];
    hidden_out[static_cast<std::size_t>(j)] = z > T(0) ? z : T(0);
  }
  for (int o = 0; o < out_dim; ++o) {
    T q = b2[static_cast<std::size_t>(o)];
    const T* row = w2.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(hidden_dim);
    for (int j = 0; j < hidden_dim; ++j) q += row[j] * hidden_out[static_cast<std::size_t>(j)];
    q_out[static_cast<std::size_t>(o)] = q;
  }
}

template <typename T>
std::vector<T> QNetworkT<T>::forward(std::span<const T> x) const {
  std::vector<T> hidden(static_cast<std::size_t>(hidden_dim));
  std::vector<T> q(static_cast<std::size_t>(out_dim));
  forward_cached(x, hidden, q);
  return q;
}

template <typename T>
std::size_t QNetworkT<T>::param_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

template <typename T>
QNetGrad<T> QNetGrad<T>::zeros_like(const QNetworkT<T>& net) {
  QNetGrad g;
  g.w1.assign(net.w1.size(), T(0));
  g.b1.assign(net.b1.size(), T(0));
  g.w2.assign(net.w2.size(), T(0));
  g.b2.assign(net.b2.size(), T(0));
  return g;
}

template <typename T>
void QNetGrad<T>::zero() {
  std::fill(w1.begin(), w1.end(), T(0));
  std::fill(b1.begin(), b1.end(), T(0));
  std::fill(w2.begin(), w2.end(), T(0));
  std::fill(b2.begin(), b2.end(), T(0));
}

template <typename T>
T batch_loss(const QNetworkT<T>& net, std::span<const T> states,
             std::span<const int> actions, std::span<const T> targets) {
  const std::size_t batch = actions.size();
  if (batch == 0 || targets.size() != batch ||
      states.size() != batch * static_cast<std::size_t>(net.in_dim))
    throw Error("qnetwork: bad batch shape");
  std::vector<T> hidden(static_cast<std::size_t>(net.hidden_dim));
  std::vector<T> q(static_cast<std::size_t>(net.out_dim));
  T loss = T(0);
  for (std::size_t s = 0; s < batch; ++s) {
    net.forward_cached(states.subspan(s * static_cast<std::size_t>(net.in_dim),
                                      static_cast<std::size_t>(net.in_dim)),
                       hidden, q);
    const int a = actions[s];
    if (a < 0 || a >= net.out_dim) throw Error("qnetwork: action out of range");
    const T diff = targets[s] - q[static_cast<std::size_t>(a)];
    loss += diff * diff;
  }
  return loss / static_cast<T>(batch);
}

template <typename T>
T batch_loss_grad(const QNetworkT<T>& net, std::span<const T> states,
                  std::span<const int> actions, std::span<const T> targets,
                  QNetGrad<T>& grad) {
  const std::size_t batch = actions.size();
  if (batch == 0 || targets.size() != batch ||
      states.size() != batch * static_cast<std::size_t>(net.in_dim))
    throw Error("qnetwork: bad batch shape");
  grad.zero();
  std::vector<T> hidden(static_cast<std::size_t>(net.hidden_dim));
  std::vector<T> q(static_cast<std::size_t>(net.out_dim));
  T loss = T(0);
  for (std::size_t s = 0; s < batch; ++s) {
    const auto x = states.subspan(s * static_cast<std::size_t>(net.in_dim),
                                  static_cast<std::size_t>(net.in_dim));
    net.forward_cached(x, hidden, q);
    const int a = actions[s];
    if (a < 0 || a >= net.out_dim) throw Error("qnetwork: action out of range");
    const T diff = targets[s] - q[static_cast<std::size_t>(a)];
    loss += diff * diff;
    // d(mean loss)/dq[a] for this sample; other outputs contribute nothing.
    const T dq = T(-2) * diff / static_cast<T>(batch);

    T* gw2 = grad.w2.data() + static_cast<std::size_t>(a) * static_cast<std::size_t>(net.hidden_dim);
    const T* w2row = net.w2.data() + static_cast<std::size_t>(a) * static_cast<std::size_t>(net.hidden_dim);
    grad.b2[static_cast<std::size_t>(a)] += dq;
    for (int j = 0; j < net.hidden_dim; ++j) {
      const T h = hidden[static_cast<std::size_t>(j)];
      gw2[j] += dq * h;
      if (h > T(0)) {
        const T dz = dq * w2row[j];
        grad.b1[static_cast<std::size_t>(j)] += dz;
        T* gw1 = grad.w1.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(net.in_dim);
        for (int i = 0; i < net.in_dim; ++i) gw1[i] += dz * x[static_cast<std::size_t>(i)];
      }
    }
  }
  return loss / static_cast<T>(batch);
}

template <typename T>
void rmsprop_update(std::span<T> params, std::span<const T> grads,
                    std::span<T> mean_square, T lr, T rho, T eps) {
  if (params.size() != grads.size() || params.size() != mean_square.size())
    throw Error("rmsprop: size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    T& m = mean_square[i];
    m = rho * m + (T(1) - rho) * g * g;
    params[i] -= lr * g / std::sqrt(m + eps);
  }
}

template <typename T>
RmspropState<T> RmspropState<T>::zeros_like(const QNetworkT<T>& net) {
  RmspropState s;
  s.w1.assign(net.w1.size(), T(0));
  s.b1.assign(net.b1.size(), T(0));
  s.w2.assign(net.w2.size(), T(0));
  s.b2.assign(net.b2.size(), T(0));
  return s;
}

template <typename T>
void rmsprop_step(QNetworkT<T>& net, const QNetGrad<T>& grad, RmspropState<T>& opt,
                  T lr, T rho, T eps) {
  rmsprop_update<T>(net.w1, grad.w1, opt.w1, lr, rho, eps);
  rmsprop_update<T>(net.b1, grad.b1, opt.b1, lr, rho, eps);
  rmsprop_update<T>(net.w2, grad.w2, opt.w2, lr, rho, eps);
  rmsprop_update<T>(net.b2, grad.b2, opt.b2, lr, rho, eps);
}

namespace {

template <typename T>
void write_block(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_block(std::istream& in, std::vector<T>& v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(T)));
  if (!in) throw ParseError("qnetwork checkpoint: truncated data");
}

}  // namespace

template <typename T>
void save_qnetwork(std::ostream& out, const QNetworkT<T>& net) {
  out.write(kMagic, 4);
  const std::uint32_t width = sizeof(T);
  const std::int32_t dims[3] = {net.in_dim, net.hidden_dim, net.out_dim};
  out.write(reinterpret_cast<const char*>(&width), sizeof width);
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  write_block(out, net.w1);
  write_block(out, net.b1);
  write_block(out, net.w2);
  write_block(out, net.b2);
}

template <typename T>
QNetworkT<T> load_qnetwork(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("qnetwork checkpoint: bad magic");
  std::uint32_t width = 0;
  std::int32_t dims[3] = {};
  in.read(reinterpret_cast<char*>(&width), sizeof width);
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in) throw ParseError("qnetwork checkpoint: truncated header");
  if (width != sizeof(T))
    throw ParseError("qnetwork checkpoint: element width mismatch");
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
    throw ParseError("qnetwork checkpoint: bad dimensions");
  QNetworkT<T> net;
  net.in_dim = dims[0];
  net.hidden_dim = dims[1];
  net.out_dim = dims[2];
  net.w1.resize(static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[0]));
  net.b1.resize(static_cast<std::size_t>(dims[1]));
  net.w2.resize(static_cast<std::size_t>(dims[2]) * static_cast<std::size_t>(dims[1]));
  net.b2.resize(static_cast<std::size_t>(dims[2]));
  read_block(in, net.w1);
  read_block(in, net.b1);
  read_block(in, net.w2);
  read_block(in, net.b2);
  return net;
}

template struct QNetworkT<float>;
template struct QNetworkT<double>;
template struct QNetGrad<float>;
template struct QNetGrad<double>;
template struct RmspropState<float>;
template struct RmspropState<double>;

template float batch_loss<float>(const QNetworkT<float>&, std::span<const float>,
                                 std::span<const int>, std::span<const float>);
template double batch_loss<double>(const QNetworkT<double>&, std::span<const double>,
                                   std::span<const int>, std::span<const double>);
template float batch_loss_grad<float>(const QNetworkT<float>&, std::span<const float>,
                                      std::span<const int>, std::span<const float>,
                                      QNetGrad<float>&);
template double batch_loss_grad<double>(const QNetworkT<double>&,
                                        std::span<const double>, std::span<const int>,
                                        std::span<const double>, QNetGrad<double>&);
template void rmsprop_update<float>(std::span<float>, std::span<const float>,
                                    std::span<float>, float, float, float);
template void rmsprop_update<double>(std::span<double>, std::span<const double>,
                                     std::span<double>, double, double, double);
template void rmsprop_step<float>(QNetworkT<float>&, const QNetGrad<float>&,
                                  RmspropState<float>&, float, float, float);
template void rmsprop_step<double>(QNetworkT<double>&, const QNetGrad<double>&,
                                   RmspropState<double>&, double, double, double);
template void save_qnetwork<float>(std::ostream&, const QNetworkT<float>&);
template void save_qnetwork<double>(std::ostream&, const QNetworkT<double>&);
template QNetworkT<float> load_qnetwork<float>(std::istream&);
template QNetworkT<double> load_qnetwork<double>(std::istream&);

}  // namespace attacksim
