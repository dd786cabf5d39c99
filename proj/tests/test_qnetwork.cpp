#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "attacksim/errors.hpp"
#include "attacksim/qnetwork.hpp"
#include "doctest.h"

using namespace attacksim;

namespace {

QNetworkT<double> tiny_net() {
  QNetworkT<double> net;
  net.in_dim = 1;
  net.hidden_dim = 1;
  net.out_dim = 1;
  net.w1 = {2.0};
  net.b1 = {0.5};
  net.w2 = {3.0};
  net.b2 = {-1.0};
  return net;
}

// Forward pass written out longhand, used as the oracle.
std::vector<double> slow_forward(const QNetworkT<double>& net,
                                 std::span<const double> x) {
  std::vector<double> hidden(static_cast<std::size_t>(net.hidden_dim));
  for (int j = 0; j < net.hidden_dim; ++j) {
    double z = net.b1[static_cast<std::size_t>(j)];
    for (int i = 0; i < net.in_dim; ++i) {
      z += net.w1[static_cast<std::size_t>(j * net.in_dim + i)] *
           x[static_cast<std::size_t>(i)];
    }
    hidden[static_cast<std::size_t>(j)] = z > 0.0 ? z : 0.0;
  }
  std::vector<double> out(static_cast<std::size_t>(net.out_dim));
  for (int k = 0; k < net.out_dim; ++k) {
    double z = net.b2[static_cast<std::size_t>(k)];
    for (int j = 0; j < net.hidden_dim; ++j) {
      z += net.w2[static_cast<std::size_t>(k * net.hidden_dim + j)] *
           hidden[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(k)] = z;
  }
  return out;
}

double loss_at(const QNetworkT<double>& net, std::span<const double> states,
               std::span<const int> actions, std::span<const double> targets) {
  return batch_loss(net, states, actions, targets);
}

}  // namespace

TEST_CASE("the hidden layer clamps at zero") {
  QNetworkT<double> net = tiny_net();
  std::vector<double> pos{1.0};
  CHECK(net.forward(pos)[0] == doctest::Approx(3.0 * 2.5 - 1.0));
  std::vector<double> neg{-2.0};
  CHECK(net.forward(neg)[0] == doctest::Approx(-1.0));
}

TEST_CASE("zero weights mean a constant output") {
  QNetworkT<double> net = tiny_net();
  net.w1 = {0.0};
  net.b1 = {0.0};
  net.w2 = {0.0};
  net.b2 = {0.0};
  std::vector<double> x{123.0};
  CHECK(net.forward(x)[0] == 0.0);
}

TEST_CASE("forward matches a longhand reimplementation") {
  Rng rng(31);
  QNetworkT<double> net = QNetworkT<double>::xavier(6, 4, 3, rng);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(6);
    for (double& v : x) v = 2.0 * uniform_double(rng) - 1.0;
    auto fast = net.forward(x);
    auto slow = slow_forward(net, x);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("cached forward agrees and exposes activations") {
  Rng rng(32);
  QNetworkT<double> net = QNetworkT<double>::xavier(5, 3, 2, rng);
  std::vector<double> x{0.5, -0.25, 1.0, 0.0, -1.0};
  std::vector<double> hidden(3);
  std::vector<double> q(2);
  net.forward_cached(x, hidden, q);
  auto direct = net.forward(x);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(q[i] == doctest::Approx(direct[i]).epsilon(1e-12));
  }
  for (double h : hidden) CHECK(h >= 0.0);
}

TEST_CASE("initialization respects the fan based bounds") {
  Rng rng(7);
  QNetworkT<float> net = QNetworkT<float>::xavier(20, 30, 10, rng);
  const double lim1 = std::sqrt(6.0 / (20 + 30));
  const double lim2 = std::sqrt(6.0 / (30 + 10));
  double sum1 = 0.0;
  for (float w : net.w1) {
    CHECK(std::abs(w) <= lim1);
    sum1 += w;
  }
  for (float w : net.w2) CHECK(std::abs(w) <= lim2);
  for (float b : net.b1) CHECK(b == 0.0f);
  for (float b : net.b2) CHECK(b == 0.0f);
  // Loose symmetry check on the sample mean.
  CHECK(std::abs(sum1 / static_cast<double>(net.w1.size())) < lim1 / 10.0);

  Rng again(7);
  QNetworkT<float> copy = QNetworkT<float>::xavier(20, 30, 10, again);
  CHECK(copy == net);
  CHECK(net.param_count() == 20 * 30 + 30 + 30 * 10 + 10);
  CHECK_THROWS_AS((void)QNetworkT<float>::xavier(0, 3, 2, rng), Error);
}

TEST_CASE("batch loss is the mean squared error on chosen actions") {
  QNetworkT<double> net = tiny_net();
  std::vector<double> states{1.0, -2.0};  // two rows of one feature
  std::vector<int> actions{0, 0};
  std::vector<double> targets{7.5, 0.0};
  // Outputs are 6.5 and -1, so the loss is ((1)^2 + (1)^2) / 2.
  CHECK(batch_loss<double>(net, states, actions, targets) ==
        doctest::Approx(1.0));
  std::vector<int> bad{1, 0};
  CHECK_THROWS_AS(
      (void)batch_loss<double>(net, states, bad, targets), Error);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(101);
  QNetworkT<double> net = QNetworkT<double>::xavier(6, 4, 3, rng);
  const int batch = 5;
  std::vector<double> states(static_cast<std::size_t>(batch) * 6);
  std::vector<int> actions(batch);
  std::vector<double> targets(batch);
  for (double& v : states) v = 2.0 * uniform_double(rng) - 1.0;
  for (int b = 0; b < batch; ++b) {
    actions[static_cast<std::size_t>(b)] =
        static_cast<int>(uniform_index(rng, 3));
    targets[static_cast<std::size_t>(b)] = 2.0 * uniform_double(rng) - 1.0;
  }

  // Keep the check away from the relu kink.
  for (int b = 0; b < batch; ++b) {
    std::vector<double> hidden(4);
    std::vector<double> q(3);
    net.forward_cached(
        std::span<const double>(states).subspan(
            static_cast<std::size_t>(b) * 6, 6),
        hidden, q);
    for (int j = 0; j < 4; ++j) {
      double z = net.b1[static_cast<std::size_t>(j)];
      for (int i = 0; i < 6; ++i) {
        z += net.w1[static_cast<std::size_t>(j * 6 + i)] *
             states[static_cast<std::size_t>(b * 6 + i)];
      }
      REQUIRE(std::abs(z) > 1e-3);
    }
  }

  QNetGrad<double> grad = QNetGrad<double>::zeros_like(net);
  double loss = batch_loss_grad<double>(net, states, actions, targets, grad);
  CHECK(loss == doctest::Approx(loss_at(net, states, actions, targets)));

  const double h = 1e-6;
  auto check_block = [&](std::vector<double>& params,
                         const std::vector<double>& grads) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + h;
      const double up = loss_at(net, states, actions, targets);
      params[i] = keep - h;
      const double down = loss_at(net, states, actions, targets);
      params[i] = keep;
      const double fd = (up - down) / (2.0 * h);
      const double scale = std::max({std::abs(fd), std::abs(grads[i]), 1e-6});
      CHECK(std::abs(fd - grads[i]) / scale < 1e-5);
    }
  };
  check_block(net.w1, grad.w1);
  check_block(net.b1, grad.b1);
  check_block(net.w2, grad.w2);
  check_block(net.b2, grad.b2);
}

TEST_CASE("zero gradient leaves parameters untouched") {
  std::vector<double> params{1.0, -2.0, 3.0};
  std::vector<double> grads{0.0, 0.0, 0.0};
  std::vector<double> mean_square{0.0, 0.0, 0.0};
  rmsprop_update<double>(params, grads, mean_square, 0.1, 0.9, 1e-8);
  CHECK(params == std::vector<double>{1.0, -2.0, 3.0});
  CHECK(mean_square == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("the first update uses the damping inside the square root") {
  std::vector<double> params{0.0};
  std::vector<double> grads{1.0};
  std::vector<double> mean_square{0.0};
  const double lr = 0.01, rho = 0.9, eps = 1e-8;
  rmsprop_update<double>(params, grads, mean_square, lr, rho, eps);
  // m becomes 0.1; the step is lr / sqrt(0.1 + eps).
  CHECK(mean_square[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(params[0] ==
        doctest::Approx(-lr / std::sqrt(0.1 + eps)).epsilon(1e-12));

  // A vanishing gradient from scratch: the damping keeps the step
  // proportional to the gradient instead of blowing it up.
  std::vector<double> p2{0.0};
  std::vector<double> g2{1e-10};
  std::vector<double> m2{0.0};
  rmsprop_update<double>(p2, g2, m2, lr, rho, eps);
  const double expect = -lr * 1e-10 / std::sqrt(0.1 * 1e-20 + eps);
  CHECK(p2[0] == doctest::Approx(expect).epsilon(1e-10));
  CHECK(std::abs(p2[0]) < lr * 1e-5);
}

TEST_CASE("steady gradients settle near the plain learning rate") {
  std::vector<double> params{0.0};
  std::vector<double> grads{1.0};
  std::vector<double> mean_square{0.0};
  const double lr = 0.01, rho = 0.9, eps = 1e-8;
  double prev = params[0];
  for (int i = 0; i < 2000; ++i) {
    rmsprop_update<double>(params, grads, mean_square, lr, rho, eps);
    REQUIRE(mean_square[0] >= 0.0);
    REQUIRE(params[0] < prev);
    prev = params[0];
  }
  CHECK(mean_square[0] == doctest::Approx(1.0).epsilon(1e-6));
  double before = params[0];
  rmsprop_update<double>(params, grads, mean_square, lr, rho, eps);
  CHECK(before - params[0] == doctest::Approx(lr).epsilon(1e-6));
}

TEST_CASE("the optimizer step touches every parameter block") {
  Rng rng(1);
  QNetworkT<double> net = QNetworkT<double>::xavier(3, 2, 2, rng);
  QNetworkT<double> before = net;
  QNetGrad<double> grad = QNetGrad<double>::zeros_like(net);
  for (double& g : grad.w1) g = 1.0;
  for (double& g : grad.b1) g = 1.0;
  for (double& g : grad.w2) g = 1.0;
  for (double& g : grad.b2) g = 1.0;
  RmspropState<double> opt = RmspropState<double>::zeros_like(net);
  rmsprop_step(net, grad, opt, 0.01, 0.9, 1e-8);
  for (std::size_t i = 0; i < net.w1.size(); ++i)
    CHECK(net.w1[i] < before.w1[i]);
  for (std::size_t i = 0; i < net.b1.size(); ++i)
    CHECK(net.b1[i] < before.b1[i]);
  for (std::size_t i = 0; i < net.w2.size(); ++i)
    CHECK(net.w2[i] < before.w2[i]);
  for (std::size_t i = 0; i < net.b2.size(); ++i)
    CHECK(net.b2[i] < before.b2[i]);
}

TEST_CASE("checkpoints round trip bit for bit") {
  Rng rng(55);
  QNetworkT<float> net = QNetworkT<float>::xavier(7, 5, 4, rng);
  std::ostringstream out(std::ios::binary);
  save_qnetwork(out, net);
  std::istringstream in(out.str(), std::ios::binary);
  QNetworkT<float> back = load_qnetwork<float>(in);
  CHECK(back == net);

  QNetworkT<double> dnet = QNetworkT<double>::xavier(3, 2, 2, rng);
  std::ostringstream dout(std::ios::binary);
  save_qnetwork(dout, dnet);
  std::istringstream din(dout.str(), std::ios::binary);
  CHECK(load_qnetwork<double>(din) == dnet);

  std::istringstream junk("nope", std::ios::binary);
  CHECK_THROWS_AS((void)load_qnetwork<float>(junk), ParseError);
  // A float checkpoint must not load as double.
  std::istringstream wrong(out.str(), std::ios::binary);
  CHECK_THROWS_AS((void)load_qnetwork<double>(wrong), ParseError);
  std::string truncated = out.str().substr(0, 20);
  std::istringstream cut(truncated, std::ios::binary);
  CHECK_THROWS_AS((void)load_qnetwork<float>(cut), ParseError);
}

TEST_CASE("training on a fixed batch drives the loss down") {
  Rng rng(77);
  QNetworkT<double> net = QNetworkT<double>::xavier(4, 8, 3, rng);
  const int batch = 6;
  std::vector<double> states(static_cast<std::size_t>(batch) * 4);
  std::vector<int> actions(batch);
  std::vector<double> targets(batch);
  for (double& v : states) v = 2.0 * uniform_double(rng) - 1.0;
  for (int b = 0; b < batch; ++b) {
    actions[static_cast<std::size_t>(b)] =
        static_cast<int>(uniform_index(rng, 3));
    targets[static_cast<std::size_t>(b)] = 4.0 * uniform_double(rng) - 2.0;
  }
  QNetGrad<double> grad = QNetGrad<double>::zeros_like(net);
  RmspropState<double> opt = RmspropState<double>::zeros_like(net);
  const double initial = batch_loss<double>(net, states, actions, targets);
  double last = initial;
  for (int step = 0; step < 200; ++step) {
    last = batch_loss_grad<double>(net, states, actions, targets, grad);
    rmsprop_step(net, grad, opt, 0.01, 0.9, 1e-8);
  }
  const double final_loss = batch_loss<double>(net, states, actions, targets);
  CHECK(last < initial);
  CHECK(final_loss < 0.5 * initial);
}
