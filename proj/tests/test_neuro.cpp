#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "beetle/neuro.hpp"

using namespace beetle::neuro;

TEST_CASE("transfer functions") {
  CHECK(apply_transfer(Tanh{}, 0.0) == 0.0);
  CHECK(apply_transfer(Tanh{}, 0.5) == std::tanh(0.5));
  CHECK(apply_transfer(Step{0.0}, -0.1) == 0.0);
  CHECK(apply_transfer(Step{0.0}, 0.0) == 1.0);
  CHECK(apply_transfer(Step{0.3}, 0.29) == 0.0);
  CHECK(apply_transfer(PiecewiseLinear{-1.0, 1.0}, 2.5) == 1.0);
  CHECK(apply_transfer(PiecewiseLinear{-1.0, 1.0}, -2.5) == -1.0);
  CHECK(apply_transfer(PiecewiseLinear{0.0, 2.0}, 0.7) == 0.7);
  CHECK(apply_transfer(Rectifier{10.0}, 15.0) == 5.0);
  CHECK(apply_transfer(Rectifier{10.0}, 3.0) == 0.0);
}

TEST_CASE("single neuron with bias") {
  auto spec = NetworkSpec::with_size(1);
  spec.biases[0] = 0.5;
  auto s = step_network(spec, NetworkState::zeros(spec));
  CHECK(s.activations[0] == 0.5);
  CHECK(s.outputs[0] == doctest::Approx(0.46212).epsilon(1e-5));
  CHECK(s.tick == 1);
}

TEST_CASE("hand-iterated sequences match over 1000 ticks") {
  SUBCASE("self-coupled neuron") {
    auto spec = NetworkSpec::with_size(1);
    spec.weight(0, 0) = 1.3;
    spec.biases[0] = -0.2;
    auto s = NetworkState::from_activations(spec, {0.4});
    double o = std::tanh(0.4);
    for (int t = 0; t < 1000; ++t) {
      o = std::tanh(1.3 * o - 0.2);
      step_network_inplace(spec, s);
      REQUIRE(std::abs(s.outputs[0] - o) <= 1e-12);
    }
  }
  SUBCASE("two-neuron rotation") {
    auto spec = NetworkSpec::with_size(2);
    const double w00 = 1.4, w01 = 0.18, w10 = -0.18, w11 = 1.4;
    spec.weight(0, 0) = w00;
    spec.weight(0, 1) = w01;
    spec.weight(1, 0) = w10;
    spec.weight(1, 1) = w11;
    spec.biases = {0.01, -0.01};
    auto s = NetworkState::from_activations(spec, {0.1, 0.0});
    double o0 = std::tanh(0.1), o1 = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const double a0 = w00 * o0 + w01 * o1 + 0.01;
      const double a1 = w10 * o0 + w11 * o1 - 0.01;
      o0 = std::tanh(a0);
      o1 = std::tanh(a1);
      s = step_network(spec, s);
      REQUIRE(std::abs(s.outputs[0] - o0) <= 1e-12);
      REQUIRE(std::abs(s.outputs[1] - o1) <= 1e-12);
    }
  }
}

TEST_CASE("zero network stays at zero") {
  auto spec = NetworkSpec::with_size(4);
  auto s = NetworkState::zeros(spec);
  for (int t = 0; t < 200; ++t) step_network_inplace(spec, s);
  for (double o : s.outputs) CHECK(o == 0.0);
}

TEST_CASE("external inputs add to the designated neurons") {
  auto spec = NetworkSpec::with_size(2);
  spec.input_indices = {1};
  const std::vector<double> in{0.75};
  auto s = step_network(spec, NetworkState::zeros(spec), in);
  CHECK(s.activations[0] == 0.0);
  CHECK(s.activations[1] == 0.75);
}

TEST_CASE("update is synchronous under index permutation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const std::size_t n = 5;
  auto spec = NetworkSpec::with_size(n);
  for (auto& w : spec.weights) w = u(rng);
  for (auto& b : spec.biases) b = 0.3 * u(rng);
  spec.transfer[2] = PiecewiseLinear{-0.5, 0.5};
  spec.transfer[4] = Step{0.1};
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};  // new index k holds old neuron perm[k]
  auto pspec = NetworkSpec::with_size(n);
  for (std::size_t i = 0; i < n; ++i) {
    pspec.biases[i] = spec.biases[perm[i]];
    pspec.transfer[i] = spec.transfer[perm[i]];
    for (std::size_t j = 0; j < n; ++j) pspec.weight(i, j) = spec.weight(perm[i], perm[j]);
  }
  std::vector<double> a0(n);
  for (auto& a : a0) a = u(rng);
  std::vector<double> pa0(n);
  for (std::size_t i = 0; i < n; ++i) pa0[i] = a0[perm[i]];
  auto s = NetworkState::from_activations(spec, a0);
  auto ps = NetworkState::from_activations(pspec, pa0);
  for (int t = 0; t < 300; ++t) {
    step_network_inplace(spec, s);
    step_network_inplace(pspec, ps);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(ps.outputs[i] - s.outputs[perm[i]]) <= 1e-12);
  }
}

TEST_CASE("outputs stay in their transfer ranges") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto spec = NetworkSpec::with_size(6);
  for (auto& w : spec.weights) w = u(rng);
  for (auto& b : spec.biases) b = u(rng);
  spec.transfer[1] = Step{0.0};
  spec.transfer[2] = PiecewiseLinear{-0.2, 0.4};
  auto s = NetworkState::zeros(spec);
  for (int t = 0; t < 500; ++t) {
    step_network_inplace(spec, s);
    for (std::size_t i : {0, 3, 4, 5}) REQUIRE(std::abs(s.outputs[i]) <= 1.0);
    REQUIRE((s.outputs[1] == 0.0 || s.outputs[1] == 1.0));
    REQUIRE(s.outputs[2] >= -0.2);
    REQUIRE(s.outputs[2] <= 0.4);
  }
}

TEST_CASE("determinism") {
  auto spec = NetworkSpec::with_size(3);
  spec.weights = {0.2, 1.1, -0.4, 0.9, -1.2, 0.3, 0.5, 0.5, 0.5};
  auto a = NetworkState::from_activations(spec, {0.1, 0.2, 0.3});
  auto b = a;
  for (int t = 0; t < 400; ++t) {
    step_network_inplace(spec, a);
    step_network_inplace(spec, b);
  }
  CHECK(a.outputs == b.outputs);
  CHECK(a.activations == b.activations);
}

TEST_CASE("configuration errors") {
  auto spec = NetworkSpec::with_size(2);
  spec.biases.pop_back();
  CHECK_THROWS_AS(spec.validate(), ConfigurationError);
  auto bad_index = NetworkSpec::with_size(2);
  bad_index.output_indices = {5};
  CHECK_THROWS_AS(bad_index.validate(), ConfigurationError);
  auto ok = NetworkSpec::with_size(2);
  NetworkState wrong;
  wrong.activations = {0.0};
  wrong.outputs = {0.0};
  CHECK_THROWS_AS(step_network(ok, wrong), ConfigurationError);
  auto inputs = NetworkSpec::with_size(2);
  inputs.input_indices = {0};
  CHECK_THROWS_AS(step_network(inputs, NetworkState::zeros(inputs), std::vector<double>{1.0, 2.0}),
                  ConfigurationError);
}

TEST_CASE("non-finite activation raises a numeric fault naming the neuron") {
  auto spec = NetworkSpec::with_size(3);
  spec.transfer[1] = PiecewiseLinear{-1e308, 1e308};
  spec.weight(1, 1) = 1e200;
  auto s = NetworkState::from_activations(spec, {0.0, 1e200, 0.0});
  try {
    step_network_inplace(spec, s);
    FAIL("expected NumericFault");
  } catch (const NumericFault& e) {
    CHECK(e.neuron() == 1);
  }
}
