#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace beetle::neuro {

struct Tanh {};

/// Binary threshold unit: 1 when x >= threshold, 0 otherwise.
struct Step {
  double threshold = 0.0;
};

/// Saturating linear unit, clamps into [lo, hi].
struct PiecewiseLinear {
  double lo = -1.0;
  double hi = 1.0;
};

/// max(0, x - bias)
struct Rectifier {
  double bias = 0.0;
};

using TransferKind = std::variant<Tanh, Step, PiecewiseLinear, Rectifier>;

double apply_transfer(const TransferKind& kind, double x);

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericFault : public std::runtime_error {
 public:
  NumericFault(std::size_t neuron, const std::string& what)
      : std::runtime_error(what), neuron_(neuron) {}
  std::size_t neuron() const { return neuron_; }

 private:
  std::size_t neuron_;
};

// Dense discrete-time network. weights is row-major n x n, weights[i*n + j]
// is the synapse from neuron j onto neuron i.
struct NetworkSpec {
  std::size_t n = 0;
  std::vector<double> weights;
  std::vector<double> biases;
  std::vector<TransferKind> transfer;
  std::vector<std::size_t> input_indices;
  std::vector<std::size_t> output_indices;

  double weight(std::size_t i, std::size_t j) const { return weights[i * n + j]; }
  double& weight(std::size_t i, std::size_t j) { return weights[i * n + j]; }

  /// Throws ConfigurationError when shapes or indices are inconsistent.
  void validate() const;

  static NetworkSpec with_size(std::size_t n, TransferKind kind = Tanh{});
};

struct NetworkState {
  std::vector<double> activations;
  std::vector<double> outputs;
  long tick = 0;

  /// State at the given activations with outputs already transferred.
  static NetworkState from_activations(const NetworkSpec& spec, std::vector<double> activations);
  static NetworkState zeros(const NetworkSpec& spec);
};

// a_i(t+1) = sum_j w_ij o_j(t) + b_i (+ external input for input neurons),
// then o_i(t+1) = f_i(a_i(t+1)). All activations are computed from the
// previous outputs before any output is replaced.
// external_inputs has one entry per spec.input_indices (may be empty).
NetworkState step_network(const NetworkSpec& spec, const NetworkState& state,
                          std::span<const double> external_inputs = {});

// In-place variant used on hot paths; same semantics as step_network.
void step_network_inplace(const NetworkSpec& spec, NetworkState& state,
                          std::span<const double> external_inputs = {});

}  // namespace beetle::neuro
