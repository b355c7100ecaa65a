#include "beetle/neuro.hpp"

#include <algorithm>
#include <cmath>

namespace beetle::neuro {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dimensions(const NetworkSpec& spec, const NetworkState& state,
                      std::span<const double> external_inputs) {
  if (state.activations.size() != spec.n || state.outputs.size() != spec.n) {
    throw ConfigurationError("network state has " + std::to_string(state.activations.size()) +
                             " neurons, spec has " + std::to_string(spec.n));
  }
  if (!external_inputs.empty() && external_inputs.size() != spec.input_indices.size()) {
    throw ConfigurationError("expected " + std::to_string(spec.input_indices.size()) +
                             " external inputs, got " + std::to_string(external_inputs.size()));
  }
}

}  // namespace

double apply_transfer(const TransferKind& kind, double x) {
  return std::visit(Overloaded{
                        [x](const Tanh&) { return std::tanh(x); },
                        [x](const Step& s) { return x >= s.threshold ? 1.0 : 0.0; },
                        [x](const PiecewiseLinear& p) { return std::clamp(x, p.lo, p.hi); },
                        [x](const Rectifier& r) { return std::max(0.0, x - r.bias); },
                    },
                    kind);
}

void NetworkSpec::validate() const {
  if (weights.size() != n * n) {
    throw ConfigurationError("weights must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (biases.size() != n) throw ConfigurationError("biases must have length " + std::to_string(n));
  if (transfer.size() != n) throw ConfigurationError("transfer must have length " + std::to_string(n));
  for (const auto& t : transfer) {
    if (const auto* p = std::get_if<PiecewiseLinear>(&t); p && !(p->lo < p->hi)) {
      throw ConfigurationError("piecewise-linear transfer requires lo < hi");
    }
  }
  for (auto i : input_indices) {
    if (i >= n) throw ConfigurationError("input index " + std::to_string(i) + " out of range");
  }
  for (auto i : output_indices) {
    if (i >= n) throw ConfigurationError("output index " + std::to_string(i) + " out of range");
  }
}

NetworkSpec NetworkSpec::with_size(std::size_t n, TransferKind kind) {
  NetworkSpec spec;
  spec.n = n;
  spec.weights.assign(n * n, 0.0);
  spec.biases.assign(n, 0.0);
  spec.transfer.assign(n, kind);
  return spec;
}

NetworkState NetworkState::from_activations(const NetworkSpec& spec, std::vector<double> activations) {
  if (activations.size() != spec.n) throw ConfigurationError("activation vector size mismatch");
  NetworkState state;
  state.outputs.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) state.outputs[i] = apply_transfer(spec.transfer[i], activations[i]);
  state.activations = std::move(activations);
  return state;
}

NetworkState NetworkState::zeros(const NetworkSpec& spec) {
  return from_activations(spec, std::vector<double>(spec.n, 0.0));
}

void step_network_inplace(const NetworkSpec& spec, NetworkState& state,
                          std::span<const double> external_inputs) {
  check_dimensions(spec, state, external_inputs);
  const std::size_t n = spec.n;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = spec.biases[i];
    const double* row = spec.weights.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) sum += row[j] * state.outputs[j];
    state.activations[i] = sum;
  }
  for (std::size_t k = 0; k < external_inputs.size(); ++k) {
    state.activations[spec.input_indices[k]] += external_inputs[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(state.activations[i])) {
      throw NumericFault(i, "non-finite activation at neuron " + std::to_string(i) + " (tick " +
                                std::to_string(state.tick + 1) + ")");
    }
    state.outputs[i] = apply_transfer(spec.transfer[i], state.activations[i]);
  }
  ++state.tick;
}

NetworkState step_network(const NetworkSpec& spec, const NetworkState& state,
                          std::span<const double> external_inputs) {
  NetworkState next = state;
  step_network_inplace(spec, next, external_inputs);
  return next;
}

}  // namespace beetle::neuro
