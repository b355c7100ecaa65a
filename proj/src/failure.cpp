#include "beetle/failure.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace beetle::sim {

namespace {
constexpr std::array<const char*, 5> kNames{"None", "FallOffPitch", "FallSideways", "PushInPlace", "SlipLoss"};
}

std::string to_string(FailureType f) { return kNames[static_cast<std::size_t>(f)]; }

FailureType failure_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (s == kNames[i]) return static_cast<FailureType>(i);
  }
  throw std::invalid_argument("unknown failure type '" + s + "'");
}

bool FailureMonitor::push(const HistorySample& s) {
  if (stopped_) return true;
  const double dt_hint = window_.empty() ? 0.0 : s.time_s - window_.back().time_s;
  window_.push_back(s);
  slips_.push_back(s.hind_slip);
  slip_count_ += s.hind_slip;
  const std::size_t slip_len =
      dt_hint > 0 ? static_cast<std::size_t>(std::lround(c_.slip_window_s / dt_hint)) : 1;
  while (slips_.size() > std::max<std::size_t>(1, slip_len)) {
    slip_count_ -= slips_.front();
    slips_.pop_front();
  }

  auto stop = [&](FailureType f) {
    stopped_ = true;
    verdict_ = f;
    return true;
  };
  if (std::abs(s.roll_deg) > c_.tip_over_deg) return stop(FailureType::FallSideways);
  if (std::abs(s.gap) > c_.gap_limit) {
    const bool sustained_slip = slips_.size() == std::max<std::size_t>(1, slip_len) &&
                                slip_count_ >= c_.slip_fraction * static_cast<double>(slips_.size());
    if (sustained_slip && std::abs(s.pitch_error_deg) <= c_.pitch_error_deg) return stop(FailureType::SlipLoss);
    return stop(FailureType::FallOffPitch);
  }
  if (s.path_length >= c_.target_m) return stop(FailureType::None);
  while (window_.size() > 1 && s.time_s - window_[1].time_s >= c_.stall_window_s) window_.pop_front();
  if (s.time_s - window_.front().time_s >= c_.stall_window_s &&
      s.path_length - window_.front().path_length < c_.stall_distance_m) {
    return stop(FailureType::PushInPlace);
  }
  return false;
}

FailureType FailureMonitor::verdict() const { return stopped_ ? verdict_ : FailureType::PushInPlace; }

FailureType classify_failure(std::span<const HistorySample> history, const FailureCriteria& criteria) {
  FailureMonitor m(criteria);
  for (const auto& s : history) {
    if (m.push(s)) break;
  }
  return m.verdict();
}

}  // namespace beetle::sim
