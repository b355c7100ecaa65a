#pragma once

#include <deque>
#include <span>
#include <string>

namespace beetle::sim {

enum class FailureType { None, FallOffPitch, FallSideways, PushInPlace, SlipLoss };

std::string to_string(FailureType f);
FailureType failure_from_string(const std::string& s);

struct HistorySample {
  double time_s = 0.0;
  double roll_deg = 0.0;
  double pitch_error_deg = 0.0;
  double gap = 0.0;
  double path_length = 0.0;
  bool hind_slip = false;
};

struct FailureCriteria {
  double tip_over_deg = 35.0;
  double gap_limit = 0.12;
  double target_m = 3.0;
  double stall_window_s = 10.0;
  double stall_distance_m = 0.1;
  double pitch_error_deg = 10.0;
  double slip_window_s = 1.0;
  double slip_fraction = 0.5;
};

// Consumes the trial history tick by tick and stops at the first terminal
// event. A trial that ends without reaching the target or failing counts as
// PushInPlace.
class FailureMonitor {
 public:
  explicit FailureMonitor(FailureCriteria criteria) : c_(criteria) {}

  /// Returns true once the trial should stop.
  bool push(const HistorySample& s);
  bool stopped() const { return stopped_; }
  bool succeeded() const { return stopped_ && verdict_ == FailureType::None; }
  FailureType verdict() const;

 private:
  FailureCriteria c_;
  std::deque<HistorySample> window_;
  std::deque<bool> slips_;
  int slip_count_ = 0;
  bool stopped_ = false;
  FailureType verdict_ = FailureType::PushInPlace;
};

FailureType classify_failure(std::span<const HistorySample> history, const FailureCriteria& criteria);

}  // namespace beetle::sim
