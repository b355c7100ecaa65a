#include <doctest.h>

#include <vector>

#include "beetle/failure.hpp"

using namespace beetle::sim;

namespace {

constexpr double kDt = 1.0 / 60.0;

std::vector<HistorySample> steady(double seconds, double speed) {
  std::vector<HistorySample> h;
  for (int t = 0; t * kDt < seconds; ++t) {
    HistorySample s;
    s.time_s = t * kDt;
    s.pitch_error_deg = 0.5;
    s.path_length = speed * s.time_s;
    h.push_back(s);
  }
  return h;
}

}  // namespace

TEST_CASE("reaching the target is success") {
  CHECK(classify_failure(steady(25, 0.15), {}) == FailureType::None);
  FailureMonitor m({});
  bool stopped = false;
  for (const auto& s : steady(25, 0.15)) {
    if (m.push(s)) {
      stopped = true;
      CHECK(s.path_length >= 3.0);
      break;
    }
  }
  CHECK(stopped);
  CHECK(m.succeeded());
}

TEST_CASE("roll ramp then contact loss is a sideways fall") {
  auto h = steady(5, 0.15);
  for (std::size_t i = 0; i < h.size(); ++i) h[i].roll_deg = 40.0 * static_cast<double>(i) / h.size();
  h.back().roll_deg = 40.0;
  h.back().gap = 0.5;
  CHECK(classify_failure(h, {}) == FailureType::FallSideways);
}

TEST_CASE("stationary ball is push in place") {
  CHECK(classify_failure(steady(15, 0.0), {}) == FailureType::PushInPlace);
  CHECK(classify_failure(steady(15, 0.005), {}) == FailureType::PushInPlace);
  CHECK(classify_failure(steady(9, 0.0), {}) == FailureType::PushInPlace);  // ran out of time
}

TEST_CASE("contact loss with large pitch error falls off") {
  auto h = steady(4, 0.15);
  h.back().gap = 0.2;
  h.back().pitch_error_deg = -12.0;
  CHECK(classify_failure(h, {}) == FailureType::FallOffPitch);
}

TEST_CASE("sustained hind slip before contact loss is slip loss") {
  auto h = steady(4, 0.15);
  for (std::size_t i = h.size() - 90; i < h.size(); ++i) h[i].hind_slip = true;
  h.back().gap = 0.2;
  CHECK(classify_failure(h, {}) == FailureType::SlipLoss);

  auto brief = steady(4, 0.15);
  for (std::size_t i = brief.size() - 10; i < brief.size(); ++i) brief[i].hind_slip = true;
  brief.back().gap = 0.2;
  CHECK(classify_failure(brief, {}) == FailureType::FallOffPitch);
}

TEST_CASE("failure names round trip") {
  for (auto f : {FailureType::None, FailureType::FallOffPitch, FailureType::FallSideways,
                 FailureType::PushInPlace, FailureType::SlipLoss}) {
    CHECK(failure_from_string(to_string(f)) == f);
  }
  CHECK_THROWS(failure_from_string("Tumble"));
}
