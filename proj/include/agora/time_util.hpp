#pragma once

#include <cstdint>
#include <string>

namespace agora {

// Seconds since the Unix epoch, UTC.
using EpochSeconds = std::int64_t;

std::string to_iso8601(EpochSeconds t);
EpochSeconds from_iso8601(const std::string& text);

// Timestamp source for discussion events. The simulated clock derives every
// instant from the event ordinal, which keeps mock-backend runs byte-identical
// and makes resumed runs agree with uninterrupted ones.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual EpochSeconds at_event(std::uint64_t event_ordinal) = 0;
};

class WallClock final : public Clock {
 public:
  EpochSeconds at_event(std::uint64_t) override;
};

class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(EpochSeconds base = kDefaultBase, EpochSeconds step = 60)
      : base_(base), step_(step) {}

  EpochSeconds at_event(std::uint64_t event_ordinal) override {
    return base_ + step_ * static_cast<EpochSeconds>(event_ordinal);
  }

  // 2025-01-01T00:00:00Z
  static constexpr EpochSeconds kDefaultBase = 1735689600;

 private:
  EpochSeconds base_;
  EpochSeconds step_;
};

}  // namespace agora
