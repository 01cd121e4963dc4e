#pragma once

// Per-event dissipation ledger shared by the circuit simulator and the
// control-grid protocol machines. Every charge movement is booked either
// against the transistor channel (cold, pays refrigeration) or against the
// clock/power return path (room temperature).

#include <string>
#include <vector>

namespace cryosim {

enum class EnergyLocation { Channel, RailReturn };

inline const char* to_string(EnergyLocation loc) {
  return loc == EnergyLocation::Channel ? "channel" : "rail_return";
}

struct EnergyEvent {
  double time = 0;  // s
  EnergyLocation location = EnergyLocation::Channel;
  double joules = 0;
  bool adiabatic = true;  // false for hard switching across a voltage step
  std::string detail;     // node or structure the event charges against
};

struct EnergyTrace {
  std::vector<EnergyEvent> events;

  void add(double time, EnergyLocation loc, double joules, bool adiabatic,
           std::string detail = {}) {
    if (joules == 0) return;
    events.push_back({time, loc, joules, adiabatic, std::move(detail)});
  }

  double total() const {
    double sum = 0;
    for (const auto& e : events) sum += e.joules;
    return sum;
  }

  double total(EnergyLocation loc) const {
    double sum = 0;
    for (const auto& e : events)
      if (e.location == loc) sum += e.joules;
    return sum;
  }

  double total_between(double t_begin, double t_end, EnergyLocation loc) const {
    double sum = 0;
    for (const auto& e : events)
      if (e.time >= t_begin && e.time < t_end && e.location == loc) sum += e.joules;
    return sum;
  }

  std::size_t count_non_adiabatic() const {
    std::size_t n = 0;
    for (const auto& e : events)
      if (!e.adiabatic) ++n;
    return n;
  }

  void append(const EnergyTrace& other) {
    events.insert(events.end(), other.events.begin(), other.events.end());
  }
};

}  // namespace cryosim
