#pragma once

// Adiabatic scaling schedules: starting from an RQL/CMOS baseline at equal
// dissipation, each step trades clock rate for gate count at constant total
// power until leakage, area, or the step limit ends the run.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cryosim/device_models.hpp"

namespace cryosim {

enum class Technology { CMOS, CATC, RQL };

inline const char* to_string(Technology t) {
  switch (t) {
    case Technology::CMOS: return "CMOS";
    case Technology::CATC: return "CATC";
    case Technology::RQL: return "RQL";
  }
  return "?";
}

// One row of a scaling worksheet.
struct ScalingStep {
  int step_index = 0;
  Technology technology = Technology::CMOS;
  std::int64_t gate_count = 1;
  double clock_rate = 0;                // Hz
  double dynamic_power = 0;             // W
  std::optional<double> static_power;   // W; absent for RQL (no leakage path)
  double area_estimate = 0;             // units of one CMOS gate

  void validate() const {
    if (gate_count < 1) throw std::invalid_argument("scaling step: gate_count must be >= 1");
    if (!(clock_rate > 0)) throw std::invalid_argument("scaling step: clock_rate must be > 0");
    if (!(dynamic_power >= 0)) throw std::invalid_argument("scaling step: dynamic_power must be >= 0");
    if (static_power && !(*static_power >= 0))
      throw std::invalid_argument("scaling step: static_power must be >= 0");
  }
};

// The rule that generates the next worksheet row.
struct ScalingPolicy {
  double alpha = 0.1;             // per-step frequency factor, in (0,1)
  double complexity_factor = 10;  // CATC gate cost relative to a CMOS gate
  double power_budget = 160e-6;   // W, total dynamic power held constant
  double area_cap = 1e12;         // units of one CMOS gate
  int max_steps = 3;
  double duty = 0.5;              // duty cycle for the leakage column
  // Leakage is charged per gate as this many device-equivalents. Calibrated
  // to 1 so a 10 K-gate step at the reference process leaks 16.7 nW.
  double leak_devices_per_gate = 1.0;

  void validate() const {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("policy: alpha must be in (0,1)");
    if (!(complexity_factor >= 1)) throw std::invalid_argument("policy: complexity_factor must be >= 1");
    if (!(power_budget > 0)) throw std::invalid_argument("policy: power_budget must be > 0");
    if (!(area_cap > 0)) throw std::invalid_argument("policy: area_cap must be > 0");
    if (max_steps < 0) throw std::invalid_argument("policy: max_steps must be >= 0");
    if (!(duty >= 0 && duty <= 1)) throw std::invalid_argument("policy: duty must be in [0,1]");
    if (!(leak_devices_per_gate > 0))
      throw std::invalid_argument("policy: leak_devices_per_gate must be > 0");
  }

  // 1/alpha^2 as an exact integer when alpha is the reciprocal of an
  // integer; gate counts then stay exact across steps.
  std::int64_t inverse_alpha_squared() const {
    const double inv = 1.0 / alpha;
    const double rounded = std::round(inv);
    if (std::abs(inv - rounded) < 1e-9 * inv) {
      const auto m = static_cast<std::int64_t>(rounded);
      return m * m;
    }
    return static_cast<std::int64_t>(std::llround(inv * inv));
  }
};

struct Baseline {
  ScalingStep rql;
  ScalingStep cmos;
};

// Baseline pair: the RQL layer dissipates N*f*E, and the CMOS layer gets as
// many gates as match that budget.
inline Baseline baseline(std::int64_t n_rql, const DevicePoint& rql, const DevicePoint& cmos,
                         const TransistorProcess& p) {
  rql.validate();
  cmos.validate();
  p.validate();
  if (n_rql < 1) throw std::invalid_argument("baseline: n_rql must be >= 1");

  Baseline b;
  b.rql.step_index = 0;
  b.rql.technology = Technology::RQL;
  b.rql.gate_count = n_rql;
  b.rql.clock_rate = rql.clock_rate;
  b.rql.dynamic_power = static_cast<double>(n_rql) * rql.clock_rate * rql.energy_per_op;
  b.rql.static_power = std::nullopt;
  b.rql.area_estimate = static_cast<double>(n_rql) * rql.area_units;

  const double n_cmos = b.rql.dynamic_power / (cmos.clock_rate * cmos.energy_per_op);
  b.cmos.step_index = 0;
  b.cmos.technology = Technology::CMOS;
  b.cmos.gate_count = std::max<std::int64_t>(1, std::llround(n_cmos));
  b.cmos.clock_rate = cmos.clock_rate;
  b.cmos.dynamic_power =
      static_cast<double>(b.cmos.gate_count) * cmos.clock_rate * cmos.energy_per_op;
  b.cmos.static_power = std::nullopt;
  b.cmos.area_estimate = static_cast<double>(b.cmos.gate_count) * cmos.area_units;
  return b;
}

// One adiabatic scaling step: clock drops by alpha, per-gate power by
// alpha^2, and the freed budget buys 1/alpha^2 more gates. The CMOS->CATC
// transition additionally pays the complexity factor in both gate count and
// area, because a CATC gate switches complexity_factor times the capacitance
// of the CMOS gate it replaces.
inline ScalingStep next_step(const ScalingStep& prev, const ScalingPolicy& policy,
                             const TransistorProcess& p, double duty) {
  prev.validate();
  policy.validate();
  p.validate();
  if (prev.technology == Technology::RQL)
    throw std::invalid_argument("next_step: RQL rows do not scale adiabatically");

  const bool transition = prev.technology == Technology::CMOS;
  const std::int64_t growth = policy.inverse_alpha_squared();

  ScalingStep step;
  step.step_index = prev.step_index + 1;
  step.technology = Technology::CATC;
  step.clock_rate = policy.alpha * prev.clock_rate;
  if (transition) {
    const auto complexity = static_cast<std::int64_t>(std::llround(policy.complexity_factor));
    step.gate_count = prev.gate_count * growth / std::max<std::int64_t>(1, complexity);
  } else {
    step.gate_count = prev.gate_count * growth;
  }
  if (step.gate_count < 1) step.gate_count = 1;
  // Total dynamic power is conserved by construction.
  step.dynamic_power = policy.power_budget;
  step.static_power = static_cast<double>(step.gate_count) * policy.leak_devices_per_gate *
                      static_power(p, duty);
  step.area_estimate = static_cast<double>(step.gate_count) * policy.complexity_factor;
  return step;
}

enum class StopReason { MaxSteps, AreaCap, LeakageFloor };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxSteps: return "max_steps";
    case StopReason::AreaCap: return "area_cap";
    case StopReason::LeakageFloor: return "leakage_floor";
  }
  return "?";
}

struct ScalingPlan {
  Baseline base;
  std::vector<ScalingStep> steps;  // CATC rows, step_index 1..n
  StopReason stop_reason = StopReason::MaxSteps;
};

// Iterate next_step from the CMOS baseline. A step that crosses the leakage
// floor is still part of the schedule (it is buildable; it just marks the end
// of the gains), whereas a step that would not fit under the area cap is
// dropped.
inline ScalingPlan plan(const ScalingPolicy& policy, const Baseline& base,
                        const TransistorProcess& p) {
  policy.validate();
  ScalingPlan out;
  out.base = base;
  out.stop_reason = StopReason::MaxSteps;
  ScalingStep prev = base.cmos;
  for (int i = 0; i < policy.max_steps; ++i) {
    ScalingStep step = next_step(prev, policy, p, policy.duty);
    if (step.area_estimate > policy.area_cap) {
      out.stop_reason = StopReason::AreaCap;
      return out;
    }
    out.steps.push_back(step);
    if (step.static_power && *step.static_power >= step.dynamic_power) {
      out.stop_reason = StopReason::LeakageFloor;
      return out;
    }
    prev = step;
  }
  return out;
}

// Closed-form index of the first step whose leakage reaches the dynamic
// budget: static power grows by 1/alpha^2 per step from its step-1 value.
inline int leakage_floor_step(const ScalingPolicy& policy, const Baseline& base,
                              const TransistorProcess& p) {
  ScalingStep first = next_step(base.cmos, policy, p, policy.duty);
  const double s1 = first.static_power.value();
  if (s1 >= policy.power_budget) return 1;
  const double growth = 1.0 / (policy.alpha * policy.alpha);
  const double k = 1.0 + std::ceil(std::log(policy.power_budget / s1) / std::log(growth) - 1e-12);
  return static_cast<int>(k);
}

}  // namespace cryosim
