#pragma once

// Closed-form per-gate energy, power, leakage and refrigeration formulas.
// Everything here is a pure function over plain values; no shared state.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cryosim {

constexpr double kRoomTemperatureK = 300.0;

// Electrical parameters of a transistor process. All energy formulas in the
// toolkit are computed from these four numbers plus a leakage split.
struct TransistorProcess {
  double node_capacitance = 1e-15;  // F, per driven gate node
  double on_resistance = 3e3;       // ohm, effective source-drain channel
  double swing = 1.0;               // V, V_H - V_L
  double on_off_ratio = 1e8;        // I_on / I_off
  double gate_leak_fraction = 0.5;  // share of off-state leakage in the gate
  std::string label;

  void validate() const {
    if (!(node_capacitance > 0)) throw std::invalid_argument("process: node_capacitance must be > 0");
    if (!(on_resistance > 0)) throw std::invalid_argument("process: on_resistance must be > 0");
    if (!(swing > 0)) throw std::invalid_argument("process: swing must be > 0");
    if (!(on_off_ratio >= 1)) throw std::invalid_argument("process: on_off_ratio must be >= 1");
    if (!(gate_leak_fraction >= 0 && gate_leak_fraction <= 1))
      throw std::invalid_argument("process: gate_leak_fraction must be in [0,1]");
  }

  double rc() const { return node_capacitance * on_resistance; }
};

// One technology operating point: energy per op, delay, and the system clock
// rate implied by a 500-gate-delay cycle.
struct DevicePoint {
  double energy_per_op = 0;      // J
  double propagation_delay = 0;  // s
  double clock_rate = 0;         // Hz
  double area_units = 1;         // relative gate area

  static constexpr double kGateDelaysPerCycle = 500.0;

  // Clock rate derived from the delay: f = 1 / (500 * t_pd).
  static DevicePoint from_delay(double energy_per_op, double t_pd, double area_units = 1) {
    DevicePoint p;
    p.energy_per_op = energy_per_op;
    p.propagation_delay = t_pd;
    p.clock_rate = 1.0 / (kGateDelaysPerCycle * t_pd);
    p.area_units = area_units;
    p.validate();
    return p;
  }

  void validate() const {
    if (!(energy_per_op > 0)) throw std::invalid_argument("device point: energy_per_op must be > 0");
    if (!(propagation_delay > 0)) throw std::invalid_argument("device point: propagation_delay must be > 0");
    if (!(clock_rate > 0)) throw std::invalid_argument("device point: clock_rate must be > 0");
  }
};

// A refrigeration stage: heat dissipated at temperature T, removed by a
// refrigerator with the given fraction of Carnot efficiency.
struct ThermalStage {
  double temperature = 300.0;      // K
  double carnot_efficiency = 1.0;  // (0, 1]
  double heat_load = 0.0;          // W dissipated at this stage
  std::string label;

  void validate() const {
    if (!(temperature > 0 && temperature <= kRoomTemperatureK))
      throw std::invalid_argument("stage: temperature must be in (0, 300] K");
    if (!(carnot_efficiency > 0 && carnot_efficiency <= 1))
      throw std::invalid_argument("stage: carnot_efficiency must be in (0, 1]");
    if (!(heat_load >= 0)) throw std::invalid_argument("stage: heat_load must be >= 0");
  }
};

// Four-phase trapezoidal clock / power supply. The ramp occupies a quarter
// period, so ramp_time is pinned to 1/(4f).
struct ClockSpec {
  double frequency = 4e6;  // Hz
  double v_low = 0.0;      // V
  double v_high = 1.0;     // V
  static constexpr int kPhaseCount = 4;

  static ClockSpec at(double frequency, double v_low = 0.0, double v_high = 1.0) {
    ClockSpec c{frequency, v_low, v_high};
    c.validate();
    return c;
  }

  double ramp_time() const { return 1.0 / (4.0 * frequency); }
  double period() const { return 1.0 / frequency; }
  double swing() const { return v_high - v_low; }

  void validate() const {
    if (!(frequency > 0)) throw std::invalid_argument("clock: frequency must be > 0");
    if (!(v_high > v_low)) throw std::invalid_argument("clock: v_high must exceed v_low");
  }
};

// --- Energy formulas -------------------------------------------------------

// Conventional CMOS transition: the full signal energy lands in the channel.
inline double cmos_transition_energy(double capacitance, double swing) {
  return 0.5 * capacitance * swing * swing;
}

inline double cmos_transition_energy(const TransistorProcess& p) {
  p.validate();
  return cmos_transition_energy(p.node_capacitance, p.swing);
}

// Channel dissipation for charging a node through resistance r while the
// supply ramps over ramp_time. The quasi-static limit C^2 V^2 R / t applies
// for slow ramps; it crosses the hard-switching value (1/2) C V^2 exactly at
// t = 2RC, which is where the model clamps.
inline double adiabatic_ramp_energy(double capacitance, double swing, double resistance,
                                    double ramp_time) {
  if (!(ramp_time > 0)) throw std::invalid_argument("adiabatic_ramp_energy: ramp_time must be > 0");
  const double hard = cmos_transition_energy(capacitance, swing);
  const double slow = capacitance * capacitance * swing * swing * resistance / ramp_time;
  return std::min(hard, slow);
}

inline double adiabatic_ramp_energy(const TransistorProcess& p, double ramp_time) {
  p.validate();
  return adiabatic_ramp_energy(p.node_capacitance, p.swing, p.on_resistance, ramp_time);
}

// Off-state leakage power per gate node. I_on is taken as V/R_on; the off
// current follows from the on/off ratio.
inline double static_power(const TransistorProcess& p, double duty) {
  p.validate();
  if (!(duty >= 0 && duty <= 1)) throw std::invalid_argument("static_power: duty must be in [0,1]");
  const double i_off = (p.swing / p.on_resistance) / p.on_off_ratio;
  return p.swing * i_off * duty;
}

// Wall-plug watts drawn per watt removed at the stage temperature. The ideal
// bound is 300/T; dividing by the Carnot fraction gives the practical figure.
// The 300 K stage itself needs no refrigeration and multiplies by 1.
inline double refrigeration_multiplier(const ThermalStage& s) {
  s.validate();
  if (s.temperature == kRoomTemperatureK) return 1.0;
  return (kRoomTemperatureK / s.temperature) / s.carnot_efficiency;
}

// Total wall-plug power for a chain of stages with strictly decreasing
// temperatures. Each stage contributes its heat load times its multiplier.
inline double wall_plug_power(const std::vector<ThermalStage>& stages) {
  if (stages.empty()) throw std::invalid_argument("wall_plug_power: no stages");
  double prev_t = kRoomTemperatureK + 1.0;
  double total = 0.0;
  for (const ThermalStage& s : stages) {
    s.validate();
    if (!(s.temperature < prev_t))
      throw std::invalid_argument("wall_plug_power: stage temperatures must be strictly decreasing");
    prev_t = s.temperature;
    total += s.heat_load * refrigeration_multiplier(s);
  }
  return total;
}

}  // namespace cryosim
