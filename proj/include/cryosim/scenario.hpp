#pragma once

// Declarative scenario files: one human-editable key/value file drives every
// subcommand, so an experiment is reproducible from a single artifact.
// Parsing validates units and invariants and reports every error it finds,
// not just the first.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cryosim/control_grid.hpp"
#include "cryosim/device_models.hpp"
#include "cryosim/fpga_controller.hpp"
#include "cryosim/scaling_planner.hpp"
#include "cryosim/stream_pipeline.hpp"
#include "cryosim/units.hpp"

namespace cryosim {

struct ParseError {
  int line = 0;
  std::string message;
};

struct SweepSpec {
  double f_min = 1e3;
  double f_max = 1e9;
  int points_per_decade = 4;
  double duty = 0.5;
  int adiabatic_stages = 8;
  int cmos_gates = 8;
  double adiabatic_band_min = 2e7;  // fit band for the quadratic slope
  double adiabatic_band_max = 1e9;
  double cmos_band_min = 1e5;  // fit band for the linear slope
  double cmos_band_max = 1e9;
};

struct CircuitSpec {
  std::string kind = "shift_register";
  int stages = 8;
  int cycles = 8;
  double frequency = 4e6;
  std::map<std::string, std::string> stimulus;  // port -> bit pattern
  std::vector<int> ring_tokens;
};

struct GridSpec {
  int rows = 4;
  int cols = 16;
  double cell_capacitance = 1e-15;
  double column_capacitance = 1e-15;
  double tap_load = 0.0;
  double row_v_low = 0.0, row_v_high = 2.5;
  double data_v_low = 0.0, data_v_high = 1.0;
  double clock = 4e6;
  int updates = 16;
  int corrupt = 0;  // stale shadow entries injected before one assert step
  TapKind tap_kind = TapKind::Digital;
};

struct PipelineSpec {
  int word_width = 2000;
  int depth = 100;
  double clock = 4e6;
  std::vector<int> ratios{10, 10};
  bool loopback = false;
  std::int64_t output_ticks = 0;  // 0: drain the stored payload exactly once
  int payload_words = 0;          // 0: fill to depth with seeded random bits
};

struct ControllerSpec {
  int fabric_rows = 4;
  int fabric_cols = 4;
  std::vector<std::string> layout;  // rows of C/R; empty: all CLBs
  double rotation_clock = 4e6;
  double rql_clock = 5e9;
  double decoherence_budget = 100e-6;
  std::optional<double> calibration;  // required; no sensible default exists
  double initialization = 5e-6;
  double arithmetic = 100e-6;
  double readout = 5e-6;
  std::optional<double> branch_time;
  std::string branch_target;
};

struct OutputSpec {
  std::string dir = "out";
  std::string format = "csv";
};

struct Scenario {
  std::string name;
  TransistorProcess process;
  bool has_process = false;
  std::map<std::string, DevicePoint> devices;
  std::vector<ThermalStage> stages;
  ScalingPolicy policy;
  std::int64_t rql_gates = 1000000;
  bool has_policy = false;
  SweepSpec sweep;
  bool has_sweep = false;
  CircuitSpec circuit;
  bool has_circuit = false;
  GridSpec grid;
  bool has_grid = false;
  PipelineSpec pipeline;
  bool has_pipeline = false;
  ControllerSpec controller;
  bool has_controller = false;
  OutputSpec outputs;
};

struct ParseResult {
  Scenario scenario;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct FieldContext {
  ParseResult* result;
  int line = 0;
  std::string key, value;

  void fail(const std::string& msg) const {
    result->errors.push_back({line, key.empty() ? msg : key + ": " + msg});
  }

  bool number(double& out, Dimension dim) const {
    try {
      out = parse_quantity(value, dim);
      return true;
    } catch (const std::exception& e) {
      fail(e.what());
      return false;
    }
  }

  bool integer(int& out) const {
    double v;
    if (!number(v, Dimension::Dimensionless)) return false;
    out = static_cast<int>(v);
    if (static_cast<double>(out) != v) {
      fail("expected an integer");
      return false;
    }
    return true;
  }

  bool integer64(std::int64_t& out) const {
    double v;
    if (!number(v, Dimension::Dimensionless)) return false;
    out = static_cast<std::int64_t>(v);
    if (static_cast<double>(out) != v) {
      fail("expected an integer");
      return false;
    }
    return true;
  }
};

inline std::vector<int> parse_int_list(const FieldContext& ctx) {
  std::vector<int> out;
  std::istringstream in(ctx.value);
  std::string tok;
  while (in >> tok) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      ctx.fail("expected a list of integers");
      return {};
    }
  }
  return out;
}

}  // namespace detail

inline ParseResult parse_scenario(const std::string& text, const std::string& name = "scenario") {
  ParseResult result;
  Scenario& sc = result.scenario;
  sc.name = name;

  std::string section, section_arg;
  bool any_content = false;

  std::istringstream input(text);
  std::string raw;
  int line_no = 0;
  // Device points may give delay or clock; resolve per section at close.
  struct PendingDevice {
    std::string name;
    double energy = 0;
    std::optional<double> delay;
    std::optional<double> clock;
    double area = 1;
    int line = 0;
  };
  std::optional<PendingDevice> pending_device;
  std::optional<ThermalStage> pending_stage;
  std::optional<bool> pending_stage_eta_given;

  auto close_section = [&]() {
    if (pending_device) {
      detail::FieldContext ctx{&result, pending_device->line, "device " + pending_device->name, ""};
      try {
        DevicePoint pt;
        if (pending_device->delay) {
          pt = DevicePoint::from_delay(pending_device->energy, *pending_device->delay,
                                       pending_device->area);
          if (pending_device->clock) pt.clock_rate = *pending_device->clock;
        } else if (pending_device->clock) {
          pt.energy_per_op = pending_device->energy;
          pt.clock_rate = *pending_device->clock;
          pt.propagation_delay = 1.0 / (DevicePoint::kGateDelaysPerCycle * pt.clock_rate);
          pt.area_units = pending_device->area;
          pt.validate();
        } else {
          throw std::invalid_argument("needs propagation_delay or clock_rate");
        }
        sc.devices[pending_device->name] = pt;
      } catch (const std::exception& e) {
        ctx.fail(e.what());
      }
      pending_device.reset();
    }
    if (pending_stage) {
      detail::FieldContext ctx{&result, line_no, "stage", ""};
      if (!*pending_stage_eta_given) {
        // Derived defaults, back-solved from the practical multipliers.
        const double t = pending_stage->temperature;
        if (t == 300.0) pending_stage->carnot_efficiency = 1.0;
        else if (t == 4.0) pending_stage->carnot_efficiency = 0.075;
        else if (t == 0.015) pending_stage->carnot_efficiency = 0.02;
        else ctx.fail("carnot_efficiency required for a " + format_eng(t, "K") + " stage");
      }
      try {
        pending_stage->validate();
        sc.stages.push_back(*pending_stage);
      } catch (const std::exception& e) {
        ctx.fail(e.what());
      }
      pending_stage.reset();
      pending_stage_eta_given.reset();
    }
  };

  while (std::getline(input, raw)) {
    ++line_no;
    std::string stripped = raw;
    const std::size_t hash = stripped.find('#');
    if (hash != std::string::npos) stripped.erase(hash);
    stripped = detail::trim(stripped);
    if (stripped.empty()) continue;
    any_content = true;

    if (stripped.front() == '[') {
      if (stripped.back() != ']') {
        result.errors.push_back({line_no, "unterminated section header"});
        continue;
      }
      close_section();
      std::string inside = detail::trim(stripped.substr(1, stripped.size() - 2));
      const std::size_t space = inside.find(' ');
      section = space == std::string::npos ? inside : inside.substr(0, space);
      section_arg = space == std::string::npos ? "" : detail::trim(inside.substr(space + 1));
      if (section == "process") sc.has_process = true;
      else if (section == "device") {
        if (section_arg.empty()) {
          result.errors.push_back({line_no, "device section needs a name"});
          section.clear();
        } else {
          pending_device = PendingDevice{section_arg, 0, std::nullopt, std::nullopt, 1, line_no};
        }
      } else if (section == "stage") {
        pending_stage = ThermalStage{};
        pending_stage->label = section_arg;
        pending_stage_eta_given = false;
      } else if (section == "policy") sc.has_policy = true;
      else if (section == "sweep") sc.has_sweep = true;
      else if (section == "circuit") sc.has_circuit = true;
      else if (section == "grid") sc.has_grid = true;
      else if (section == "pipeline") sc.has_pipeline = true;
      else if (section == "controller") sc.has_controller = true;
      else if (section == "outputs") {}
      else {
        result.errors.push_back({line_no, "unknown section [" + section + "]"});
        section.clear();
      }
      continue;
    }

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      result.errors.push_back({line_no, "expected 'key = value'"});
      continue;
    }
    detail::FieldContext ctx{&result, line_no, detail::trim(stripped.substr(0, eq)),
                             detail::trim(stripped.substr(eq + 1))};
    const std::string& key = ctx.key;
    const std::string& value = ctx.value;

    if (section.empty()) {
      ctx.fail("key outside any section");
    } else if (section == "process") {
      if (key == "node_capacitance") ctx.number(sc.process.node_capacitance, Dimension::Capacitance);
      else if (key == "on_resistance") ctx.number(sc.process.on_resistance, Dimension::Resistance);
      else if (key == "swing") ctx.number(sc.process.swing, Dimension::Voltage);
      else if (key == "on_off_ratio") ctx.number(sc.process.on_off_ratio, Dimension::Dimensionless);
      else if (key == "gate_leak_fraction") ctx.number(sc.process.gate_leak_fraction, Dimension::Dimensionless);
      else if (key == "label") sc.process.label = value;
      else ctx.fail("unknown process field");
    } else if (section == "device" && pending_device) {
      if (key == "energy_per_op") ctx.number(pending_device->energy, Dimension::Energy);
      else if (key == "propagation_delay") { double v; if (ctx.number(v, Dimension::Time)) pending_device->delay = v; }
      else if (key == "clock_rate") { double v; if (ctx.number(v, Dimension::Frequency)) pending_device->clock = v; }
      else if (key == "area_units") ctx.number(pending_device->area, Dimension::Dimensionless);
      else ctx.fail("unknown device field");
    } else if (section == "stage" && pending_stage) {
      if (key == "temperature") ctx.number(pending_stage->temperature, Dimension::Temperature);
      else if (key == "carnot_efficiency") {
        if (ctx.number(pending_stage->carnot_efficiency, Dimension::Dimensionless))
          *pending_stage_eta_given = true;
      } else if (key == "heat_load") ctx.number(pending_stage->heat_load, Dimension::Power);
      else ctx.fail("unknown stage field");
    } else if (section == "policy") {
      if (key == "alpha") ctx.number(sc.policy.alpha, Dimension::Dimensionless);
      else if (key == "complexity_factor") ctx.number(sc.policy.complexity_factor, Dimension::Dimensionless);
      else if (key == "power_budget") ctx.number(sc.policy.power_budget, Dimension::Power);
      else if (key == "area_cap") ctx.number(sc.policy.area_cap, Dimension::Dimensionless);
      else if (key == "max_steps") ctx.integer(sc.policy.max_steps);
      else if (key == "duty") ctx.number(sc.policy.duty, Dimension::Dimensionless);
      else if (key == "leak_devices_per_gate") ctx.number(sc.policy.leak_devices_per_gate, Dimension::Dimensionless);
      else if (key == "rql_gates") ctx.integer64(sc.rql_gates);
      else ctx.fail("unknown policy field");
    } else if (section == "sweep") {
      if (key == "f_min") ctx.number(sc.sweep.f_min, Dimension::Frequency);
      else if (key == "f_max") ctx.number(sc.sweep.f_max, Dimension::Frequency);
      else if (key == "points_per_decade") ctx.integer(sc.sweep.points_per_decade);
      else if (key == "duty") ctx.number(sc.sweep.duty, Dimension::Dimensionless);
      else if (key == "adiabatic_stages") ctx.integer(sc.sweep.adiabatic_stages);
      else if (key == "cmos_gates") ctx.integer(sc.sweep.cmos_gates);
      else if (key == "adiabatic_band_min") ctx.number(sc.sweep.adiabatic_band_min, Dimension::Frequency);
      else if (key == "adiabatic_band_max") ctx.number(sc.sweep.adiabatic_band_max, Dimension::Frequency);
      else if (key == "cmos_band_min") ctx.number(sc.sweep.cmos_band_min, Dimension::Frequency);
      else if (key == "cmos_band_max") ctx.number(sc.sweep.cmos_band_max, Dimension::Frequency);
      else ctx.fail("unknown sweep field");
    } else if (section == "circuit") {
      if (key == "kind") sc.circuit.kind = value;
      else if (key == "stages") ctx.integer(sc.circuit.stages);
      else if (key == "cycles") ctx.integer(sc.circuit.cycles);
      else if (key == "frequency") ctx.number(sc.circuit.frequency, Dimension::Frequency);
      else if (key == "ring_tokens") sc.circuit.ring_tokens = detail::parse_int_list(ctx);
      else if (key.rfind("stimulus_", 0) == 0) sc.circuit.stimulus[key.substr(9)] = value;
      else ctx.fail("unknown circuit field");
    } else if (section == "grid") {
      if (key == "rows") ctx.integer(sc.grid.rows);
      else if (key == "cols") ctx.integer(sc.grid.cols);
      else if (key == "cell_capacitance") ctx.number(sc.grid.cell_capacitance, Dimension::Capacitance);
      else if (key == "column_capacitance") ctx.number(sc.grid.column_capacitance, Dimension::Capacitance);
      else if (key == "tap_load") ctx.number(sc.grid.tap_load, Dimension::Capacitance);
      else if (key == "row_v_low") ctx.number(sc.grid.row_v_low, Dimension::Voltage);
      else if (key == "row_v_high") ctx.number(sc.grid.row_v_high, Dimension::Voltage);
      else if (key == "data_v_low") ctx.number(sc.grid.data_v_low, Dimension::Voltage);
      else if (key == "data_v_high") ctx.number(sc.grid.data_v_high, Dimension::Voltage);
      else if (key == "clock") ctx.number(sc.grid.clock, Dimension::Frequency);
      else if (key == "updates") ctx.integer(sc.grid.updates);
      else if (key == "corrupt") ctx.integer(sc.grid.corrupt);
      else if (key == "tap_kind") {
        if (value == "digital") sc.grid.tap_kind = TapKind::Digital;
        else if (value == "analog") sc.grid.tap_kind = TapKind::Analog;
        else if (value == "sfet_gate") sc.grid.tap_kind = TapKind::SfetGate;
        else ctx.fail("tap_kind must be digital, analog, or sfet_gate");
      } else ctx.fail("unknown grid field");
    } else if (section == "pipeline") {
      if (key == "word_width") ctx.integer(sc.pipeline.word_width);
      else if (key == "depth") ctx.integer(sc.pipeline.depth);
      else if (key == "clock") ctx.number(sc.pipeline.clock, Dimension::Frequency);
      else if (key == "ratios") sc.pipeline.ratios = detail::parse_int_list(ctx);
      else if (key == "loopback") sc.pipeline.loopback = value == "true" || value == "1";
      else if (key == "output_ticks") ctx.integer64(sc.pipeline.output_ticks);
      else if (key == "payload_words") ctx.integer(sc.pipeline.payload_words);
      else ctx.fail("unknown pipeline field");
    } else if (section == "controller") {
      if (key == "fabric_rows") ctx.integer(sc.controller.fabric_rows);
      else if (key == "fabric_cols") ctx.integer(sc.controller.fabric_cols);
      else if (key == "layout") sc.controller.layout.push_back(value);
      else if (key == "rotation_clock") ctx.number(sc.controller.rotation_clock, Dimension::Frequency);
      else if (key == "rql_clock") ctx.number(sc.controller.rql_clock, Dimension::Frequency);
      else if (key == "decoherence_budget") ctx.number(sc.controller.decoherence_budget, Dimension::Time);
      else if (key == "calibration") { double v; if (ctx.number(v, Dimension::Time)) sc.controller.calibration = v; }
      else if (key == "initialization") ctx.number(sc.controller.initialization, Dimension::Time);
      else if (key == "arithmetic") ctx.number(sc.controller.arithmetic, Dimension::Time);
      else if (key == "readout") ctx.number(sc.controller.readout, Dimension::Time);
      else if (key == "branch_time") { double v; if (ctx.number(v, Dimension::Time)) sc.controller.branch_time = v; }
      else if (key == "branch_target") sc.controller.branch_target = value;
      else ctx.fail("unknown controller field");
    } else if (section == "outputs") {
      if (key == "dir") sc.outputs.dir = value;
      else if (key == "format") {
        if (value == "csv" || value == "text") sc.outputs.format = value;
        else ctx.fail("format must be csv or text");
      } else ctx.fail("unknown outputs field");
    }
  }
  close_section();

  if (!any_content) {
    result.errors.push_back({1, "empty scenario file"});
    return result;
  }

  // Invariant checks on the assembled objects.
  if (sc.has_process) {
    try {
      sc.process.validate();
    } catch (const std::exception& e) {
      result.errors.push_back({0, std::string("process: ") + e.what()});
    }
  }
  if (sc.has_policy) {
    try {
      sc.policy.validate();
    } catch (const std::exception& e) {
      result.errors.push_back({0, std::string("policy: ") + e.what()});
    }
  }
  if (sc.has_controller && !sc.controller.calibration)
    result.errors.push_back({0, "controller: calibration duration is required"});
  return result;
}

}  // namespace cryosim
