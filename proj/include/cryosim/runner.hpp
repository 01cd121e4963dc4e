#pragma once

// Subcommand dispatch: turns a parsed scenario plus a command name into
// deterministic CSV/text artifacts.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cryosim/control_grid.hpp"
#include "cryosim/device_models.hpp"
#include "cryosim/fpga_controller.hpp"
#include "cryosim/gate_sim.hpp"
#include "cryosim/scaling_planner.hpp"
#include "cryosim/scenario.hpp"
#include "cryosim/stream_pipeline.hpp"
#include "cryosim/units.hpp"

namespace cryosim {

struct missing_section : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Artifact {
  std::string basename;  // extension added per format
  std::string csv;
  std::string text;
};

struct CommandResult {
  std::vector<Artifact> artifacts;
  bool violation = false;
  std::vector<std::string> summary;
};

namespace detail {

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string csv(const std::vector<std::string>& metadata) const {
    std::ostringstream out;
    for (const auto& m : metadata) out << "# " << m << "\n";
    out << join(header_, ",") << "\n";
    for (const auto& r : rows_) out << join(r, ",") << "\n";
    return out.str();
  }

  std::string text(const std::vector<std::string>& metadata) const {
    std::vector<std::size_t> width(header_.size(), 0);
    auto grow = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i)
        width[i] = std::max(width[i], cells[i].size());
    };
    grow(header_);
    for (const auto& r : rows_) grow(r);
    std::ostringstream out;
    for (const auto& m : metadata) out << "# " << m << "\n";
    auto emit = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out << cells[i];
        if (i + 1 < cells.size())
          out << std::string(width[i] - cells[i].size() + 2, ' ');
      }
      out << "\n";
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return out.str();
  }

 private:
  static std::string join(const std::vector<std::string>& cells, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += sep;
      out += cells[i];
    }
    return out;
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::vector<std::string> base_metadata(const Scenario& sc, const std::string& command,
                                              std::uint64_t seed) {
  std::vector<std::string> m;
  m.push_back("tool = cryosim");
  m.push_back("command = " + command);
  m.push_back("scenario = " + sc.name);
  m.push_back("seed = " + std::to_string(seed));
  m.push_back("default_eta: 300 K = 1, 4 K = 0.075, 0.015 K = 0.02 (back-solved from the practical multipliers)");
  m.push_back("model: sfq_attenuation_factor = Z0 / (Z0 + R_on); off transistor blocks the pulse entirely");
  m.push_back("model: catc complexity_factor multiplies per-gate energy and area");
  m.push_back("model: leakage charged as " + format_full(sc.policy.leak_devices_per_gate) +
              " device-equivalent(s) per gate");
  m.push_back("model: analog columns charge the same adiabatic ramp as digital ones "
              "(room-temperature generator assumed protocol-compliant)");
  return m;
}

inline const DevicePoint& need_device(const Scenario& sc, const std::string& name) {
  auto it = sc.devices.find(name);
  if (it == sc.devices.end()) throw missing_section("scenario needs a [device " + name + "] section");
  return it->second;
}

inline ScalingPlan run_plan(const Scenario& sc) {
  if (!sc.has_process) throw missing_section("scenario needs a [process] section");
  if (!sc.has_policy) throw missing_section("scenario needs a [policy] section");
  const Baseline base = baseline(sc.rql_gates, need_device(sc, "rql"), need_device(sc, "cmos"), sc.process);
  return plan(sc.policy, base, sc.process);
}

inline std::string opt_power(const std::optional<double>& w) {
  return w ? format_full(*w) : "n/a";
}

}  // namespace detail

// --- plan ----------------------------------------------------------------------

inline CommandResult command_plan(const Scenario& sc, std::uint64_t seed) {
  const ScalingPlan result = detail::run_plan(sc);
  auto meta = detail::base_metadata(sc, "plan", seed);
  meta.push_back("stop_reason = " + std::string(to_string(result.stop_reason)));
  meta.push_back("closed_form_leakage_floor_step = " +
                 std::to_string(leakage_floor_step(sc.policy, result.base, sc.process)));

  detail::Table csv_table({"section", "technology", "gate_count", "clock_rate_hz",
                           "dynamic_power_w", "static_power_w", "area_units"});
  detail::Table text_table({"section", "technology", "N", "f", "P", "P_static", "area"});
  auto add = [&](const std::string& section, const ScalingStep& s) {
    csv_table.row({section, to_string(s.technology), std::to_string(s.gate_count),
                   format_full(s.clock_rate), format_full(s.dynamic_power),
                   detail::opt_power(s.static_power), format_full(s.area_estimate)});
    text_table.row({section, to_string(s.technology), format_eng(static_cast<double>(s.gate_count), ""),
                    format_eng(s.clock_rate, "Hz"), format_eng(s.dynamic_power, "W"),
                    s.static_power ? format_eng(*s.static_power, "W") : "n/a",
                    format_eng(s.area_estimate, "")});
  };
  add("baseline", result.base.rql);
  add("baseline", result.base.cmos);
  for (const auto& s : result.steps) {
    add("scaling_step_" + std::to_string(s.step_index), result.base.rql);
    add("scaling_step_" + std::to_string(s.step_index), s);
  }

  CommandResult out;
  out.artifacts.push_back({"plan", csv_table.csv(meta), text_table.text(meta)});
  out.summary.push_back("plan: " + std::to_string(result.steps.size()) + " scaling steps, stop_reason = " +
                        to_string(result.stop_reason));
  return out;
}

// --- sweep ---------------------------------------------------------------------

struct SweepOutcome {
  std::vector<SweepPoint> adiabatic;
  std::vector<SweepPoint> cmos;
  double adiabatic_slope = 0;
  double cmos_slope = 0;
  double floor_w = 0;
  double max_ratio = 0;
  double max_ratio_frequency = 0;
};

inline SweepOutcome run_sweep(const Scenario& sc) {
  if (!sc.has_process) throw missing_section("scenario needs a [process] section");
  if (!sc.has_sweep) throw missing_section("scenario needs a [sweep] section");
  const SweepSpec& sp = sc.sweep;

  std::vector<double> freqs;
  const double decades = std::log10(sp.f_max / sp.f_min);
  const int points = std::max(2, static_cast<int>(std::round(decades * sp.points_per_decade)) + 1);
  for (int i = 0; i < points; ++i)
    freqs.push_back(sp.f_min * std::pow(10.0, decades * i / (points - 1)));

  Netlist adiabatic = build_shift_register(sp.adiabatic_stages, sc.process);
  Stimulus ones;
  ones.bits["in"] = std::vector<int>{1};
  Netlist cmos = build_cmos_chain(sp.cmos_gates, sc.process);
  Stimulus toggle;
  toggle.bits["in"] = std::vector<int>{1, 0};

  SweepOutcome out;
  out.adiabatic = energy_sweep(adiabatic, sc.process, freqs, sp.duty, ones);
  out.cmos = energy_sweep(cmos, sc.process, freqs, sp.duty, toggle);
  out.adiabatic_slope = fit_loglog_slope(out.adiabatic, sp.adiabatic_band_min, sp.adiabatic_band_max);
  out.cmos_slope = fit_loglog_slope(out.cmos, sp.cmos_band_min, sp.cmos_band_max);
  out.floor_w = static_power(sc.process, sp.duty);
  for (std::size_t i = 0; i < out.adiabatic.size(); ++i) {
    const double ratio = out.cmos[i].power_per_gate / out.adiabatic[i].power_per_gate;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.max_ratio_frequency = out.adiabatic[i].frequency;
    }
  }
  return out;
}

inline CommandResult command_sweep(const Scenario& sc, std::uint64_t seed) {
  const SweepOutcome sw = run_sweep(sc);
  auto meta = detail::base_metadata(sc, "sweep", seed);
  meta.push_back("adiabatic_loglog_slope_vs_period = " + format_full(sw.adiabatic_slope));
  meta.push_back("cmos_loglog_slope_vs_period = " + format_full(sw.cmos_slope));
  meta.push_back("static_floor_w_per_gate = " + format_full(sw.floor_w));
  meta.push_back("max_cmos_to_adiabatic_ratio = " + format_full(sw.max_ratio) + " at " +
                 format_full(sw.max_ratio_frequency) + " Hz");

  detail::Table table({"frequency_hz", "clock_period_s", "technology", "dynamic_w_per_gate",
                       "static_w_per_gate", "power_w_per_gate"});
  detail::Table text_table({"frequency", "technology", "power/gate"});
  auto add = [&](const SweepPoint& p, const char* tech) {
    table.row({format_full(p.frequency), format_full(p.clock_period), tech,
               format_full(p.dynamic_per_gate), format_full(p.static_per_gate),
               format_full(p.power_per_gate)});
    text_table.row({format_eng(p.frequency, "Hz"), tech, format_eng(p.power_per_gate, "W")});
  };
  for (const auto& p : sw.cmos) add(p, "CMOS");
  for (const auto& p : sw.adiabatic) add(p, "2LAL");

  CommandResult out;
  out.artifacts.push_back({"sweep", table.csv(meta), text_table.text(meta)});
  out.summary.push_back("sweep: adiabatic slope " + format_full(sw.adiabatic_slope) + ", CMOS slope " +
                        format_full(sw.cmos_slope) + ", max ratio " + format_full(sw.max_ratio));
  return out;
}

// --- fridge --------------------------------------------------------------------

inline CommandResult command_fridge(const Scenario& sc, std::uint64_t seed) {
  if (sc.stages.empty()) throw missing_section("scenario needs at least one [stage] section");
  auto meta = detail::base_metadata(sc, "fridge", seed);
  detail::Table table({"stage", "temperature_k", "carnot_efficiency", "heat_load_w", "multiplier",
                       "wall_plug_w"});
  detail::Table text_table({"stage", "T", "eta", "Q", "multiplier", "wall plug"});
  double total = wall_plug_power(sc.stages);
  for (const auto& s : sc.stages) {
    const double mult = refrigeration_multiplier(s);
    table.row({s.label, format_full(s.temperature), format_full(s.carnot_efficiency),
               format_full(s.heat_load), format_full(mult), format_full(s.heat_load * mult)});
    text_table.row({s.label, format_eng(s.temperature, "K"), format_full(s.carnot_efficiency),
                    format_eng(s.heat_load, "W"), format_eng(mult, ""),
                    format_eng(s.heat_load * mult, "W")});
  }
  meta.push_back("total_wall_plug_w = " + format_full(total));
  CommandResult out;
  out.artifacts.push_back({"fridge", table.csv(meta), text_table.text(meta)});
  out.summary.push_back("fridge: total wall plug " + format_eng(total, "W"));
  return out;
}

// --- grid ----------------------------------------------------------------------

inline CommandResult command_grid(const Scenario& sc, std::uint64_t seed) {
  if (!sc.has_grid) throw missing_section("scenario needs a [grid] section");
  if (!sc.has_process) throw missing_section("scenario needs a [process] section");
  const GridSpec& gs = sc.grid;

  CellGrid grid = CellGrid::make(gs.rows, gs.cols, gs.tap_kind);
  grid.cell_capacitance = gs.cell_capacitance;
  grid.column_line_capacitance = gs.column_capacitance;
  grid.tap_load_capacitance = gs.tap_load;
  grid.row_v_low = gs.row_v_low;
  grid.row_v_high = gs.row_v_high;
  grid.data_v_low = gs.data_v_low;
  grid.data_v_high = gs.data_v_high;
  grid.validate();

  UpdateSession session = make_session(grid, sc.process, ClockSpec::at(gs.clock, 0, sc.process.swing));
  std::mt19937_64 rng(seed);

  auto random_values = [&]() {
    std::vector<double> v(static_cast<std::size_t>(gs.cols));
    for (auto& x : v) {
      if (gs.tap_kind == TapKind::Analog) {
        x = std::uniform_real_distribution<double>(-kAnalogRangeV, kAnalogRangeV)(rng);
      } else {
        x = (rng() & 1) ? grid.data_v_high : grid.data_v_low;
      }
    }
    return v;
  };

  for (int u = 0; u < gs.updates; ++u) {
    const int row = static_cast<int>(rng() % static_cast<std::uint64_t>(gs.rows));
    if (gs.corrupt > 0 && u == gs.updates - 1) {
      for (int c = 0; c < std::min(gs.corrupt, gs.cols); ++c) {
        const std::size_t idx = grid.index(row, c);
        session.shadow[idx] = session.shadow[idx] == grid.data_v_high ? grid.data_v_low
                                                                      : grid.data_v_high;
      }
    }
    full_row_update(session, grid, row, random_values());
  }

  auto meta = detail::base_metadata(sc, "grid", seed);
  meta.push_back("updates = " + std::to_string(gs.updates));
  meta.push_back("violations = " + std::to_string(session.violation_count));
  meta.push_back("reference_state = " +
                 std::string(verify_reference_state(session, grid) ? "ok" : "inconsistent"));
  meta.push_back("ledger_channel_j = " + format_full(session.ledger.total(EnergyLocation::Channel)));
  meta.push_back("ledger_rail_return_j = " + format_full(session.ledger.total(EnergyLocation::RailReturn)));

  detail::Table table({"step", "row", "channel_j", "rail_return_j", "violations"});
  for (const auto& r : session.transcript)
    table.row({r.step, std::to_string(r.row), format_full(r.channel_joules),
               format_full(r.rail_return_joules), std::to_string(r.violations)});

  detail::Table snapshot({"row", "col", "tap_kind", "volts", "access"});
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c)
      snapshot.row({std::to_string(r), std::to_string(c), to_string(grid.tap_at(r, c)),
                    format_full(grid.at(r, c)), grid.access_on(r, c) ? "on" : "off"});

  detail::Table ledger({"time_s", "event", "location", "joules", "adiabatic_flag"});
  for (const auto& e : session.ledger.events)
    ledger.row({format_full(e.time), e.detail, to_string(e.location), format_full(e.joules),
                e.adiabatic ? "1" : "0"});

  CommandResult out;
  out.artifacts.push_back({"grid_transcript", table.csv(meta), table.text(meta)});
  out.artifacts.push_back({"grid_snapshot", snapshot.csv(meta), snapshot.text(meta)});
  out.artifacts.push_back({"grid_ledger", ledger.csv(meta), ledger.text(meta)});
  out.violation = session.violation_count > 0;
  out.summary.push_back("grid: " + std::to_string(gs.updates) + " updates, " +
                        std::to_string(session.violation_count) + " non-adiabatic violations");
  return out;
}

// --- pipeline --------------------------------------------------------------------

inline CommandResult command_pipeline(const Scenario& sc, std::uint64_t seed) {
  if (!sc.has_pipeline) throw missing_section("scenario needs a [pipeline] section");
  const PipelineSpec& ps = sc.pipeline;

  StorePlan plan_;
  plan_.word_width = ps.word_width;
  plan_.depth = ps.depth;
  plan_.clock = ps.clock;
  plan_.loopback = ps.loopback;

  std::mt19937_64 rng(seed);
  const int payload = ps.payload_words > 0 ? ps.payload_words : ps.depth;
  std::vector<std::vector<std::uint8_t>> words(static_cast<std::size_t>(payload));
  for (auto& w : words) {
    w.resize(static_cast<std::size_t>(ps.word_width));
    for (auto& b : w) b = static_cast<std::uint8_t>(rng() & 1);
  }
  SequentialStore store = load_store(plan_, std::move(words));

  std::vector<MuxStage> stages;
  int width = ps.word_width;
  for (int ratio : ps.ratios) {
    stages.push_back({ratio, width});
    stages.back().validate();
    width = stages.back().output_width();
  }

  std::vector<ScalingStep> binding;
  if (sc.has_policy && sc.has_process && sc.devices.count("rql") && sc.devices.count("cmos")) {
    // Store at the deepest scaling step, mux levels at progressively faster rows.
    const ScalingPlan sp = detail::run_plan(sc);
    if (sp.steps.size() >= stages.size() + 1) {
      for (std::size_t i = 0; i <= stages.size(); ++i)
        binding.push_back(sp.steps[sp.steps.size() - 1 - i]);
    }
  }

  const std::int64_t stored_bits = static_cast<std::int64_t>(store.words.size()) * ps.word_width;
  const std::int64_t ticks = ps.output_ticks > 0 ? ps.output_ticks : stored_bits / width;
  PipelineRun run = run_pipeline(store, stages, ticks, binding);

  // Bit-exactness audit against the flattened payload.
  bool exact = true;
  std::int64_t checked = 0;
  for (std::int64_t t = 0; t < ticks && exact; ++t) {
    for (int b = 0; b < width; ++b) {
      const std::int64_t idx = (t * width + b) % stored_bits;
      if (run.output[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)] !=
          store.words[static_cast<std::size_t>(idx / ps.word_width)][static_cast<std::size_t>(idx % ps.word_width)]) {
        exact = false;
        break;
      }
      ++checked;
    }
  }

  auto meta = detail::base_metadata(sc, "pipeline", seed);
  meta.push_back("latency_s = " + format_full(run.report.latency_s));
  meta.push_back("latency_bound_s = " + format_full(run.report.latency_bound_s));
  meta.push_back("bit_exact = " + std::string(exact ? "ok" : "FAILED") + " over " +
                 std::to_string(checked) + " bits");
  if (run.report.total_power > 0)
    meta.push_back("attributed_power_w = " + format_full(run.report.total_power));

  detail::Table table({"boundary", "width_bits", "clock_hz", "bandwidth_bit_per_s", "gates",
                       "energy_per_op_j", "power_w"});
  for (std::size_t i = 0; i < run.report.boundaries.size(); ++i) {
    const auto& b = run.report.boundaries[i];
    std::string gates = "n/a", eop = "n/a", pw = "n/a";
    if (i < run.report.energy.size()) {
      gates = format_full(run.report.energy[i].gates);
      eop = format_full(run.report.energy[i].energy_per_op);
      pw = format_full(run.report.energy[i].gates * run.report.energy[i].energy_per_op * b.clock);
    }
    table.row({b.name, std::to_string(b.width), format_full(b.clock),
               format_full(b.bandwidth_bits_per_s), gates, eop, pw});
  }

  // The output stream itself, one output word per line.
  std::ostringstream stream_bits;
  for (const auto& m : meta) stream_bits << "# " << m << "\n";
  for (const auto& tick : run.output) {
    for (std::uint8_t b : tick) stream_bits << (b ? '1' : '0');
    stream_bits << "\n";
  }

  CommandResult out;
  out.artifacts.push_back({"pipeline_report", table.csv(meta), table.text(meta)});
  out.artifacts.push_back({"pipeline_stream", stream_bits.str(), stream_bits.str()});
  out.violation = !exact;
  out.summary.push_back("pipeline: " + std::to_string(ticks) + " output ticks, bandwidth " +
                        format_eng(run.report.boundaries.front().bandwidth_bits_per_s, "bit/s") +
                        (exact ? ", bit-exact" : ", REASSEMBLY FAILED"));
  return out;
}

// --- controller --------------------------------------------------------------------

namespace detail {

// One CLB function across the fabric; routers stay straight so any layout
// remains acyclic.
inline std::vector<std::uint8_t> uniform_config(const Fabric& fabric, std::uint8_t clb_setting) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(fabric.config_length()));
  for (int i = 0; i < fabric.cell_count(); ++i) {
    const std::uint8_t setting =
        fabric.layout[static_cast<std::size_t>(i)] == CellKind::Clb
            ? clb_setting
            : static_cast<std::uint8_t>(RouterSetting::Straight);
    bits[static_cast<std::size_t>(2 * i)] = (setting >> 1) & 1;
    bits[static_cast<std::size_t>(2 * i + 1)] = setting & 1;
  }
  return bits;
}

}  // namespace detail

inline CommandResult command_controller(const Scenario& sc, std::uint64_t seed) {
  if (!sc.has_controller) throw missing_section("scenario needs a [controller] section");
  const ControllerSpec& cs = sc.controller;

  Fabric fabric = cs.layout.empty()
                      ? Fabric::make(cs.fabric_rows, cs.fabric_cols,
                                     std::vector<CellKind>(static_cast<std::size_t>(cs.fabric_rows) *
                                                               static_cast<std::size_t>(cs.fabric_cols),
                                                           CellKind::Clb))
                      : Fabric::from_rows(cs.layout);

  ConfigBuffer buffer;
  buffer.rotation_clock = cs.rotation_clock;
  // Four distinct modes; with an all-CLB fabric these are the four uniform
  // function fabrics.
  load_buffer(buffer,
              {detail::uniform_config(fabric, 0), detail::uniform_config(fabric, 1),
               detail::uniform_config(fabric, 2), detail::uniform_config(fabric, 3)},
              {"calibration", "initialization", "arithmetic", "readout"});

  SequencePlan plan_;
  plan_.modes = {{"calibration", cs.calibration.value()},
                 {"initialization", cs.initialization},
                 {"arithmetic", cs.arithmetic},
                 {"readout", cs.readout}};
  plan_.rql_clock = cs.rql_clock;
  plan_.decoherence_budget = cs.decoherence_budget;

  FeedbackQueue feedback;
  if (cs.branch_time)
    feedback_inject(feedback, {*cs.branch_time, cs.branch_target});

  const TimingReport report = run_sequence(plan_, buffer, fabric, feedback);

  auto meta = detail::base_metadata(sc, "controller", seed);
  meta.push_back("rotation_time_s = " + format_full(report.rotation_time));
  meta.push_back("rotations = " + std::to_string(report.rotations));
  meta.push_back("reconfiguration_overhead_s = " + format_full(report.reconfiguration_overhead));
  meta.push_back("decoherence_budget_s = " + format_full(plan_.decoherence_budget));
  meta.push_back("budget = " + std::string(report.budget_ok ? "ok" : "VIOLATION: " + report.budget_violation));
  meta.push_back("mutual_exclusion = " + std::string(report.mutual_exclusion_ok ? "ok" : "VIOLATION"));
  meta.push_back("serial_load_time_s = " + format_full(buffer.serial_load_time()));
  meta.push_back("config_bits_k = " + std::to_string(buffer.width_k));

  detail::Table table({"event", "kind", "start_s", "duration_s"});
  for (const auto& e : report.timeline)
    table.row({e.name, e.kind, format_full(e.start), format_full(e.duration)});

  detail::Table configs({"stage", "mode", "hex_bits"});
  for (int i = 0; i < ConfigBuffer::kStages; ++i)
    configs.row({std::to_string(i), buffer.stage_name[static_cast<std::size_t>(i)],
                 bits_to_hex(buffer.stage[static_cast<std::size_t>(i)])});

  CommandResult out;
  out.artifacts.push_back({"controller_timeline", table.csv(meta), table.text(meta)});
  out.artifacts.push_back({"controller_configs", configs.csv(meta), configs.text(meta)});
  out.violation = !report.budget_ok || !report.mutual_exclusion_ok;
  out.summary.push_back("controller: " + std::to_string(report.rotations) + " rotations, overhead " +
                        format_eng(report.reconfiguration_overhead, "s") +
                        (report.budget_ok ? ", budget ok" : ", BUDGET VIOLATION"));
  return out;
}

// --- simulate ---------------------------------------------------------------------

inline CommandResult command_simulate(const Scenario& sc, std::uint64_t seed) {
  if (!sc.has_circuit) throw missing_section("scenario needs a [circuit] section");
  if (!sc.has_process) throw missing_section("scenario needs a [process] section");
  const CircuitSpec& cs = sc.circuit;

  Netlist netlist;
  if (cs.kind == "shift_register") netlist = build_shift_register(cs.stages, sc.process);
  else if (cs.kind == "shift_ring") netlist = build_shift_register(cs.stages, sc.process, true, cs.ring_tokens);
  else if (cs.kind == "and_gate") netlist = build_and_gate(sc.process);
  else if (cs.kind == "cmos_chain") netlist = build_cmos_chain(cs.stages, sc.process);
  else throw missing_section("unknown circuit kind '" + cs.kind + "'");

  Stimulus stim;
  for (const auto& [port, pattern] : cs.stimulus) {
    std::vector<int> bits;
    for (char ch : pattern)
      if (ch == '0' || ch == '1') bits.push_back(ch - '0');
    stim.bits[port] = bits;
  }

  const ClockSpec clock = ClockSpec::at(cs.frequency, 0, sc.process.swing);
  const SimResult sim = simulate(netlist, clock, stim, cs.cycles);

  auto meta = detail::base_metadata(sc, "simulate", seed);
  meta.push_back("circuit = " + cs.kind);
  meta.push_back("channel_j = " + format_full(sim.trace.total(EnergyLocation::Channel)));
  meta.push_back("rail_return_j = " + format_full(sim.trace.total(EnergyLocation::RailReturn)));
  meta.push_back("non_adiabatic_events = " + std::to_string(sim.trace.count_non_adiabatic()));
  for (const auto& port : netlist.ports) {
    if (port.is_input) continue;
    std::string bits;
    for (int b : sim.sampled_bits(netlist, port.signal, 0.5 * (clock.v_low + clock.v_high)))
      bits += b ? '1' : '0';
    meta.push_back("port " + port.name + " = " + bits);
  }

  std::vector<std::string> header{"time_s"};
  for (const auto& s : netlist.signals) header.push_back(s.name + "_v");
  detail::Table wave(header);
  for (int q = 0; q < sim.quarters; ++q) {
    std::vector<std::string> row{format_full((q + 1) * sim.quarter_time)};
    for (std::size_t s = 0; s < netlist.signals.size(); ++s)
      row.push_back(format_full(sim.signal_voltage[static_cast<std::size_t>(q)][s]));
    wave.row(std::move(row));
  }

  detail::Table trace({"time_s", "event", "location", "joules", "adiabatic_flag"});
  for (const auto& e : sim.trace.events)
    trace.row({format_full(e.time), e.detail, to_string(e.location), format_full(e.joules),
               e.adiabatic ? "1" : "0"});

  CommandResult out;
  out.artifacts.push_back({"waveform", wave.csv(meta), wave.text(meta)});
  out.artifacts.push_back({"trace", trace.csv(meta), trace.text(meta)});
  out.summary.push_back("simulate: " + std::to_string(cs.cycles) + " cycles of " + cs.kind +
                        ", channel " + format_eng(sim.trace.total(EnergyLocation::Channel), "J"));
  return out;
}

// --- dispatch ----------------------------------------------------------------------

inline CommandResult run_command(const Scenario& sc, const std::string& command,
                                 std::uint64_t seed = 1) {
  if (command == "plan") return command_plan(sc, seed);
  if (command == "sweep") return command_sweep(sc, seed);
  if (command == "fridge") return command_fridge(sc, seed);
  if (command == "grid") return command_grid(sc, seed);
  if (command == "pipeline") return command_pipeline(sc, seed);
  if (command == "controller") return command_controller(sc, seed);
  if (command == "simulate") return command_simulate(sc, seed);
  throw std::invalid_argument("unknown command '" + command + "'");
}

// Writes each artifact in the chosen format; byte-stable for identical inputs.
inline std::vector<std::string> emit_report(const CommandResult& result, const std::string& format,
                                            const std::string& out_dir) {
  if (format != "csv" && format != "text")
    throw std::invalid_argument("format must be csv or text");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> paths;
  for (const auto& a : result.artifacts) {
    const std::string path =
        (std::filesystem::path(out_dir) / (a.basename + (format == "csv" ? ".csv" : ".txt"))).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << (format == "csv" ? a.csv : a.text);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace cryosim
