#pragma once

// Tapped control-signal grid: the four-step adiabatic row-update protocol,
// the floating-supply SRAM cell cycle, and behavioral conversion elements
// (superconducting FET, SFQ interrupter).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cryosim/device_models.hpp"
#include "cryosim/energy_trace.hpp"

namespace cryosim {

enum class TapKind { Digital, Analog, SfetGate };

inline const char* to_string(TapKind k) {
  switch (k) {
    case TapKind::Digital: return "digital";
    case TapKind::Analog: return "analog";
    case TapKind::SfetGate: return "sfet_gate";
  }
  return "?";
}

constexpr double kAnalogRangeV = 1.0;  // spin-qubit DC bias bound, +/- 1 V

// DRAM-style grid of tapped storage cells. Values are the programmable
// voltages on the capacitor plates; the asserted row is derived state.
struct CellGrid {
  int rows = 1;
  int cols = 1;
  double cell_capacitance = 1e-15;         // F, storage plate
  double column_line_capacitance = 1e-15;  // F per column line
  double tap_load_capacitance = 0.0;       // F, control-signal load per cell
  double row_v_low = 0.0, row_v_high = 2.5;    // row decoder clock swing
  double data_v_low = 0.0, data_v_high = 1.0;  // column data clock swing
  std::vector<TapKind> tap;        // per cell, row-major
  std::vector<double> cell_value;  // volts, row-major
  int asserted_row = -1;           // -1: all access transistors off

  static CellGrid make(int rows, int cols, TapKind kind = TapKind::Digital) {
    CellGrid g;
    g.rows = rows;
    g.cols = cols;
    g.tap.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), kind);
    const double idle = kind == TapKind::Analog ? 0.0 : g.data_v_low;
    g.cell_value.assign(g.tap.size(), idle);
    g.validate();
    return g;
  }

  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
  }
  double& at(int r, int c) { return cell_value[index(r, c)]; }
  double at(int r, int c) const { return cell_value[index(r, c)]; }
  TapKind tap_at(int r, int c) const { return tap[index(r, c)]; }

  bool value_ok(TapKind kind, double v) const {
    if (kind == TapKind::Analog) return v >= -kAnalogRangeV && v <= kAnalogRangeV;
    return v == data_v_low || v == data_v_high;
  }

  // Column lines idle at the low data level between updates.
  double column_idle() const { return data_v_low; }

  // Access transistors are a derived 1-of-N state of the asserted row.
  bool access_on(int r, int c) const { return r == asserted_row && c >= 0 && c < cols; }

  bool in_reference_state() const { return asserted_row < 0; }

  void validate() const {
    if (rows < 0 || cols < 0) throw std::invalid_argument("grid: negative dimensions");
    if (!(cell_capacitance > 0) || !(column_line_capacitance > 0))
      throw std::invalid_argument("grid: capacitances must be > 0");
    if (tap_load_capacitance < 0) throw std::invalid_argument("grid: tap load must be >= 0");
    if (!(row_v_high > row_v_low) || !(data_v_high > data_v_low))
      throw std::invalid_argument("grid: rail swings must be positive");
    const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (tap.size() != n || cell_value.size() != n)
      throw std::invalid_argument("grid: cell arrays do not match dimensions");
    for (std::size_t i = 0; i < n; ++i)
      if (!value_ok(tap[i], cell_value[i]))
        throw std::invalid_argument("grid: cell value outside its tap range at index " + std::to_string(i));
  }
};

enum class UpdateStage { Idle, ColumnsDriven, RowAsserted, Written };

inline const char* to_string(UpdateStage s) {
  switch (s) {
    case UpdateStage::Idle: return "idle";
    case UpdateStage::ColumnsDriven: return "columns_driven";
    case UpdateStage::RowAsserted: return "row_asserted";
    case UpdateStage::Written: return "written";
  }
  return "?";
}

struct ProtocolRecord {
  std::string step;
  int row = -1;
  double channel_joules = 0;
  double rail_return_joules = 0;
  int violations = 0;
};

// Protocol state for one external processor working a grid. The shadow copy
// is the processor's image of every programmable voltage; the session is
// inconsistent whenever Idle is reached with shadow != grid.
struct UpdateSession {
  std::vector<double> shadow;
  UpdateStage stage = UpdateStage::Idle;
  int active_row = -1;
  EnergyTrace ledger;
  int violation_count = 0;
  bool inconsistent = false;
  double ramp_time = 0;  // s, from the 2LAL clock driving decoder and columns
  double on_resistance = 3e3;
  double access_gate_capacitance = 1e-15;  // per access transistor, row line load
  double time = 0;
  std::vector<double> driven_columns;  // column line voltages while active
  std::vector<ProtocolRecord> transcript;
};

inline UpdateSession make_session(const CellGrid& grid, const TransistorProcess& p,
                                  const ClockSpec& clock) {
  grid.validate();
  p.validate();
  clock.validate();
  UpdateSession s;
  s.shadow = grid.cell_value;
  s.ramp_time = clock.ramp_time();
  s.on_resistance = p.on_resistance;
  s.access_gate_capacitance = p.node_capacitance;
  return s;
}

namespace detail {

// Books one adiabatic ramp: channel share through the access/drive path and
// the remainder returned on the clock lead.
inline void book_ramp(UpdateSession& s, ProtocolRecord& rec, double capacitance, double dv,
                      const std::string& what) {
  if (dv == 0) return;
  const double signal = 0.5 * capacitance * dv * dv;
  const double channel = adiabatic_ramp_energy(capacitance, std::abs(dv), s.on_resistance, s.ramp_time);
  s.ledger.add(s.time, EnergyLocation::Channel, channel, true, what);
  s.ledger.add(s.time, EnergyLocation::RailReturn, signal - channel, true, what);
  rec.channel_joules += channel;
  rec.rail_return_joules += signal - channel;
}

}  // namespace detail

// Step 1: the processor drives its copy of the row's values onto the column
// lines. All access transistors are off, so nothing flows into the cells.
inline void drive_columns(UpdateSession& s, CellGrid& grid, int row) {
  if (s.stage != UpdateStage::Idle)
    throw std::logic_error("drive_columns: session not in Idle");
  if (row < 0 || row >= grid.rows) throw std::invalid_argument("drive_columns: row out of range");
  ProtocolRecord rec{"drive_columns", row, 0, 0, 0};
  s.driven_columns.resize(static_cast<std::size_t>(grid.cols));
  for (int c = 0; c < grid.cols; ++c) {
    const double target = s.shadow[grid.index(row, c)];
    s.driven_columns[static_cast<std::size_t>(c)] = target;
    detail::book_ramp(s, rec, grid.column_line_capacitance, target - grid.column_idle(),
                      "col" + std::to_string(c));
  }
  s.active_row = row;
  s.stage = UpdateStage::ColumnsDriven;
  s.time += s.ramp_time;
  s.transcript.push_back(rec);
}

// Step 2: the row decoder raises the 1-of-N row line. Every cell whose plate
// disagrees with its column equalizes abruptly through the access transistor;
// those are the protocol's non-adiabatic violations.
inline void assert_row(UpdateSession& s, CellGrid& grid) {
  if (s.stage != UpdateStage::ColumnsDriven)
    throw std::logic_error("assert_row: columns not driven");
  ProtocolRecord rec{"assert_row", s.active_row, 0, 0, 0};
  const double row_line_c = grid.cols * s.access_gate_capacitance;
  detail::book_ramp(s, rec, row_line_c, grid.row_v_high - grid.row_v_low, "row_line");
  for (int c = 0; c < grid.cols; ++c) {
    double& cell = grid.at(s.active_row, c);
    const double dv = s.driven_columns[static_cast<std::size_t>(c)] - cell;
    if (dv != 0) {
      const double loss = 0.5 * grid.cell_capacitance * dv * dv;
      s.ledger.add(s.time, EnergyLocation::Channel, loss, false,
                   "stale_cell_r" + std::to_string(s.active_row) + "c" + std::to_string(c));
      rec.channel_joules += loss;
      ++rec.violations;
      ++s.violation_count;
      cell = s.driven_columns[static_cast<std::size_t>(c)];
    }
  }
  grid.asserted_row = s.active_row;
  s.stage = UpdateStage::RowAsserted;
  s.time += s.ramp_time;
  s.transcript.push_back(rec);
}

// Step 3: new values ramp through the open access transistors onto the
// plates and their tap loads. Everything is validated before any mutation.
inline void write_columns(UpdateSession& s, CellGrid& grid, const std::vector<double>& new_values) {
  if (s.stage != UpdateStage::RowAsserted)
    throw std::logic_error("write_columns: row not asserted");
  if (static_cast<int>(new_values.size()) != grid.cols)
    throw std::invalid_argument("write_columns: need one value per column");
  for (int c = 0; c < grid.cols; ++c)
    if (!grid.value_ok(grid.tap_at(s.active_row, c), new_values[static_cast<std::size_t>(c)]))
      throw std::invalid_argument("write_columns: value out of range for column " + std::to_string(c));

  ProtocolRecord rec{"write_columns", s.active_row, 0, 0, 0};
  for (int c = 0; c < grid.cols; ++c) {
    double& cell = grid.at(s.active_row, c);
    const double target = new_values[static_cast<std::size_t>(c)];
    detail::book_ramp(s, rec, grid.cell_capacitance + grid.tap_load_capacitance, target - cell,
                      "cell_r" + std::to_string(s.active_row) + "c" + std::to_string(c));
    cell = target;
    s.shadow[grid.index(s.active_row, c)] = target;
    s.driven_columns[static_cast<std::size_t>(c)] = target;
  }
  s.stage = UpdateStage::Written;
  s.time += s.ramp_time;
  s.transcript.push_back(rec);
}

// Step 4: the decoder drops the row line and the columns ramp back to idle,
// returning the grid to the reference state.
inline void release_row(UpdateSession& s, CellGrid& grid) {
  if (s.stage != UpdateStage::Written) throw std::logic_error("release_row: nothing written");
  ProtocolRecord rec{"release_row", s.active_row, 0, 0, 0};
  const double row_line_c = grid.cols * s.access_gate_capacitance;
  detail::book_ramp(s, rec, row_line_c, grid.row_v_low - grid.row_v_high, "row_line");
  for (int c = 0; c < grid.cols; ++c)
    detail::book_ramp(s, rec, grid.column_line_capacitance,
                      grid.column_idle() - s.driven_columns[static_cast<std::size_t>(c)], "col" + std::to_string(c));
  grid.asserted_row = -1;
  s.active_row = -1;
  s.driven_columns.clear();
  s.stage = UpdateStage::Idle;
  if (s.shadow != grid.cell_value) s.inconsistent = true;
  s.time += s.ramp_time;
  s.transcript.push_back(rec);
}

inline bool verify_reference_state(const UpdateSession& s, const CellGrid& grid) {
  return grid.in_reference_state() && !s.inconsistent && s.shadow == grid.cell_value &&
         s.stage == UpdateStage::Idle;
}

// Full four-step cycle on one row.
inline void full_row_update(UpdateSession& s, CellGrid& grid, int row,
                            const std::vector<double>& new_values) {
  drive_columns(s, grid, row);
  assert_row(s, grid);
  write_columns(s, grid, new_values);
  release_row(s, grid);
}

// --- Adiabatic SRAM ----------------------------------------------------------

struct SramCell {
  double node_capacitance = 1e-15;  // per internal storage node of the pair
  int stored_bit = 0;
  // Residual voltage across the pair when the flip happens at the bottom of
  // the power-down; zero in the idealized cycle.
  double switch_residual_v = 0.0;
};

struct SramUpdateEnergy {
  double power_down = 0;
  double power_up = 0;
  double switch_event = 0;
  double total() const { return power_down + power_up + switch_event; }
};

// Floating-supply cycle: ramp the cell's supply down, flip the cross-coupled
// pair at (near) zero stored energy, ramp back up in the new state.
inline SramUpdateEnergy sram_update(SramCell& cell, int new_bit, const TransistorProcess& p,
                                    const ClockSpec& clock) {
  p.validate();
  clock.validate();
  SramUpdateEnergy e;
  const double t = clock.ramp_time();
  e.power_down = adiabatic_ramp_energy(cell.node_capacitance, p.swing, p.on_resistance, t);
  e.power_up = adiabatic_ramp_energy(cell.node_capacitance, p.swing, p.on_resistance, t);
  if (new_bit != cell.stored_bit) {
    const double dv = cell.switch_residual_v;
    e.switch_event = 0.5 * cell.node_capacitance * dv * dv;
  }
  cell.stored_bit = new_bit ? 1 : 0;
  return e;
}

// CMOS-style comparison point: the write simply overpowers the cross-coupled
// pair, slamming both internal nodes across the full swing.
inline double sram_overpower_write_energy(const SramCell& cell, const TransistorProcess& p) {
  p.validate();
  return 2.0 * cmos_transition_energy(cell.node_capacitance, p.swing);
}

inline int sram_tap(const SramCell& cell) { return cell.stored_bit; }

// --- Conversion elements ------------------------------------------------------

// Superconducting FET: the weak link's critical current collapses once the
// gate sees a few volts of either sign.
struct SfetModel {
  double critical_current_nominal = 100e-6;    // A
  double gate_threshold = 2.5;                 // V
  double critical_current_suppressed = 50e-6;  // A

  void validate() const {
    if (!(critical_current_suppressed >= 0 &&
          critical_current_suppressed < critical_current_nominal))
      throw std::invalid_argument("sfet: need 0 <= suppressed < nominal");
    if (!(gate_threshold > 0)) throw std::invalid_argument("sfet: gate_threshold must be > 0");
  }
};

inline double sfet_output(double gate_voltage, const SfetModel& m) {
  m.validate();
  return std::abs(gate_voltage) >= m.gate_threshold ? m.critical_current_suppressed
                                                    : m.critical_current_nominal;
}

// Single-flux-quantum pulse on a matched line.
struct SfqPulse {
  double amplitude = 1e-3;     // V
  double width = 2e-12;        // s
  double line_impedance = 15;  // ohm

  double energy() const { return amplitude * amplitude * width / line_impedance; }
  double flux() const { return amplitude * width; }
};

struct SfqTransmission {
  bool transmitted = false;
  SfqPulse pulse;  // outgoing pulse when transmitted
  double incident_energy = 0;
  double transmitted_energy = 0;
  double dissipated_energy = 0;
};

// A large FET in series with the line passes the pulse through a resistive
// divider when on and blocks it entirely when off.
inline SfqTransmission sfq_transmit(const SfqPulse& pulse, bool transistor_on, double r_on) {
  if (!(r_on >= 0)) throw std::invalid_argument("sfq_transmit: r_on must be >= 0");
  SfqTransmission out;
  out.incident_energy = pulse.energy();
  if (!transistor_on) {
    out.transmitted = false;
    out.dissipated_energy = out.incident_energy;
    return out;
  }
  const double factor = pulse.line_impedance / (pulse.line_impedance + r_on);
  out.transmitted = true;
  out.pulse = pulse;
  out.pulse.amplitude = pulse.amplitude * factor;
  out.transmitted_energy = out.pulse.energy();
  out.dissipated_energy = out.incident_energy - out.transmitted_energy;
  return out;
}

}  // namespace cryosim
