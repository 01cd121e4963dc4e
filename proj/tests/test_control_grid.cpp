#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "cryosim/control_grid.hpp"

using namespace cryosim;

namespace {

TransistorProcess reference_process() {
  TransistorProcess p;
  p.node_capacitance = 1e-15;
  p.on_resistance = 3e3;
  p.swing = 1.0;
  p.on_off_ratio = 1e8;
  return p;
}

std::vector<double> random_digital_row(const CellGrid& g, std::mt19937_64& rng) {
  std::vector<double> v(static_cast<std::size_t>(g.cols));
  for (auto& x : v) x = (rng() & 1) ? g.data_v_high : g.data_v_low;
  return v;
}

}  // namespace

TEST_CASE("four-step protocol: consistent updates stay adiabatic") {
  const TransistorProcess p = reference_process();
  CellGrid grid = CellGrid::make(4, 8);
  UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));
  std::mt19937_64 rng(11);

  for (int i = 0; i < 20; ++i) {
    const int row = static_cast<int>(rng() % 4);
    full_row_update(s, grid, row, random_digital_row(grid, rng));
    CHECK(verify_reference_state(s, grid));
  }
  CHECK(s.violation_count == 0);
  CHECK(s.ledger.count_non_adiabatic() == 0);
  CHECK(s.ledger.total(EnergyLocation::Channel) > 0);
}

TEST_CASE("protocol stage machine rejects out-of-order steps") {
  const TransistorProcess p = reference_process();
  CellGrid grid = CellGrid::make(2, 4);
  UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));

  CHECK_THROWS_AS(assert_row(s, grid), std::logic_error);
  drive_columns(s, grid, 0);
  CHECK_THROWS_AS(drive_columns(s, grid, 0), std::logic_error);
  CHECK_THROWS_AS(release_row(s, grid), std::logic_error);
  assert_row(s, grid);
  CHECK_THROWS_AS(release_row(s, grid), std::logic_error);  // write is not optional
  write_columns(s, grid, std::vector<double>(4, 0.0));
  release_row(s, grid);
  CHECK(verify_reference_state(s, grid));
}

TEST_CASE("column drive energy: 100 columns at 1 V in 3 ns cost 100 aJ") {
  const TransistorProcess p = reference_process();
  CellGrid grid = CellGrid::make(1, 100);
  for (auto& v : grid.cell_value) v = grid.data_v_high;  // stored pattern: all ones
  const ClockSpec clock{1.0 / (4.0 * 3e-9), 0, 1};
  UpdateSession s = make_session(grid, p, clock);
  drive_columns(s, grid, 0);
  CHECK(s.transcript.back().channel_joules == Catch::Approx(100e-18).epsilon(1e-9));
}

TEST_CASE("empty grid advances without energy") {
  const TransistorProcess p = reference_process();
  CellGrid grid = CellGrid::make(1, 0);
  UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));
  drive_columns(s, grid, 0);
  CHECK(s.stage == UpdateStage::ColumnsDriven);
  CHECK(s.ledger.total() == 0.0);
}

TEST_CASE("stale shadow entries become counted half-C-dV^2 events") {
  const TransistorProcess p = reference_process();

  SECTION("one stale cell is one 0.5 fJ violation") {
    CellGrid grid = CellGrid::make(2, 8);
    UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));
    s.shadow[grid.index(1, 3)] = grid.data_v_high;  // cell itself stays low
    drive_columns(s, grid, 1);
    assert_row(s, grid);
    CHECK(s.violation_count == 1);
    CHECK(s.transcript.back().violations == 1);
    // 1-of-N: only the addressed row's access transistors conduct.
    for (int r = 0; r < grid.rows; ++r)
      for (int c = 0; c < grid.cols; ++c) CHECK(grid.access_on(r, c) == (r == 1));
    double violation_energy = 0;
    for (const auto& e : s.ledger.events)
      if (!e.adiabatic) violation_energy += e.joules;
    CHECK(violation_energy == Catch::Approx(0.5e-15).epsilon(1e-12));
    // The driven column wins; grid and shadow agree again.
    CHECK(grid.at(1, 3) == grid.data_v_high);
  }

  SECTION("corrupting k entries yields exactly k events") {
    std::mt19937_64 rng(5);
    for (int k : {1, 3, 7}) {
      CellGrid grid = CellGrid::make(2, 10);
      UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));
      for (int c = 0; c < k; ++c)
        s.shadow[grid.index(0, c)] = grid.data_v_high;
      full_row_update(s, grid, 0, random_digital_row(grid, rng));
      CHECK(s.violation_count == k);
      CHECK(s.ledger.count_non_adiabatic() == static_cast<std::size_t>(k));
      CHECK(verify_reference_state(s, grid));
    }
  }
}

TEST_CASE("full-row update energy equals the analytic ramp sum") {
  const TransistorProcess p = reference_process();
  CellGrid grid = CellGrid::make(3, 12);
  grid.tap_load_capacitance = 0.5e-15;
  const ClockSpec clock = ClockSpec::at(4e6, 0, 1);
  UpdateSession s = make_session(grid, p, clock);
  std::mt19937_64 rng(3);

  // Seed the row with a known pattern through one update, then measure the
  // second update against the closed-form sum.
  const auto old_values = random_digital_row(grid, rng);
  full_row_update(s, grid, 1, old_values);
  const auto new_values = random_digital_row(grid, rng);
  const double before = s.ledger.total(EnergyLocation::Channel);
  full_row_update(s, grid, 1, new_values);
  const double measured = s.ledger.total(EnergyLocation::Channel) - before;

  const double t = clock.ramp_time();
  double analytic = 0;
  // Row line up and down.
  analytic += 2 * adiabatic_ramp_energy(12 * p.node_capacitance, grid.row_v_high - grid.row_v_low,
                                        p.on_resistance, t);
  for (int c = 0; c < grid.cols; ++c) {
    // Columns ramp up to the shadow value and back down from the new value.
    analytic += adiabatic_ramp_energy(grid.column_line_capacitance,
                                      std::abs(old_values[static_cast<std::size_t>(c)]), p.on_resistance, t);
    analytic += adiabatic_ramp_energy(grid.column_line_capacitance,
                                      std::abs(new_values[static_cast<std::size_t>(c)]), p.on_resistance, t);
    // Changed cells ramp across the difference.
    const double dv = std::abs(new_values[static_cast<std::size_t>(c)] - old_values[static_cast<std::size_t>(c)]);
    analytic += adiabatic_ramp_energy(grid.cell_capacitance + grid.tap_load_capacitance, dv,
                                      p.on_resistance, t);
  }
  CHECK(measured == Catch::Approx(analytic).epsilon(0.01));
}

TEST_CASE("write validation and analog pass-through") {
  const TransistorProcess p = reference_process();

  SECTION("digital values outside the swing are rejected before mutation") {
    CellGrid grid = CellGrid::make(1, 4);
    UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));
    drive_columns(s, grid, 0);
    assert_row(s, grid);
    std::vector<double> bad{0.0, 0.3, 1.0, 0.0};
    CHECK_THROWS_AS(write_columns(s, grid, bad), std::invalid_argument);
    CHECK_THROWS_AS(write_columns(s, grid, std::vector<double>(3, 0.0)), std::invalid_argument);
    CHECK(grid.at(0, 1) == 0.0);
    write_columns(s, grid, std::vector<double>(4, 1.0));
    release_row(s, grid);
    CHECK(verify_reference_state(s, grid));
  }

  SECTION("analog cells store exact voltages within +/- 1 V") {
    CellGrid grid = CellGrid::make(1, 3, TapKind::Analog);
    UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));
    drive_columns(s, grid, 0);
    assert_row(s, grid);
    write_columns(s, grid, {0.35, -0.7, 0.0});
    CHECK(grid.at(0, 0) == 0.35);
    CHECK(grid.at(0, 1) == -0.7);
    release_row(s, grid);
    CHECK(verify_reference_state(s, grid));

    drive_columns(s, grid, 0);
    assert_row(s, grid);
    CHECK_THROWS_AS(write_columns(s, grid, {1.2, 0.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("analog grids round-trip random updates adiabatically") {
  const TransistorProcess p = reference_process();
  CellGrid grid = CellGrid::make(3, 10, TapKind::Analog);
  UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> volts(-kAnalogRangeV, kAnalogRangeV);

  for (int u = 0; u < 30; ++u) {
    std::vector<double> values(10);
    for (auto& v : values) v = volts(rng);
    const int row = static_cast<int>(rng() % 3);
    full_row_update(s, grid, row, values);
    CHECK(verify_reference_state(s, grid));
    for (int c = 0; c < 10; ++c) CHECK(grid.at(row, c) == values[static_cast<std::size_t>(c)]);
  }
  CHECK(s.violation_count == 0);
  CHECK(s.ledger.count_non_adiabatic() == 0);
}

TEST_CASE("repeated identical cycles write identical ledgers") {
  const TransistorProcess p = reference_process();
  CellGrid grid = CellGrid::make(2, 6);
  std::mt19937_64 rng(9);
  const auto values = random_digital_row(grid, rng);

  UpdateSession s = make_session(grid, p, ClockSpec::at(4e6, 0, 1));
  full_row_update(s, grid, 0, values);  // seed
  const std::size_t base = s.transcript.size();
  full_row_update(s, grid, 0, values);
  full_row_update(s, grid, 0, values);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = s.transcript[base + i];
    const auto& b = s.transcript[base + 4 + i];
    CHECK(a.channel_joules == b.channel_joules);
    CHECK(a.rail_return_joules == b.rail_return_joules);
    CHECK(a.violations == 0);
    CHECK(b.violations == 0);
  }
  // Writing values already stored moves no charge onto the cells.
  CHECK(s.transcript[base + 2].channel_joules == 0.0);
}

TEST_CASE("adiabatic SRAM update beats the overpower write") {
  const TransistorProcess p = reference_process();
  const double rc = p.rc();

  SECTION("ratio approaches 2RC/t") {
    for (double mult : {10.0, 100.0, 1000.0}) {
      SramCell cell;
      const ClockSpec clock{1.0 / (4.0 * mult * rc), 0, 1};
      const SramUpdateEnergy e = sram_update(cell, 1, p, clock);
      const double over = sram_overpower_write_energy(cell, p);
      CHECK(e.total() / over == Catch::Approx(2.0 * rc / (mult * rc)).epsilon(1e-9));
      CHECK(e.total() < over);
    }
  }

  SECTION("unchanged value needs only the two supply ramps") {
    SramCell cell;
    cell.stored_bit = 1;
    const ClockSpec clock = ClockSpec::at(4e6, 0, 1);
    const SramUpdateEnergy e = sram_update(cell, 1, p, clock);
    CHECK(e.switch_event == 0.0);
    CHECK(e.power_down > 0);
    CHECK(e.power_up > 0);
    CHECK(sram_tap(cell) == 1);
  }

  SECTION("tap follows the stored bit") {
    SramCell cell;
    sram_update(cell, 1, p, ClockSpec::at(4e6, 0, 1));
    CHECK(sram_tap(cell) == 1);
    sram_update(cell, 0, p, ClockSpec::at(4e6, 0, 1));
    CHECK(sram_tap(cell) == 0);
  }
}

TEST_CASE("superconducting FET threshold is symmetric in sign") {
  SfetModel m;
  m.critical_current_nominal = 100e-6;
  m.critical_current_suppressed = 40e-6;
  m.gate_threshold = 2.5;
  CHECK(sfet_output(0.0, m) == 100e-6);
  CHECK(sfet_output(2.49, m) == 100e-6);
  CHECK(sfet_output(2.5, m) == 40e-6);
  CHECK(sfet_output(-3.0, m) == 40e-6);
  m.critical_current_suppressed = 200e-6;
  CHECK_THROWS_AS(sfet_output(0.0, m), std::invalid_argument);
}

TEST_CASE("SFQ interrupter attenuates or blocks the pulse") {
  SfqPulse pulse;  // 1 mV x 2 ps on a 15 ohm line

  SECTION("matched on-resistance halves the amplitude") {
    const SfqTransmission t = sfq_transmit(pulse, true, 15.0);
    CHECK(t.transmitted);
    CHECK(t.pulse.amplitude == Catch::Approx(0.5e-3).epsilon(1e-12));
    CHECK(t.transmitted_energy + t.dissipated_energy ==
          Catch::Approx(t.incident_energy).epsilon(1e-12));
  }
  SECTION("off transistor blocks everything") {
    const SfqTransmission t = sfq_transmit(pulse, false, 15.0);
    CHECK_FALSE(t.transmitted);
    CHECK(t.dissipated_energy == t.incident_energy);
    CHECK(t.transmitted_energy == 0.0);
  }
  SECTION("zero on-resistance is lossless and conserves flux") {
    const SfqTransmission t = sfq_transmit(pulse, true, 0.0);
    CHECK(t.pulse.amplitude == pulse.amplitude);
    CHECK(t.dissipated_energy == 0.0);
    CHECK(t.pulse.flux() == pulse.flux());
  }
}
