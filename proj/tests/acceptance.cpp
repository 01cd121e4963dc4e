// Acceptance suite: one test case per release criterion, each printing a
// single PASS/FAIL line. Run via ctest or directly with -s.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "cryosim/runner.hpp"

using namespace cryosim;

namespace {

struct Criterion {
  int id;
  std::string what;
  int uncaught = std::uncaught_exceptions();
  std::chrono::steady_clock::time_point begin = std::chrono::steady_clock::now();

  ~Criterion() {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - begin)
                        .count();
    const bool failed = std::uncaught_exceptions() > uncaught;
    std::cout << "[criterion " << id << "] " << (failed ? "FAIL" : "PASS") << " (" << ms
              << " ms): " << what << "\n";
  }

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Scenario load_table1() {
  const std::string path = std::string(CRYOSIM_SCENARIO_DIR) + "/table1.scenario";
  const ParseResult r = parse_scenario(read_file(path), "table1.scenario");
  REQUIRE(r.ok());
  return r.scenario;
}

void check_cell(const ScalingStep& s, double gates, double clock, double p_dyn,
                double p_static = -1) {
  REQUIRE(std::abs(static_cast<double>(s.gate_count) - gates) / gates <= 0.01);
  REQUIRE(std::abs(s.clock_rate - clock) / clock <= 0.01);
  REQUIRE(std::abs(s.dynamic_power - p_dyn) / p_dyn <= 0.01);
  if (p_static > 0) {
    REQUIRE(s.static_power.has_value());
    REQUIRE(std::abs(*s.static_power - p_static) / p_static <= 0.01);
  }
}

// RK4 integration of the ramp-charging ODE; the oracle for criterion 3.
double integrate_ramp_dissipation(double c, double v, double r, double t_ramp) {
  const double rc = r * c;
  const double h = rc / 200.0;
  const double t_end = t_ramp + 25.0 * rc;
  double vn = 0.0, heat = 0.0;
  auto rail = [&](double t) { return t < t_ramp ? v * t / t_ramp : v; };
  auto dvn = [&](double t, double x) { return (rail(t) - x) / rc; };
  auto dheat = [&](double t, double x) {
    const double dv = rail(t) - x;
    return dv * dv / r;
  };
  for (double t = 0; t < t_end; t += h) {
    const double k1v = dvn(t, vn), k1h = dheat(t, vn);
    const double k2v = dvn(t + h / 2, vn + h / 2 * k1v), k2h = dheat(t + h / 2, vn + h / 2 * k1v);
    const double k3v = dvn(t + h / 2, vn + h / 2 * k2v), k3h = dheat(t + h / 2, vn + h / 2 * k2v);
    const double k4v = dvn(t + h, vn + h * k3v), k4h = dheat(t + h, vn + h * k3v);
    vn += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    heat += h / 6 * (k1h + 2 * k2h + 2 * k3h + k4h);
  }
  return heat;
}

}  // namespace

TEST_CASE("criterion 1: worksheet reproduction") {
  Criterion crit{1, "plan reproduces every numeric worksheet cell within 1%, under 1 s"};
  const Scenario sc = load_table1();

  const CommandResult artifact = run_command(sc, "plan", 1);
  REQUIRE_FALSE(artifact.violation);

  const Baseline base =
      baseline(sc.rql_gates, sc.devices.at("rql"), sc.devices.at("cmos"), sc.process);
  const ScalingPlan result = plan(sc.policy, base, sc.process);
  REQUIRE(result.steps.size() == 3);

  check_cell(result.base.rql, 1e6, 1.6e9, 160e-6);
  check_cell(result.base.cmos, 1e3, 4e9, 160e-6);
  check_cell(result.steps[0], 1e4, 400e6, 160e-6, 16.7e-9);
  check_cell(result.steps[1], 1e6, 40e6, 160e-6, 1.67e-6);
  check_cell(result.steps[2], 1e8, 4e6, 160e-6, 167e-6);
  REQUIRE(result.stop_reason == StopReason::LeakageFloor);

  REQUIRE(crit.seconds() < 1.0);
}

TEST_CASE("criterion 2: power-vs-frequency curve shape") {
  Criterion crit{2, "adiabatic slope -2 +/- 0.15, CMOS slope -1 +/- 0.1, static floor, ratio >= 100, under 30 s"};
  const Scenario sc = load_table1();
  const SweepOutcome sw = run_sweep(sc);

  REQUIRE(std::abs(sw.adiabatic_slope - (-2.0)) <= 0.15);
  REQUIRE(std::abs(sw.cmos_slope - (-1.0)) <= 0.1);
  REQUIRE(std::abs(sw.adiabatic.front().power_per_gate - sw.floor_w) / sw.floor_w <= 0.05);
  REQUIRE(sw.max_ratio >= 100.0);
  REQUIRE(sw.max_ratio_frequency > 0);

  REQUIRE(crit.seconds() < 30.0);
}

TEST_CASE("criterion 3: adiabatic formula against the ODE oracle") {
  Criterion crit{3, "integrated ramp dissipation matches C^2 V^2 R / t within 1%; 0.2% of the hard-switching energy at t = 1000 RC"};
  const Scenario sc = load_table1();
  const TransistorProcess& p = sc.process;
  const double rc = p.rc();

  for (double mult : {100.0, 1000.0}) {
    const double t = mult * rc;
    const double formula =
        p.node_capacitance * p.node_capacitance * p.swing * p.swing * p.on_resistance / t;
    const double numeric =
        integrate_ramp_dissipation(p.node_capacitance, p.swing, p.on_resistance, t);
    // The analytic deviation is (1 - e^-t/RC) RC/t: exactly 1% at t = 100 RC,
    // so the check allows integrator roundoff on top of the stated bound.
    REQUIRE(std::abs(numeric - formula) / formula <= 0.01 + 1e-6);
  }

  const double ratio =
      adiabatic_ramp_energy(p, 1000.0 * rc) / cmos_transition_energy(p);
  REQUIRE(std::abs(ratio - 0.002) <= 1e-12);
}

TEST_CASE("criterion 4: refrigeration anchors") {
  Criterion crit{4, "multipliers 1000 at (4 K, 0.075) and 1e6 at (15 mK, 0.02); ideal 4 K multiplier exactly 75"};
  REQUIRE(std::abs(refrigeration_multiplier({4.0, 0.075, 0, ""}) - 1000.0) / 1000.0 <= 0.01);
  REQUIRE(std::abs(refrigeration_multiplier({0.015, 0.02, 0, ""}) - 1.0e6) / 1.0e6 <= 0.01);
  REQUIRE(refrigeration_multiplier({4.0, 1.0, 0, ""}) == 75.0);
}

TEST_CASE("criterion 5: pipeline bandwidth and losslessness") {
  Criterion crit{5, "2000b@4MHz -> 200b@40MHz -> 20b@400MHz at 1 GB/s, bit-exact over 1e6 random bits, under 10 s"};
  StorePlan plan_;
  plan_.word_width = 2000;
  plan_.depth = 500;
  plan_.clock = 4e6;

  std::mt19937_64 rng(99);
  std::vector<std::vector<std::uint8_t>> words(500);
  for (auto& w : words) {
    w.resize(2000);
    for (auto& b : w) b = static_cast<std::uint8_t>(rng() & 1);
  }
  const SequentialStore store = load_store(plan_, words);
  const PipelineRun run = run_pipeline(store, {{10, 2000}, {10, 200}}, 500 * 100);

  REQUIRE(run.report.boundaries.size() == 3);
  REQUIRE(run.report.boundaries[0].width == 2000);
  REQUIRE(run.report.boundaries[1].width == 200);
  REQUIRE(run.report.boundaries[1].clock == 40e6);
  REQUIRE(run.report.boundaries[2].width == 20);
  REQUIRE(run.report.boundaries[2].clock == 400e6);
  for (const auto& b : run.report.boundaries) REQUIRE(b.bandwidth_bits_per_s == 8e9);

  std::size_t i = 0;
  bool exact = true;
  for (const auto& tick : run.output)
    for (std::uint8_t bit : tick) {
      if (bit != words[i / 2000][i % 2000]) exact = false;
      ++i;
    }
  REQUIRE(i == std::size_t{1000000});
  REQUIRE(exact);

  REQUIRE(crit.seconds() < 10.0);
}

TEST_CASE("criterion 6: update protocol properties") {
  Criterion crit{6, "1000 randomized consistent updates stay adiabatic and in reference state; k corruptions give exactly k events of half C dV^2"};
  const Scenario sc = load_table1();
  std::mt19937_64 rng(1234);

  int updates_done = 0;
  while (updates_done < 1000) {
    const int rows = 2 + static_cast<int>(rng() % 6);
    const int cols = 4 + static_cast<int>(rng() % 29);
    CellGrid grid = CellGrid::make(rows, cols);
    UpdateSession s = make_session(grid, sc.process, ClockSpec::at(4e6, 0, 1));
    // Scatter a starting pattern through one seeding pass per row.
    const int batch = 10;
    for (int u = 0; u < batch; ++u) {
      std::vector<double> values(static_cast<std::size_t>(cols));
      for (auto& v : values) v = (rng() & 1) ? grid.data_v_high : grid.data_v_low;
      full_row_update(s, grid, static_cast<int>(rng() % static_cast<std::uint64_t>(rows)), values);
      REQUIRE(verify_reference_state(s, grid));
      ++updates_done;
    }
    REQUIRE(s.violation_count == 0);
    REQUIRE(s.ledger.count_non_adiabatic() == 0);
  }

  for (int k : {1, 5, 17}) {
    CellGrid grid = CellGrid::make(3, 20);
    UpdateSession s = make_session(grid, sc.process, ClockSpec::at(4e6, 0, 1));
    for (int c = 0; c < k; ++c) s.shadow[grid.index(1, c)] = grid.data_v_high;
    std::vector<double> values(20, grid.data_v_low);
    full_row_update(s, grid, 1, values);
    REQUIRE(s.violation_count == k);
    const double dv = grid.data_v_high - grid.data_v_low;
    const double expected = 0.5 * grid.cell_capacitance * dv * dv;
    int events = 0;
    for (const auto& e : s.ledger.events) {
      if (e.adiabatic) continue;
      REQUIRE(std::abs(e.joules - expected) / expected <= 1e-9);
      ++events;
    }
    REQUIRE(events == k);
    REQUIRE(verify_reference_state(s, grid));
  }
}

TEST_CASE("criterion 7: controller timing") {
  Criterion crit{7, "250 ns rotations, 750 ns total overhead, mutual exclusion, budget pass; 4 kHz variant flagged"};
  const Scenario sc = load_table1();

  const CommandResult ok_run = run_command(sc, "controller", 1);
  REQUIRE_FALSE(ok_run.violation);
  REQUIRE(ok_run.artifacts[0].csv.find("rotation_time_s = 2.5e-07") != std::string::npos);
  REQUIRE(ok_run.artifacts[0].csv.find("reconfiguration_overhead_s = 7.5e-07") != std::string::npos);
  REQUIRE(ok_run.artifacts[0].csv.find("mutual_exclusion = ok") != std::string::npos);
  REQUIRE(ok_run.artifacts[0].csv.find("budget = ok") != std::string::npos);

  Scenario slow = sc;
  slow.controller.rotation_clock = 4e3;
  const CommandResult bad_run = run_command(slow, "controller", 1);
  REQUIRE(bad_run.violation);
  REQUIRE(bad_run.artifacts[0].csv.find("budget = VIOLATION") != std::string::npos);
}

TEST_CASE("criterion 8: fabric correctness") {
  Criterion crit{8, "exhaustive CLB truth tables, 2-bit ripple adder on all 16 inputs, rotate x4 invariance"};

  // Exhaustive truth tables, b routed in from the row above.
  Fabric unit = Fabric::from_rows({"RR", "CR", "RR"});
  auto encode = [](std::vector<std::uint8_t> settings) {
    std::vector<std::uint8_t> bits;
    for (auto s : settings) {
      bits.push_back((s >> 1) & 1);
      bits.push_back(s & 1);
    }
    return bits;
  };
  for (auto fn : {ClbFunction::And, ClbFunction::Or, ClbFunction::Not, ClbFunction::HalfAdder}) {
    std::vector<std::uint8_t> settings(6, static_cast<std::uint8_t>(RouterSetting::Straight));
    settings[0] = static_cast<std::uint8_t>(RouterSetting::Right);
    settings[4] = static_cast<std::uint8_t>(RouterSetting::Left);
    settings[2] = static_cast<std::uint8_t>(fn);
    configure(unit, encode(settings));
    for (int a = 0; a <= 1; ++a) {
      for (int b = 0; b <= 1; ++b) {
        const auto out = evaluate(unit, {b, a, 0});
        int expect = 0;
        switch (fn) {
          case ClbFunction::And: expect = a & b; break;
          case ClbFunction::Or: expect = a | b; break;
          case ClbFunction::Not: expect = a ? 0 : 1; break;
          case ClbFunction::HalfAdder: expect = a ^ b; break;
        }
        REQUIRE(out[1] == expect);
        if (fn == ClbFunction::HalfAdder) REQUIRE(out[2] == (a & b));
      }
    }
  }

  // Ripple adder.
  Fabric adder = Fabric::from_rows({"RRRR", "CRRR", "RRRR", "RRRR", "CRRR", "RCRR", "RRCR"});
  const auto S = static_cast<std::uint8_t>(RouterSetting::Straight);
  const auto L = static_cast<std::uint8_t>(RouterSetting::Left);
  const auto R = static_cast<std::uint8_t>(RouterSetting::Right);
  const auto HA = static_cast<std::uint8_t>(ClbFunction::HalfAdder);
  const auto OR = static_cast<std::uint8_t>(ClbFunction::Or);
  configure(adder, encode({R, S, S, S, HA, R, S, S, L, S, R, S, R, S, S, S,
                           HA, S, S, S, L, HA, S, S, S, L, OR, S}));
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const auto out = evaluate(adder, {(a >> 1) & 1, (b >> 1) & 1, 0, a & 1, b & 1, 0, 0});
      const int sum = a + b;
      REQUIRE(out[4] == (sum & 1));
      REQUIRE(out[5] == ((sum >> 1) & 1));
      REQUIRE(out[6] == ((sum >> 2) & 1));
    }
  }

  // configure -> rotate x4 -> evaluate is invariant.
  Fabric fab = Fabric::from_rows({"CC", "CC"});
  ConfigBuffer buffer;
  auto uniform = [&](std::uint8_t setting) {
    return encode(std::vector<std::uint8_t>(4, setting));
  };
  load_buffer(buffer, {uniform(0), uniform(1), uniform(2), uniform(3)},
              {"calibration", "initialization", "arithmetic", "readout"});
  set_run_mode(buffer, true);
  configure(fab, buffer.exposed_bits());
  std::vector<std::vector<int>> before;
  for (int v = 0; v < 4; ++v) before.push_back(evaluate(fab, {v & 1, (v >> 1) & 1}));
  for (int i = 0; i < 4; ++i) rotate(buffer);
  REQUIRE(buffer.exposed_bits() == uniform(0));
  configure(fab, buffer.exposed_bits());
  for (int v = 0; v < 4; ++v) REQUIRE(evaluate(fab, {v & 1, (v >> 1) & 1}) == before[static_cast<std::size_t>(v)]);
}

TEST_CASE("criterion 9: simulator agrees with the analytic energy model") {
  Criterion crit{9, "8-stage register channel energy within 5% of the analytic sum at 4 kHz..4 MHz; identical waveforms"};
  const Scenario sc = load_table1();
  const TransistorProcess& p = sc.process;
  const Netlist n = build_shift_register(8, p);
  Stimulus stim;
  stim.bits["in"] = {1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 0};

  std::vector<int> reference_bits;
  for (double f : {4e3, 4e4, 4e5, 4e6}) {
    const ClockSpec clock = ClockSpec::at(f, 0, p.swing);
    const SimResult sim = simulate(n, clock, stim, 12);

    // Waveform equality across frequencies.
    const int out_sig = n.ports[static_cast<std::size_t>(n.find_port("out"))].signal;
    const auto bits = sim.sampled_bits(n, out_sig, 0.5 * p.swing);
    if (reference_bits.empty()) reference_bits = bits;
    REQUIRE(bits == reference_bits);

    // Steady-state cycles against the closed-form per-ramp sum; the input
    // pattern keeps every stage's duty known per cycle.
    Stimulus ones;
    ones.bits["in"] = {1};
    const SimResult steady = simulate(n, clock, ones, 8);
    const double t0 = steady.cycle_start_time(4);
    const double t1 = steady.cycle_start_time(7);
    const double per_cycle =
        steady.trace.total_between(t0, t1, EnergyLocation::Channel) / 3.0;
    const double analytic = 8 * 2 * adiabatic_ramp_energy(p, clock.ramp_time());
    REQUIRE(std::abs(per_cycle - analytic) / analytic <= 0.05);
  }
}

TEST_CASE("criterion 10: byte-identical artifacts") {
  Criterion crit{10, "every command run twice yields byte-identical CSV artifacts"};
  const Scenario sc = load_table1();
  const std::filesystem::path dir_a = "acceptance_out_a";
  const std::filesystem::path dir_b = "acceptance_out_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);

  for (const std::string command :
       {"plan", "sweep", "fridge", "grid", "pipeline", "controller", "simulate"}) {
    const CommandResult a = run_command(sc, command, 42);
    const CommandResult b = run_command(sc, command, 42);
    const auto paths_a = emit_report(a, "csv", dir_a.string());
    const auto paths_b = emit_report(b, "csv", dir_b.string());
    REQUIRE(paths_a.size() == paths_b.size());
    for (std::size_t i = 0; i < paths_a.size(); ++i)
      REQUIRE(read_file(paths_a[i]) == read_file(paths_b[i]));
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}
