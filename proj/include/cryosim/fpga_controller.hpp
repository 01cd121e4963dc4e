#pragma once

// Configurable fabric (CLBs + routers on a grid), the four-stage cyclic
// configuration buffer, and the timed operating sequence that interleaves
// RQL bursts with 250 ns reconfigurations.

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cryosim/stream_pipeline.hpp"

namespace cryosim {

enum class CellKind : std::uint8_t { Clb, Router };
enum class ClbFunction : std::uint8_t { And = 0, Or = 1, Not = 2, HalfAdder = 3 };
enum class RouterSetting : std::uint8_t { Straight = 0, Left = 1, Right = 2, Connect = 3 };
enum class Side : int { North = 0, East = 1, South = 2, West = 3 };

inline const char* to_string(ClbFunction f) {
  switch (f) {
    case ClbFunction::And: return "AND";
    case ClbFunction::Or: return "OR";
    case ClbFunction::Not: return "NOT";
    case ClbFunction::HalfAdder: return "HALF_ADDER";
  }
  return "?";
}

// Square-grid fabric. Data moves on directed wires between adjacent cells;
// each cell drives its output sides from its input sides.
//
//   CLB: a = west input, b = north input (absent inputs read 0).
//        east output = selected function, south output = the half adder's
//        carry (other functions mirror the east output).
//   Router: settings act on the direction of travel. straight passes all
//        four lanes, left/right rotate them, connect fans the eastbound
//        signal out to both the east and south neighbors.
struct Fabric {
  int rows = 0;
  int cols = 0;
  std::vector<CellKind> layout;          // row-major
  std::vector<std::uint8_t> settings;    // 2-bit code per cell, valid when configured
  bool configured = false;

  static Fabric make(int rows, int cols, std::vector<CellKind> layout) {
    Fabric f;
    f.rows = rows;
    f.cols = cols;
    f.layout = std::move(layout);
    if (rows < 1 || cols < 1) throw std::invalid_argument("fabric: empty grid");
    if (f.layout.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
      throw std::invalid_argument("fabric: layout does not match dimensions");
    return f;
  }

  // Layout rows as text, 'C' for a CLB and 'R' for a router.
  static Fabric from_rows(const std::vector<std::string>& text_rows) {
    if (text_rows.empty()) throw std::invalid_argument("fabric: empty layout");
    std::vector<CellKind> layout;
    for (const auto& row : text_rows) {
      if (row.size() != text_rows.front().size())
        throw std::invalid_argument("fabric: ragged layout rows");
      for (char ch : row) {
        if (ch == 'C') layout.push_back(CellKind::Clb);
        else if (ch == 'R') layout.push_back(CellKind::Router);
        else throw std::invalid_argument("fabric: layout cells must be C or R");
      }
    }
    return make(static_cast<int>(text_rows.size()), static_cast<int>(text_rows.front().size()),
                std::move(layout));
  }

  int cell_count() const { return rows * cols; }
  int config_length() const { return 2 * cell_count(); }
  std::size_t cell(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c);
  }
};

namespace detail {

// Router lane maps. Entry [setting][input side] lists the output sides the
// lane drives; travel direction is opposite the input side.
inline const std::vector<Side>& router_outputs(RouterSetting setting, Side input) {
  static const std::vector<Side> none{};
  static const std::vector<Side> n{Side::North}, e{Side::East}, s{Side::South}, w{Side::West};
  static const std::vector<Side> es{Side::East, Side::South};
  switch (setting) {
    case RouterSetting::Straight:
      switch (input) {
        case Side::West: return e;
        case Side::East: return w;
        case Side::North: return s;
        case Side::South: return n;
      }
      break;
    case RouterSetting::Left:  // left turn relative to travel
      switch (input) {
        case Side::West: return n;   // eastbound -> north
        case Side::North: return e;  // southbound -> east
        case Side::East: return s;   // westbound -> south
        case Side::South: return w;  // northbound -> west
      }
      break;
    case RouterSetting::Right:
      switch (input) {
        case Side::West: return s;
        case Side::South: return e;
        case Side::East: return n;
        case Side::North: return w;
      }
      break;
    case RouterSetting::Connect:  // tap the eastbound lane into the gate below
      if (input == Side::West) return es;
      return none;
  }
  return none;
}

struct PortRef {
  int r = 0, c = 0;
  Side side = Side::West;
  bool input = false;
};

inline int port_id(const Fabric& f, int r, int c, Side side, bool input) {
  const int base = (static_cast<int>(f.cell(r, c)) * 4 + static_cast<int>(side)) * 2;
  return base + (input ? 1 : 0);
}

}  // namespace detail

// Applies a configuration string (one bit per element, length 2 * cells,
// row-major, high bit of each cell pair first) and verifies the routing
// graph stays combinational.
inline void configure(Fabric& fabric, const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != fabric.config_length())
    throw std::invalid_argument("configure: expected " + std::to_string(fabric.config_length()) +
                                " bits, got " + std::to_string(bits.size()));
  std::vector<std::uint8_t> settings(static_cast<std::size_t>(fabric.cell_count()));
  for (int i = 0; i < fabric.cell_count(); ++i)
    settings[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
        2 * (bits[static_cast<std::size_t>(2 * i)] ? 1 : 0) + (bits[static_cast<std::size_t>(2 * i + 1)] ? 1 : 0));

  // Cycle check over the directed port graph. Vertices are cell-side ports
  // (output and input); edges are config-independent for CLBs and follow the
  // lane maps for routers.
  const int port_count = fabric.cell_count() * 8;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(port_count));
  auto add_edge = [&](int from, int to) { adj[static_cast<std::size_t>(from)].push_back(to); };

  for (int r = 0; r < fabric.rows; ++r) {
    for (int c = 0; c < fabric.cols; ++c) {
      // Output ports feed the facing input port of the neighbor.
      auto link = [&](Side side, int dr, int dc, Side opposite) {
        const int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= fabric.rows || cc < 0 || cc >= fabric.cols) return;
        add_edge(detail::port_id(fabric, r, c, side, false),
                 detail::port_id(fabric, rr, cc, opposite, true));
      };
      link(Side::North, -1, 0, Side::South);
      link(Side::South, 1, 0, Side::North);
      link(Side::East, 0, 1, Side::West);
      link(Side::West, 0, -1, Side::East);

      const std::size_t idx = fabric.cell(r, c);
      if (fabric.layout[idx] == CellKind::Clb) {
        for (Side in : {Side::West, Side::North})
          for (Side out : {Side::East, Side::South})
            add_edge(detail::port_id(fabric, r, c, in, true),
                     detail::port_id(fabric, r, c, out, false));
      } else {
        const auto setting = static_cast<RouterSetting>(settings[idx]);
        for (Side in : {Side::North, Side::East, Side::South, Side::West})
          for (Side out : detail::router_outputs(setting, in))
            add_edge(detail::port_id(fabric, r, c, in, true),
                     detail::port_id(fabric, r, c, out, false));
      }
    }
  }

  std::vector<std::uint8_t> state(static_cast<std::size_t>(port_count), 0);  // 0 new, 1 on stack, 2 done
  std::vector<int> stack;
  for (int start = 0; start < port_count; ++start) {
    if (state[static_cast<std::size_t>(start)]) continue;
    stack.push_back(~start);
    stack.push_back(start);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (v < 0) {
        state[static_cast<std::size_t>(~v)] = 2;
        continue;
      }
      if (state[static_cast<std::size_t>(v)] == 2) continue;
      if (state[static_cast<std::size_t>(v)] == 1) continue;
      state[static_cast<std::size_t>(v)] = 1;
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (state[static_cast<std::size_t>(w)] == 1) throw std::invalid_argument("configure: routing graph has a cycle");
        if (state[static_cast<std::size_t>(w)] == 0) {
          stack.push_back(~w);
          stack.push_back(w);
        }
      }
    }
  }

  fabric.settings = std::move(settings);
  fabric.configured = true;
}

// Combinational evaluation. Fabric inputs enter on the west boundary, one
// per row, and outputs leave on the east boundary. -1 marks an undriven
// wire; CLBs read undriven inputs as 0.
inline std::vector<int> evaluate(const Fabric& fabric, const std::vector<int>& inputs) {
  if (!fabric.configured) throw std::logic_error("evaluate: fabric is not configured");
  if (static_cast<int>(inputs.size()) != fabric.rows)
    throw std::invalid_argument("evaluate: need one input per fabric row");

  // value[port]: -1 undriven, else 0/1.
  std::vector<int> value(static_cast<std::size_t>(fabric.cell_count()) * 8, -1);
  auto out_port = [&](int r, int c, Side s) -> int& {
    return value[static_cast<std::size_t>(detail::port_id(fabric, r, c, s, false))];
  };
  auto in_port_value = [&](int r, int c, Side s) -> int {
    switch (s) {
      case Side::West:
        if (c == 0) return inputs[static_cast<std::size_t>(r)] ? 1 : 0;
        return out_port(r, c - 1, Side::East);
      case Side::East:
        if (c == fabric.cols - 1) return -1;
        return out_port(r, c + 1, Side::West);
      case Side::North:
        if (r == 0) return -1;
        return out_port(r - 1, c, Side::South);
      case Side::South:
        if (r == fabric.rows - 1) return -1;
        return out_port(r + 1, c, Side::North);
    }
    return -1;
  };

  bool changed = true;
  int sweeps = 0;
  const int sweep_limit = fabric.cell_count() * 4 + 2;
  while (changed) {
    changed = false;
    if (++sweeps > sweep_limit) throw std::logic_error("evaluate: propagation did not settle");
    for (int r = 0; r < fabric.rows; ++r) {
      for (int c = 0; c < fabric.cols; ++c) {
        const std::size_t idx = fabric.cell(r, c);
        if (fabric.layout[idx] == CellKind::Clb) {
          const int aw = in_port_value(r, c, Side::West);
          const int bn = in_port_value(r, c, Side::North);
          const int a = aw < 0 ? 0 : aw;
          const int b = bn < 0 ? 0 : bn;
          int main = 0, secondary = 0;
          switch (static_cast<ClbFunction>(fabric.settings[idx])) {
            case ClbFunction::And: main = a & b; secondary = main; break;
            case ClbFunction::Or: main = a | b; secondary = main; break;
            case ClbFunction::Not: main = a ? 0 : 1; secondary = main; break;
            case ClbFunction::HalfAdder: main = a ^ b; secondary = a & b; break;
          }
          if (out_port(r, c, Side::East) != main) { out_port(r, c, Side::East) = main; changed = true; }
          if (out_port(r, c, Side::South) != secondary) { out_port(r, c, Side::South) = secondary; changed = true; }
        } else {
          const auto setting = static_cast<RouterSetting>(fabric.settings[idx]);
          for (Side in : {Side::North, Side::East, Side::South, Side::West}) {
            const int v = in_port_value(r, c, in);
            if (v < 0) continue;
            for (Side out : detail::router_outputs(setting, in)) {
              if (out_port(r, c, out) != v) { out_port(r, c, out) = v; changed = true; }
            }
          }
        }
      }
    }
  }

  std::vector<int> outputs(static_cast<std::size_t>(fabric.rows), 0);
  for (int r = 0; r < fabric.rows; ++r) {
    const int v = out_port(r, fabric.cols - 1, Side::East);
    outputs[static_cast<std::size_t>(r)] = v < 0 ? 0 : v;
  }
  return outputs;
}

// --- Hex bit files ------------------------------------------------------------

inline std::string bits_to_hex(const std::vector<std::uint8_t>& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int nibble = 0;
    for (std::size_t j = 0; j < 4 && i + j < bits.size(); ++j)
      nibble |= (bits[i + j] ? 1 : 0) << (3 - j);
    out.push_back(digits[nibble]);
  }
  return out;
}

inline std::vector<std::uint8_t> hex_to_bits(const std::string& hex, int bit_count) {
  std::vector<std::uint8_t> bits;
  bits.reserve(hex.size() * 4);
  for (char ch : hex) {
    int v;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = 10 + ch - 'a';
    else if (ch >= 'A' && ch <= 'F') v = 10 + ch - 'A';
    else throw std::invalid_argument("hex_to_bits: invalid hex digit");
    for (int j = 3; j >= 0; --j) bits.push_back(static_cast<std::uint8_t>((v >> j) & 1));
  }
  if (static_cast<int>(bits.size()) < bit_count)
    throw std::invalid_argument("hex_to_bits: too few bits");
  bits.resize(static_cast<std::size_t>(bit_count));
  return bits;
}

// --- Configuration buffer -------------------------------------------------------

// k-bit wide, four-stage cyclic shift register. The exposed stage's bits
// configure the fabric; rotating in run mode advances the exposure by one
// mode in 1/rotation_clock.
struct ConfigBuffer {
  static constexpr int kStages = 4;

  int width_k = 0;
  double rotation_clock = 4e6;  // Hz
  std::array<std::vector<std::uint8_t>, kStages> stage;
  std::array<std::string, kStages> stage_name;
  int exposed_stage = 0;
  bool run_mode = false;
  bool loaded = false;
  std::map<std::string, std::vector<std::uint8_t>> spare_configs;

  double rotation_time() const { return 1.0 / rotation_clock; }
  double serial_load_time() const { return static_cast<double>(kStages) * width_k / rotation_clock; }
  const std::vector<std::uint8_t>& exposed_bits() const { return stage[static_cast<std::size_t>(exposed_stage)]; }
  const std::string& exposed_name() const { return stage_name[static_cast<std::size_t>(exposed_stage)]; }
};

inline void load_buffer(ConfigBuffer& buffer, const std::vector<std::vector<std::uint8_t>>& configs,
                        const std::vector<std::string>& names) {
  if (buffer.run_mode) throw std::logic_error("load_buffer: buffer is in run mode");
  if (configs.size() != ConfigBuffer::kStages || names.size() != ConfigBuffer::kStages)
    throw std::invalid_argument("load_buffer: need exactly 4 configurations");
  const int k = static_cast<int>(configs.front().size());
  for (const auto& cfg : configs)
    if (static_cast<int>(cfg.size()) != k)
      throw std::invalid_argument("load_buffer: configuration widths differ");
  buffer.width_k = k;
  for (std::size_t i = 0; i < ConfigBuffer::kStages; ++i) {
    buffer.stage[i] = configs[i];
    buffer.stage_name[i] = names[i];
  }
  buffer.exposed_stage = 0;
  buffer.loaded = true;
}

inline void set_run_mode(ConfigBuffer& buffer, bool run) {
  if (run && !buffer.loaded) throw std::logic_error("set_run_mode: buffer not loaded");
  buffer.run_mode = run;
}

inline void rotate(ConfigBuffer& buffer, bool rql_clock_on = false) {
  if (!buffer.run_mode) throw std::logic_error("rotate: buffer is in load mode");
  if (rql_clock_on) throw std::logic_error("rotate: RQL clock must be off during rotation");
  buffer.exposed_stage = (buffer.exposed_stage + 1) % ConfigBuffer::kStages;
}

// Rotates until the target mode is exposed. Targets outside the rotation are
// pulled from the spare-config side channel into the stage about to be
// exposed, then rotated in.
inline int branch_to(ConfigBuffer& buffer, const std::string& target, bool rql_clock_on = false) {
  if (!buffer.run_mode) throw std::logic_error("branch_to: buffer is in load mode");
  for (int i = 0; i < ConfigBuffer::kStages; ++i) {
    if (buffer.stage_name[static_cast<std::size_t>(i)] == target) {
      const int distance = ((i - buffer.exposed_stage) % ConfigBuffer::kStages + ConfigBuffer::kStages) %
                           ConfigBuffer::kStages;
      for (int s = 0; s < distance; ++s) rotate(buffer, rql_clock_on);
      return distance;
    }
  }
  auto it = buffer.spare_configs.find(target);
  if (it == buffer.spare_configs.end())
    throw std::invalid_argument("branch_to: unknown target mode " + target);
  if (static_cast<int>(it->second.size()) != buffer.width_k)
    throw std::invalid_argument("branch_to: spare config width mismatch");
  const int next = (buffer.exposed_stage + 1) % ConfigBuffer::kStages;
  buffer.stage[static_cast<std::size_t>(next)] = it->second;
  buffer.stage_name[static_cast<std::size_t>(next)] = target;
  rotate(buffer, rql_clock_on);
  return 1;
}

// --- Operating sequence -----------------------------------------------------------

struct ModeSpec {
  std::string name;
  double duration = 0;  // s of RQL execution

  void validate() const {
    if (name.empty()) throw std::invalid_argument("mode: empty name");
    if (!(duration > 0)) throw std::invalid_argument("mode " + name + ": duration must be > 0");
  }
};

struct SequencePlan {
  std::vector<ModeSpec> modes;  // rotation order
  double rql_clock = 5e9;
  double decoherence_budget = 100e-6;
  std::map<std::string, std::string> branch_targets;

  void validate() const {
    if (modes.size() != ConfigBuffer::kStages)
      throw std::invalid_argument("plan: need exactly 4 modes");
    for (const auto& m : modes) m.validate();
    if (!(rql_clock > 0)) throw std::invalid_argument("plan: rql_clock must be > 0");
    if (!(decoherence_budget > 0)) throw std::invalid_argument("plan: decoherence_budget must be > 0");
  }
};

struct TimedEvent {
  std::string name;
  std::string kind;  // rql_run | rotation
  double start = 0;
  double duration = 0;
  double end() const { return start + duration; }
};

struct TimingReport {
  std::vector<TimedEvent> timeline;
  double rotation_time = 0;
  int rotations = 0;
  double reconfiguration_overhead = 0;
  double total_time = 0;
  bool budget_ok = true;
  std::string budget_violation;  // offending interval when not ok
  bool mutual_exclusion_ok = true;
};

namespace detail {

inline void check_mutual_exclusion(TimingReport& report) {
  for (const auto& a : report.timeline) {
    if (a.kind != "rql_run") continue;
    for (const auto& b : report.timeline) {
      if (b.kind != "rotation") continue;
      if (a.start < b.end() && b.start < a.end()) {
        report.mutual_exclusion_ok = false;
        return;
      }
    }
  }
}

}  // namespace detail

// Executes the plan: expose mode 0, alternate RQL bursts with single
// rotations, honoring branch feedback. Budget violations are reported, not
// thrown.
inline TimingReport run_sequence(const SequencePlan& plan, ConfigBuffer& buffer, Fabric& fabric,
                                 const FeedbackQueue& feedback = {}) {
  plan.validate();
  if (!buffer.loaded) throw std::logic_error("run_sequence: buffer not loaded");
  set_run_mode(buffer, true);

  TimingReport report;
  report.rotation_time = buffer.rotation_time();

  auto mode_index = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < plan.modes.size(); ++i)
      if (plan.modes[i].name == name) return static_cast<int>(i);
    return -1;
  };

  auto book_rotation = [&](double& t, const std::string& label) {
    report.timeline.push_back({label, "rotation", t, report.rotation_time});
    t += report.rotation_time;
    ++report.rotations;
    const double before = report.reconfiguration_overhead;
    report.reconfiguration_overhead += report.rotation_time;
    if (report.budget_ok && report.reconfiguration_overhead > plan.decoherence_budget) {
      report.budget_ok = false;
      report.budget_violation = "rotation [" + std::to_string(t - report.rotation_time) + " s, " +
                                std::to_string(t) + " s] pushes overhead past the budget (" +
                                std::to_string(before) + " s -> " +
                                std::to_string(report.reconfiguration_overhead) + " s)";
    }
  };

  double t = 0;
  std::size_t next_event = 0;
  int current = buffer.exposed_stage;
  configure(fabric, buffer.exposed_bits());

  while (current < static_cast<int>(plan.modes.size())) {
    const ModeSpec& mode = plan.modes[static_cast<std::size_t>(current)];
    double run_end = t + mode.duration;

    // A feedback event inside this burst truncates it and forces a branch.
    bool branched = false;
    if (next_event < feedback.events.size()) {
      const FeedbackEvent& ev = feedback.events[next_event];
      if (ev.time >= t && ev.time < run_end) {
        report.timeline.push_back({mode.name, "rql_run", t, ev.time - t});
        t = ev.time;
        ++next_event;
        std::string target = ev.target_mode;
        if (target.empty()) {
          auto it = plan.branch_targets.find(mode.name);
          if (it == plan.branch_targets.end())
            throw std::invalid_argument("run_sequence: no branch target for " + mode.name);
          target = it->second;
        }
        const int hops = branch_to(buffer, target, false);
        // branch_to already rotated the buffer; book the time per hop.
        for (int h = 0; h < hops; ++h) book_rotation(t, "branch->" + target);
        configure(fabric, buffer.exposed_bits());
        const int target_index = mode_index(buffer.exposed_name());
        current = target_index < 0 ? current : target_index;
        if (hops == 0) {
          // Branch to the mode already exposed: rerun it.
        }
        branched = true;
      }
    }
    if (branched) continue;

    report.timeline.push_back({mode.name, "rql_run", t, mode.duration});
    t = run_end;
    ++current;
    if (current < static_cast<int>(plan.modes.size())) {
      rotate(buffer, false);
      configure(fabric, buffer.exposed_bits());
      book_rotation(t, "reconfigure->" + buffer.exposed_name());
    }
  }

  report.total_time = t;
  if (report.budget_ok && report.reconfiguration_overhead > plan.decoherence_budget)
    report.budget_ok = false;
  detail::check_mutual_exclusion(report);
  return report;
}

}  // namespace cryosim
