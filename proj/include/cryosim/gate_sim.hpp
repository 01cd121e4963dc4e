#pragma once

// Switch-level, quarter-cycle simulator for dual-rail four-phase adiabatic
// circuits and DC-rail CMOS circuits, with per-event energy accounting.
//
// The solver is quasi-static: within each quarter period every node either
// tracks a moving rail through the resistive path the closed switches form,
// or holds its charge. Switches sample their controlling signal at the start
// of each quarter. A switch that closes across a voltage step books a hard
// (1/2) C dV^2 event; ramp tracking books the adiabatic channel loss plus the
// share returned on the clock/power leads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cryosim/device_models.hpp"
#include "cryosim/energy_trace.hpp"

namespace cryosim {

struct netlist_fault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CircuitNode {
  std::string name;
  double capacitance = 1e-15;  // F
  bool initial_high = false;   // starts at v_high instead of v_low
};

enum class RailKind { Phase, DcLow, DcHigh, Driver };

struct Rail {
  std::string name;
  RailKind kind = RailKind::Phase;
  int phase = 0;       // Phase rails: which quarter starts the up-ramp
  int signal = -1;     // Driver rails: backing signal
  bool inverted = false;  // Driver rails: complement side of the pair
};

enum class DriverStyle { FourPhase, DcLevel };

// One logical value plus a validity phase. Node-backed signals carry their
// value on node_a; node_b is the complement rail of the pair when a gate
// needs to sense the inverted side.
struct Signal {
  std::string name;
  int validity_phase = 0;
  int delay_quarters = 0;  // pipeline position, for waveform sampling
  bool driver = false;
  DriverStyle style = DriverStyle::FourPhase;
  int node_a = -1;
  int node_b = -1;
};

struct Terminal {
  enum class Kind { Node, Rail } kind = Kind::Node;
  int index = 0;
  static Terminal node(int i) { return {Kind::Node, i}; }
  static Terminal rail(int i) { return {Kind::Rail, i}; }
};

// A transmission-gate pair: closed when the controlling dual-rail signal is
// true (or false, for an inverted control).
struct Switch {
  int control_signal = 0;
  bool control_inverted = false;
  Terminal a, b;
  double on_resistance = 3e3;
};

struct Port {
  std::string name;
  int signal = 0;
  bool is_input = false;
};

// Snapshot of the four-phase clock at a quarter boundary.
struct PhaseState {
  int phase_index = 0;  // 0..3, the rail whose up-ramp starts this quarter
  double rail_voltages[4] = {0, 0, 0, 0};
  double time = 0;  // s
};

struct Netlist {
  std::string name;
  std::vector<CircuitNode> nodes;
  std::vector<Rail> rails;
  std::vector<Signal> signals;
  std::vector<Switch> switches;
  std::vector<Port> ports;
  int gate_count = 1;  // logic gates represented, for per-gate reporting

  int add_node(std::string n, double c, bool high = false) {
    nodes.push_back({std::move(n), c, high});
    return static_cast<int>(nodes.size()) - 1;
  }
  int add_rail(Rail r) {
    rails.push_back(std::move(r));
    return static_cast<int>(rails.size()) - 1;
  }
  int add_signal(Signal s) {
    signals.push_back(std::move(s));
    return static_cast<int>(signals.size()) - 1;
  }

  int find_port(const std::string& port_name) const {
    for (std::size_t i = 0; i < ports.size(); ++i)
      if (ports[i].name == port_name) return static_cast<int>(i);
    throw std::invalid_argument("netlist: no port named " + port_name);
  }

  void validate() const {
    for (const auto& n : nodes)
      if (!(n.capacitance > 0)) throw std::invalid_argument("netlist: node capacitance must be > 0");
    auto check_terminal = [&](const Terminal& t) {
      const int limit = t.kind == Terminal::Kind::Node ? static_cast<int>(nodes.size())
                                                       : static_cast<int>(rails.size());
      if (t.index < 0 || t.index >= limit) throw std::invalid_argument("netlist: dangling terminal");
    };
    for (const auto& sw : switches) {
      if (sw.control_signal < 0 || sw.control_signal >= static_cast<int>(signals.size()))
        throw std::invalid_argument("netlist: switch control must name a declared signal");
      if (!(sw.on_resistance > 0)) throw std::invalid_argument("netlist: on_resistance must be > 0");
      check_terminal(sw.a);
      check_terminal(sw.b);
    }
    for (const auto& p : ports)
      if (p.signal < 0 || p.signal >= static_cast<int>(signals.size()))
        throw std::invalid_argument("netlist: port references unknown signal");
  }
};

// Per-cycle bit pattern for each input port.
struct Stimulus {
  std::map<std::string, std::vector<int>> bits;

  int bit(const std::string& port, std::int64_t cycle) const {
    auto it = bits.find(port);
    if (it == bits.end() || it->second.empty() || cycle < 0) return 0;
    return it->second[static_cast<std::size_t>(cycle) % it->second.size()] ? 1 : 0;
  }
};

struct SimResult {
  double quarter_time = 0;
  int quarters = 0;
  // signal_voltage[q][s]: signal s's value-rail voltage at the end of quarter q.
  std::vector<std::vector<double>> signal_voltage;
  EnergyTrace trace;

  double cycle_start_time(int cycle) const { return 4.0 * cycle * quarter_time; }

  // Sampled logical stream of a signal, one bit per cycle, observed at the
  // end of the signal's up-ramp quarter.
  std::vector<int> sampled_bits(const Netlist& netlist, int signal_index, double v_mid) const {
    const Signal& s = netlist.signals[static_cast<std::size_t>(signal_index)];
    std::vector<int> out;
    for (int q = s.delay_quarters; q < quarters; q += 4)
      out.push_back(signal_voltage[static_cast<std::size_t>(q)][static_cast<std::size_t>(signal_index)] > v_mid ? 1 : 0);
    return out;
  }
};

namespace detail {

// Voltage of a four-phase trapezoid rail over one quarter.
struct RailSegment {
  double v_begin = 0;
  double v_end = 0;
};

inline RailSegment phase_rail_segment(int phase, int quarter, double v_low, double v_high) {
  switch (((quarter - phase) % 4 + 4) % 4) {
    case 0: return {v_low, v_high};   // up-ramp
    case 1: return {v_high, v_high};  // hold high
    case 2: return {v_high, v_low};   // down-ramp
    default: return {v_low, v_low};   // hold low
  }
}

// Driver rails reproduce the phase waveform of the signal's validity phase,
// masked by the bit that owns the pulse in progress. DC-style drivers hold
// the bit's level for the whole cycle.
inline RailSegment driver_rail_segment(const Signal& sig, bool inverted, const Stimulus& stim,
                                       const std::string& port_name, int quarter, double v_low,
                                       double v_high) {
  if (sig.style == DriverStyle::DcLevel) {
    const int b = stim.bit(port_name, quarter / 4);
    const bool high = inverted ? b == 0 : b != 0;
    const double v = high ? v_high : v_low;
    return {v, v};
  }
  const int rel = quarter - sig.validity_phase;
  const int seg = ((rel % 4) + 4) % 4;
  if (seg == 3) return {v_low, v_low};  // rest quarter of every pulse
  // Pulse segments 0..2 belong to the cycle whose up-ramp started them.
  const std::int64_t cycle = static_cast<std::int64_t>(std::floor((rel - seg) / 4.0));
  int b = stim.bit(port_name, cycle);
  if (inverted) b = b ? 0 : 1;
  if (!b) return {v_low, v_low};
  return phase_rail_segment(sig.validity_phase, quarter, v_low, v_high);
}

// Effective resistance between a source vertex and every other vertex of a
// small resistor graph, by eliminating the source and solving the Laplacian.
class ResistanceSolver {
 public:
  explicit ResistanceSolver(int vertex_count, int source) : n_(vertex_count), source_(source) {
    lap_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  }

  void add_resistor(int u, int v, double ohms) {
    const double g = 1.0 / ohms;
    at(u, u) += g;
    at(v, v) += g;
    at(u, v) -= g;
    at(v, u) -= g;
  }

  // Solves once per queried vertex; component sizes are tiny.
  double resistance_to(int v) const {
    std::vector<int> keep;
    keep.reserve(static_cast<std::size_t>(n_) - 1);
    for (int i = 0; i < n_; ++i)
      if (i != source_) keep.push_back(i);
    const int m = static_cast<int>(keep.size());
    std::vector<double> a(static_cast<std::size_t>(m) * m);
    std::vector<double> b(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a[static_cast<std::size_t>(i) * m + j] = at(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    int target = -1;
    for (int i = 0; i < m; ++i)
      if (keep[static_cast<std::size_t>(i)] == v) target = i;
    if (target < 0) throw std::logic_error("resistance_to: vertex is the source");
    b[static_cast<std::size_t>(target)] = 1.0;  // unit current injection, extracted at the source
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < m; ++col) {
      int pivot = col;
      for (int r = col + 1; r < m; ++r)
        if (std::abs(a[static_cast<std::size_t>(r) * m + col]) > std::abs(a[static_cast<std::size_t>(pivot) * m + col])) pivot = r;
      if (std::abs(a[static_cast<std::size_t>(pivot) * m + col]) < 1e-30)
        throw netlist_fault("disconnected resistor network in component solve");
      if (pivot != col) {
        for (int c = 0; c < m; ++c) std::swap(a[static_cast<std::size_t>(pivot) * m + c], a[static_cast<std::size_t>(col) * m + c]);
        std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(col)]);
      }
      const double d = a[static_cast<std::size_t>(col) * m + col];
      for (int r = col + 1; r < m; ++r) {
        const double factor = a[static_cast<std::size_t>(r) * m + col] / d;
        if (factor == 0) continue;
        for (int c = col; c < m; ++c) a[static_cast<std::size_t>(r) * m + c] -= factor * a[static_cast<std::size_t>(col) * m + c];
        b[static_cast<std::size_t>(r)] -= factor * b[static_cast<std::size_t>(col)];
      }
    }
    std::vector<double> x(static_cast<std::size_t>(m));
    for (int r = m - 1; r >= 0; --r) {
      double s = b[static_cast<std::size_t>(r)];
      for (int c = r + 1; c < m; ++c) s -= a[static_cast<std::size_t>(r) * m + c] * x[static_cast<std::size_t>(c)];
      x[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r) * m + r];
    }
    return x[static_cast<std::size_t>(target)];
  }

 private:
  double& at(int i, int j) { return lap_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const { return lap_[static_cast<std::size_t>(i) * n_ + j]; }
  int n_;
  int source_;
  std::vector<double> lap_;
};

}  // namespace detail

inline PhaseState phase_state(const ClockSpec& clock, int quarter) {
  clock.validate();
  PhaseState s;
  s.phase_index = ((quarter % 4) + 4) % 4;
  s.time = quarter * clock.ramp_time();
  for (int i = 0; i < 4; ++i)
    s.rail_voltages[i] = detail::phase_rail_segment(i, quarter, clock.v_low, clock.v_high).v_begin;
  return s;
}

inline SimResult simulate(const Netlist& netlist, const ClockSpec& clock, const Stimulus& stimulus,
                          int n_cycles) {
  netlist.validate();
  clock.validate();
  if (n_cycles < 1) throw std::invalid_argument("simulate: n_cycles must be >= 1");

  const double v_low = clock.v_low;
  const double v_high = clock.v_high;
  const double v_mid = 0.5 * (v_low + v_high);
  const double tq = clock.ramp_time();
  const int total_quarters = 4 * n_cycles;
  const int node_count = static_cast<int>(netlist.nodes.size());
  const int rail_count = static_cast<int>(netlist.rails.size());

  // Port name owning each driver-backed signal, for stimulus lookup.
  std::vector<std::string> driver_port(netlist.signals.size());
  for (const auto& p : netlist.ports)
    if (p.is_input) driver_port[static_cast<std::size_t>(p.signal)] = p.name;

  std::vector<double> v(netlist.nodes.size());
  for (std::size_t i = 0; i < netlist.nodes.size(); ++i)
    v[i] = netlist.nodes[i].initial_high ? v_high : v_low;

  SimResult result;
  result.quarter_time = tq;
  result.quarters = total_quarters;
  result.signal_voltage.assign(static_cast<std::size_t>(total_quarters),
                               std::vector<double>(netlist.signals.size(), v_low));

  auto rail_segment = [&](int rail_index, int quarter) -> detail::RailSegment {
    const Rail& r = netlist.rails[static_cast<std::size_t>(rail_index)];
    switch (r.kind) {
      case RailKind::Phase: return detail::phase_rail_segment(r.phase, quarter, v_low, v_high);
      case RailKind::DcLow: return {v_low, v_low};
      case RailKind::DcHigh: return {v_high, v_high};
      case RailKind::Driver: {
        const Signal& s = netlist.signals[static_cast<std::size_t>(r.signal)];
        return detail::driver_rail_segment(s, r.inverted, stimulus, driver_port[static_cast<std::size_t>(r.signal)],
                                           quarter, v_low, v_high);
      }
    }
    return {v_low, v_low};
  };

  for (int q = 0; q < total_quarters; ++q) {
    const double t0 = q * tq;

    // Sample every control at the quarter boundary.
    auto signal_true = [&](int signal_index, bool inverted) -> bool {
      const Signal& s = netlist.signals[static_cast<std::size_t>(signal_index)];
      if (s.driver) {
        // Evaluate the driver pair's rail voltage at t0 (the previous
        // quarter's end value).
        detail::RailSegment prev =
            q == 0 ? detail::RailSegment{v_low, v_low}
                   : detail::driver_rail_segment(s, inverted, stimulus,
                                                 driver_port[static_cast<std::size_t>(signal_index)], q - 1, v_low, v_high);
        return prev.v_end > v_mid;
      }
      const int node = inverted ? s.node_b : s.node_a;
      if (node < 0) return false;  // complement never materialized
      return v[static_cast<std::size_t>(node)] > v_mid;
    };

    std::vector<char> on(netlist.switches.size(), 0);
    for (std::size_t i = 0; i < netlist.switches.size(); ++i) {
      const Switch& sw = netlist.switches[i];
      on[i] = signal_true(sw.control_signal, sw.control_inverted) ? 1 : 0;
    }

    // Connected components over nodes and rails through closed switches.
    const int vertex_count = node_count + rail_count;
    std::vector<int> parent(static_cast<std::size_t>(vertex_count));
    for (int i = 0; i < vertex_count; ++i) parent[static_cast<std::size_t>(i)] = i;
    std::vector<int> rank(static_cast<std::size_t>(vertex_count), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    auto unite = [&](int a, int b) {
      a = find(a);
      b = find(b);
      if (a == b) return;
      if (rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]) std::swap(a, b);
      parent[static_cast<std::size_t>(b)] = a;
      if (rank[static_cast<std::size_t>(a)] == rank[static_cast<std::size_t>(b)]) ++rank[static_cast<std::size_t>(a)];
    };
    auto vertex_of = [&](const Terminal& t) {
      return t.kind == Terminal::Kind::Node ? t.index : node_count + t.index;
    };
    for (std::size_t i = 0; i < netlist.switches.size(); ++i)
      if (on[i]) unite(vertex_of(netlist.switches[i].a), vertex_of(netlist.switches[i].b));

    std::map<int, std::vector<int>> comp_nodes;   // root -> node indices
    std::map<int, std::vector<int>> comp_rails;   // root -> rail indices
    for (int n = 0; n < node_count; ++n) comp_nodes[find(n)].push_back(n);
    for (int r = 0; r < rail_count; ++r) comp_rails[find(node_count + r)].push_back(r);

    for (auto& [root, rails_here] : comp_rails) {
      if (rails_here.size() > 1) {
        detail::RailSegment first = rail_segment(rails_here.front(), q);
        for (std::size_t i = 1; i < rails_here.size(); ++i) {
          detail::RailSegment other = rail_segment(rails_here[static_cast<std::size_t>(i)], q);
          if (other.v_begin != first.v_begin || other.v_end != first.v_end)
            throw netlist_fault("conductive loop between rails " +
                                netlist.rails[static_cast<std::size_t>(rails_here.front())].name + " and " +
                                netlist.rails[static_cast<std::size_t>(rails_here[static_cast<std::size_t>(i)])].name);
        }
      }
    }

    for (auto& [root, members] : comp_nodes) {
      auto rit = comp_rails.find(root);
      const bool has_rail = rit != comp_rails.end() && !rit->second.empty();

      if (!has_rail) {
        // Floating group: charge sharing if voltages disagree.
        if (members.size() > 1) {
          double ctot = 0, qtot = 0;
          for (int n : members) {
            ctot += netlist.nodes[static_cast<std::size_t>(n)].capacitance;
            qtot += netlist.nodes[static_cast<std::size_t>(n)].capacitance * v[static_cast<std::size_t>(n)];
          }
          const double vf = qtot / ctot;
          double loss = 0;
          for (int n : members) {
            const double dv = v[static_cast<std::size_t>(n)] - vf;
            loss += 0.5 * netlist.nodes[static_cast<std::size_t>(n)].capacitance * dv * dv;
            v[static_cast<std::size_t>(n)] = vf;
          }
          if (loss > 0) result.trace.add(t0, EnergyLocation::Channel, loss, false, "charge_share");
        }
        continue;
      }

      const int source_rail = rit->second.front();
      const detail::RailSegment seg = rail_segment(source_rail, q);

      // Hard switching: nodes that join the group away from the rail level.
      for (int n : members) {
        const double dv = v[static_cast<std::size_t>(n)] - seg.v_begin;
        if (std::abs(dv) > 1e-12) {
          const double c = netlist.nodes[static_cast<std::size_t>(n)].capacitance;
          result.trace.add(t0, EnergyLocation::Channel, 0.5 * c * dv * dv, false,
                           netlist.nodes[static_cast<std::size_t>(n)].name);
          v[static_cast<std::size_t>(n)] = seg.v_begin;
        }
      }

      // Ramp tracking.
      const double dv_rail = seg.v_end - seg.v_begin;
      if (dv_rail != 0) {
        // Map component vertices to a dense range for the resistance solve.
        std::map<int, int> dense;
        for (int n : members) dense.emplace(n, static_cast<int>(dense.size()));
        const int source_vertex = static_cast<int>(dense.size());
        int extra = source_vertex + 1;
        std::map<int, int> rail_vertex;  // every rail in the group is the source
        for (int r : rit->second) rail_vertex[r] = source_vertex;

        detail::ResistanceSolver solver(extra, source_vertex);
        bool any_edge = false;
        for (std::size_t i = 0; i < netlist.switches.size(); ++i) {
          if (!on[i]) continue;
          const Switch& sw = netlist.switches[i];
          auto resolve = [&](const Terminal& t) -> int {
            if (t.kind == Terminal::Kind::Node) {
              auto it = dense.find(t.index);
              return it == dense.end() ? -1 : it->second;
            }
            auto it = rail_vertex.find(t.index);
            return it == rail_vertex.end() ? -1 : it->second;
          };
          const int ua = resolve(sw.a);
          const int ub = resolve(sw.b);
          if (ua < 0 || ub < 0 || ua == ub) continue;
          solver.add_resistor(ua, ub, sw.on_resistance);
          any_edge = true;
        }
        for (int n : members) {
          const double c = netlist.nodes[static_cast<std::size_t>(n)].capacitance;
          const double signal_energy = 0.5 * c * dv_rail * dv_rail;
          double channel = signal_energy;
          if (any_edge) {
            const double r_eff = solver.resistance_to(dense[n]);
            channel = adiabatic_ramp_energy(c, std::abs(dv_rail), r_eff, tq);
          }
          result.trace.add(t0, EnergyLocation::Channel, channel, true,
                           netlist.nodes[static_cast<std::size_t>(n)].name);
          result.trace.add(t0, EnergyLocation::RailReturn, signal_energy - channel, true,
                           netlist.nodes[static_cast<std::size_t>(n)].name);
          v[static_cast<std::size_t>(n)] = seg.v_end;
        }
      }
    }

    // Record end-of-quarter signal voltages.
    auto& row = result.signal_voltage[static_cast<std::size_t>(q)];
    for (std::size_t s = 0; s < netlist.signals.size(); ++s) {
      const Signal& sig = netlist.signals[s];
      if (sig.driver) {
        row[s] = detail::driver_rail_segment(sig, false, stimulus, driver_port[s], q, v_low, v_high).v_end;
      } else if (sig.node_a >= 0) {
        row[s] = v[static_cast<std::size_t>(sig.node_a)];
      }
    }
  }

  return result;
}

// --- Builders ---------------------------------------------------------------

namespace detail {

inline void add_phase_rails(Netlist& n) {
  for (int i = 0; i < 4; ++i) n.add_rail({"phi" + std::to_string(i), RailKind::Phase, i, -1, false});
}

inline int add_driver_signal(Netlist& n, const std::string& name, int phase, DriverStyle style) {
  Signal s;
  s.name = name;
  s.validity_phase = phase;
  s.delay_quarters = phase;
  s.driver = true;
  s.style = style;
  const int idx = n.add_signal(s);
  n.ports.push_back({name, idx, true});
  return idx;
}

}  // namespace detail

// A 2LAL-style shift register: stage k's transmission gate charges output
// k+1 from clock phase (k+1) mod 4 while input k is valid, and each signal
// is discharged one quarter later by the gate the successor value controls.
// One stage advances per clock phase. With loopback the chain closes into a
// ring holding one circulating bit per four stages.
inline Netlist build_shift_register(int n_stages, const TransistorProcess& p, bool loopback = false,
                                    const std::vector<int>& ring_tokens = {}) {
  p.validate();
  if (n_stages < 1) throw std::invalid_argument("build_shift_register: n_stages must be >= 1");
  if (loopback && n_stages % 4 != 0)
    throw std::invalid_argument("build_shift_register: loopback requires a multiple of 4 stages");

  Netlist n;
  n.name = loopback ? "shift_ring" : "shift_register";
  n.gate_count = n_stages;
  detail::add_phase_rails(n);

  std::vector<int> sig(static_cast<std::size_t>(n_stages) + 1);
  if (loopback) {
    // Ring: signals 0..n-1, node-backed. A circulating bit occupies two
    // adjacent stages at a quarter boundary (the pulse and its retiring
    // copy), so each seeded token raises positions 4g+2 and 4g+3.
    for (int k = 0; k < n_stages; ++k) {
      const bool token_here =
          k % 4 >= 2 && (k / 4) < static_cast<int>(ring_tokens.size()) && ring_tokens[static_cast<std::size_t>(k / 4)];
      Signal s;
      s.name = "s" + std::to_string(k);
      s.validity_phase = k % 4;
      s.delay_quarters = k;
      s.node_a = n.add_node(s.name, p.node_capacitance, token_here);
      sig[static_cast<std::size_t>(k)] = n.add_signal(s);
      n.ports.push_back({s.name, sig[static_cast<std::size_t>(k)], false});
    }
    for (int k = 0; k < n_stages; ++k) {
      const int next = (k + 1) % n_stages;
      // Compute gate: in k drives out k+1 from the next clock phase.
      n.switches.push_back({sig[static_cast<std::size_t>(k)], false, Terminal::rail((k + 1) % 4),
                            Terminal::node(n.signals[static_cast<std::size_t>(sig[static_cast<std::size_t>(next)])].node_a), p.on_resistance});
      // Decompute gate: the successor value rides signal k back down phi_k.
      n.switches.push_back({sig[static_cast<std::size_t>(next)], false, Terminal::rail(k % 4),
                            Terminal::node(n.signals[static_cast<std::size_t>(sig[static_cast<std::size_t>(k)])].node_a), p.on_resistance});
    }
    return n;
  }

  sig[0] = detail::add_driver_signal(n, "in", 0, DriverStyle::FourPhase);
  for (int k = 1; k <= n_stages; ++k) {
    Signal s;
    s.name = "s" + std::to_string(k);
    s.validity_phase = k % 4;
    s.delay_quarters = k;
    s.node_a = n.add_node(s.name, p.node_capacitance);
    sig[static_cast<std::size_t>(k)] = n.add_signal(s);
  }
  for (int k = 0; k < n_stages; ++k) {
    n.switches.push_back({sig[static_cast<std::size_t>(k)], false, Terminal::rail((k + 1) % 4),
                          Terminal::node(n.signals[static_cast<std::size_t>(sig[static_cast<std::size_t>(k + 1)])].node_a), p.on_resistance});
    if (k >= 1)
      n.switches.push_back({sig[static_cast<std::size_t>(k + 1)], false, Terminal::rail(k % 4),
                            Terminal::node(n.signals[static_cast<std::size_t>(sig[static_cast<std::size_t>(k)])].node_a), p.on_resistance});
  }
  // The last signal has no successor; its own sampled value gates the
  // discharge (exact under quarter-start switch sampling).
  n.switches.push_back({sig[static_cast<std::size_t>(n_stages)], false, Terminal::rail(n_stages % 4),
                        Terminal::node(n.signals[static_cast<std::size_t>(sig[static_cast<std::size_t>(n_stages)])].node_a), p.on_resistance});
  n.ports.push_back({"out", sig[static_cast<std::size_t>(n_stages)], false});
  return n;
}

// Dual-rail AND gate: out = a AND b computed on phase 1 from phase-0 inputs.
// The true rail charges through the series pair, the complement rail through
// the parallel pair, which is the 2LAL reading of the function.
inline Netlist build_and_gate(const TransistorProcess& p) {
  p.validate();
  Netlist n;
  n.name = "and_gate";
  n.gate_count = 1;
  detail::add_phase_rails(n);

  const int a = detail::add_driver_signal(n, "a", 0, DriverStyle::FourPhase);
  const int b = detail::add_driver_signal(n, "b", 0, DriverStyle::FourPhase);

  Signal mid;
  mid.name = "m";
  mid.validity_phase = 1;
  mid.delay_quarters = 1;
  mid.node_a = n.add_node("m", p.node_capacitance);
  const int m = n.add_signal(mid);

  Signal out;
  out.name = "out";
  out.validity_phase = 1;
  out.delay_quarters = 1;
  out.node_a = n.add_node("out", p.node_capacitance);
  out.node_b = n.add_node("out_n", p.node_capacitance);
  const int o = n.add_signal(out);
  n.ports.push_back({"out", o, false});

  const int out_node = n.signals[static_cast<std::size_t>(o)].node_a;
  const int outn_node = n.signals[static_cast<std::size_t>(o)].node_b;
  const int m_node = n.signals[static_cast<std::size_t>(m)].node_a;

  n.switches.push_back({a, false, Terminal::rail(1), Terminal::node(m_node), p.on_resistance});
  n.switches.push_back({b, false, Terminal::node(m_node), Terminal::node(out_node), p.on_resistance});
  n.switches.push_back({a, true, Terminal::rail(1), Terminal::node(outn_node), p.on_resistance});
  n.switches.push_back({b, true, Terminal::rail(1), Terminal::node(outn_node), p.on_resistance});
  // Self-gated discharge paths for the three charged nodes.
  n.switches.push_back({m, false, Terminal::rail(1), Terminal::node(m_node), p.on_resistance});
  n.switches.push_back({o, false, Terminal::rail(1), Terminal::node(out_node), p.on_resistance});
  n.switches.push_back({o, true, Terminal::rail(1), Terminal::node(outn_node), p.on_resistance});
  return n;
}

// A bank of CMOS gates on DC rails; every node follows the input level, so
// each input flip hard-switches the full bank.
inline Netlist build_cmos_chain(int n_gates, const TransistorProcess& p) {
  p.validate();
  if (n_gates < 1) throw std::invalid_argument("build_cmos_chain: n_gates must be >= 1");
  Netlist n;
  n.name = "cmos_chain";
  n.gate_count = n_gates;
  const int vdd = n.add_rail({"vdd", RailKind::DcHigh, 0, -1, false});
  const int gnd = n.add_rail({"gnd", RailKind::DcLow, 0, -1, false});
  const int in = detail::add_driver_signal(n, "in", 0, DriverStyle::DcLevel);
  for (int k = 0; k < n_gates; ++k) {
    Signal s;
    s.name = "g" + std::to_string(k);
    s.validity_phase = 0;
    s.delay_quarters = 0;
    s.node_a = n.add_node(s.name, p.node_capacitance);
    const int idx = n.add_signal(s);
    n.switches.push_back({in, false, Terminal::rail(vdd), Terminal::node(n.signals[static_cast<std::size_t>(idx)].node_a), p.on_resistance});
    n.switches.push_back({in, true, Terminal::rail(gnd), Terminal::node(n.signals[static_cast<std::size_t>(idx)].node_a), p.on_resistance});
    if (k == 0) n.ports.push_back({"out", idx, false});
  }
  return n;
}

// --- Frequency sweep ---------------------------------------------------------

struct SweepPoint {
  double frequency = 0;       // Hz
  double clock_period = 0;    // s
  double dynamic_per_gate = 0;  // W, channel dissipation only
  double static_per_gate = 0;   // W
  double power_per_gate = 0;    // W
};

// Per-gate channel power across frequencies: dynamic dissipation measured by
// simulation plus the leakage floor.
inline std::vector<SweepPoint> energy_sweep(const Netlist& netlist, const TransistorProcess& p,
                                            const std::vector<double>& frequencies, double duty,
                                            const Stimulus& stimulus, int warmup_cycles = 4,
                                            int measure_cycles = 4) {
  p.validate();
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > 0)) throw std::invalid_argument("energy_sweep: frequencies must be > 0");
    if (i > 0 && frequencies[i] <= frequencies[i - 1])
      throw std::invalid_argument("energy_sweep: frequencies must be sorted ascending");
  }
  const double leak = static_power(p, duty);
  std::vector<SweepPoint> curve;
  curve.reserve(frequencies.size());
  for (double f : frequencies) {
    ClockSpec clock = ClockSpec::at(f, 0.0, p.swing);
    SimResult sim = simulate(netlist, clock, stimulus, warmup_cycles + measure_cycles);
    const double t_begin = sim.cycle_start_time(warmup_cycles);
    const double t_end = sim.cycle_start_time(warmup_cycles + measure_cycles);
    const double channel = sim.trace.total_between(t_begin, t_end, EnergyLocation::Channel);
    const double per_gate_energy = channel / measure_cycles / netlist.gate_count;
    SweepPoint pt;
    pt.frequency = f;
    pt.clock_period = 1.0 / f;
    pt.dynamic_per_gate = per_gate_energy * f;
    pt.static_per_gate = leak;
    pt.power_per_gate = pt.dynamic_per_gate + leak;
    curve.push_back(pt);
  }
  return curve;
}

// Least-squares slope of log(power) against log(clock period) inside a band.
inline double fit_loglog_slope(const std::vector<SweepPoint>& curve, double f_min, double f_max) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& pt : curve) {
    if (pt.frequency < f_min || pt.frequency > f_max) continue;
    if (!(pt.power_per_gate > 0)) continue;
    const double x = std::log(pt.clock_period);
    const double y = std::log(pt.power_per_gate);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 3) throw std::invalid_argument("fit_loglog_slope: need at least 3 points in band");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace cryosim
