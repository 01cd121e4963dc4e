#pragma once

// Sequential-storage pipeline: a wide slow shift-register store feeding
// multiplexer levels that trade width for clock rate at constant bandwidth,
// plus the behavioral envelope chain (DAC and flux-controlled SPST switch).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cryosim/scaling_planner.hpp"

namespace cryosim {

struct StorePlan {
  int word_width = 2000;    // bits per store word
  int depth = 100;          // words
  double clock = 4e6;       // Hz
  bool loopback = false;
  int depth_cap = 10000;    // chip size limitation, words

  void validate() const {
    if (word_width < 1) throw std::invalid_argument("store: word_width must be >= 1");
    if (depth < 1) throw std::invalid_argument("store: depth must be >= 1");
    if (depth > depth_cap) throw std::invalid_argument("store: depth exceeds the chip size cap");
    if (!(clock > 0)) throw std::invalid_argument("store: clock must be > 0");
  }
};

struct SequentialStore {
  StorePlan plan;
  std::vector<std::vector<std::uint8_t>> words;
};

inline SequentialStore load_store(const StorePlan& plan,
                                  std::vector<std::vector<std::uint8_t>> words) {
  plan.validate();
  if (static_cast<int>(words.size()) > plan.depth)
    throw std::invalid_argument("load_store: more words than the store holds");
  for (const auto& w : words)
    if (static_cast<int>(w.size()) != plan.word_width)
      throw std::invalid_argument("load_store: word width mismatch");
  return SequentialStore{plan, std::move(words)};
}

struct MuxStage {
  int ratio = 10;
  int input_width = 0;

  int output_width() const { return input_width / ratio; }

  void validate() const {
    if (ratio < 1) throw std::invalid_argument("mux: ratio must be >= 1");
    if (input_width < 1 || input_width % ratio != 0)
      throw std::invalid_argument("mux: ratio must divide input_width");
  }
};

struct StreamBoundary {
  std::string name;
  int width = 0;
  double clock = 0;                     // Hz
  double bandwidth_bits_per_s = 0;      // width * clock
  double gate_power = 0;                // W, when an energy binding is given
};

// Per-level energy binding: which worksheet row supplies the per-gate energy
// for the store and for each mux level.
struct LevelEnergy {
  std::string level;
  double gates = 0;
  double energy_per_op = 0;  // J per gate per tick
};

struct ThroughputReport {
  std::vector<StreamBoundary> boundaries;
  double latency_s = 0;              // first bit in to first bit out
  double latency_bound_s = 0;        // (levels + 1) slow-mux ticks + one store tick
  std::vector<LevelEnergy> energy;
  double total_power = 0;            // W across all bound levels
};

struct PipelineRun {
  std::vector<std::vector<std::uint8_t>> output;  // one word per output tick
  ThroughputReport report;
};

// Drains the store through the mux chain. The output stream is the exact
// serialization of the stored bits: tick t carries flattened bits
// [t*w_out, (t+1)*w_out).
inline PipelineRun run_pipeline(const SequentialStore& store, const std::vector<MuxStage>& stages,
                                std::int64_t n_output_ticks,
                                const std::vector<ScalingStep>& energy_binding = {}) {
  store.plan.validate();
  int width = store.plan.word_width;
  double clock = store.plan.clock;

  PipelineRun run;
  run.report.boundaries.push_back(
      {"store", width, clock, static_cast<double>(width) * clock, 0});
  double latency = 1.0 / clock;
  double slowest_mux_tick = 0;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    MuxStage st = stages[i];
    st.validate();
    if (st.input_width != width)
      throw std::invalid_argument("run_pipeline: stage " + std::to_string(i) +
                                  " input width does not chain");
    width = st.output_width();
    clock *= st.ratio;
    latency += 1.0 / clock;
    if (slowest_mux_tick == 0) slowest_mux_tick = 1.0 / clock;
    run.report.boundaries.push_back({"mux" + std::to_string(i + 1), width, clock,
                                     static_cast<double>(width) * clock, 0});
  }
  run.report.latency_s = latency;
  run.report.latency_bound_s =
      (static_cast<double>(stages.size()) + 1.0) * slowest_mux_tick + 1.0 / store.plan.clock;

  // Energy attribution: store plus one binding per mux level, slowest first.
  if (!energy_binding.empty()) {
    if (energy_binding.size() != stages.size() + 1)
      throw std::invalid_argument("run_pipeline: need one energy row per level");
    for (std::size_t i = 0; i < energy_binding.size(); ++i) {
      const ScalingStep& step = energy_binding[i];
      step.validate();
      const double per_op =
          step.dynamic_power / (static_cast<double>(step.gate_count) * step.clock_rate);
      LevelEnergy le;
      le.level = run.report.boundaries[i].name;
      if (i == 0) {
        le.gates = static_cast<double>(store.plan.word_width) * store.plan.depth;
      } else {
        // One transmission element per input line of the mux level.
        le.gates = static_cast<double>(run.report.boundaries[i - 1].width);
      }
      le.energy_per_op = per_op;
      run.report.energy.push_back(le);
      run.report.total_power += le.gates * per_op * run.report.boundaries[i].clock;
    }
  }

  // Serialize.
  const std::int64_t total_bits = n_output_ticks * width;
  const std::int64_t stored_bits =
      static_cast<std::int64_t>(store.words.size()) * store.plan.word_width;
  if (stored_bits == 0 && total_bits > 0)
    throw std::invalid_argument("run_pipeline: store is empty");
  if (!store.plan.loopback && total_bits > stored_bits)
    throw std::invalid_argument("run_pipeline: output exceeds stored data without loopback");
  run.output.reserve(static_cast<std::size_t>(n_output_ticks));
  for (std::int64_t t = 0; t < n_output_ticks; ++t) {
    std::vector<std::uint8_t> word(static_cast<std::size_t>(width));
    for (int b = 0; b < width; ++b) {
      const std::int64_t bit_index = (t * width + b) % stored_bits;
      const auto w = static_cast<std::size_t>(bit_index / store.plan.word_width);
      const auto o = static_cast<std::size_t>(bit_index % store.plan.word_width);
      word[static_cast<std::size_t>(b)] = store.words[w][o];
    }
    run.output.push_back(std::move(word));
  }
  return run;
}

// --- Envelope chain -----------------------------------------------------------

struct WaveformTable {
  std::vector<std::uint64_t> samples;
  double sample_rate = 1e9;  // Hz
  int bit_depth = 8;

  void validate() const {
    if (bit_depth < 1 || bit_depth > 63) throw std::invalid_argument("waveform: bit_depth out of range");
    if (!(sample_rate > 0)) throw std::invalid_argument("waveform: sample_rate must be > 0");
    const std::uint64_t max_code = (std::uint64_t{1} << bit_depth) - 1;
    for (auto s : samples)
      if (s > max_code) throw std::invalid_argument("waveform: code exceeds bit depth");
  }
};

// Waveform tables import from CSV, one sample code per line. Blank lines and
// '#' comments are skipped.
inline WaveformTable load_waveform_csv(const std::string& text, double sample_rate,
                                       int bit_depth) {
  WaveformTable table;
  table.sample_rate = sample_rate;
  table.bit_depth = bit_depth;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos = end == std::string::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    std::size_t b = line.find_last_not_of(" \t\r");
    line = line.substr(a, b - a + 1);
    try {
      table.samples.push_back(std::stoull(line));
    } catch (const std::exception&) {
      throw std::invalid_argument("waveform csv line " + std::to_string(line_no) +
                                  ": expected a sample code, got '" + line + "'");
    }
  }
  table.validate();
  return table;
}

// Linear code-to-current map of the superconducting DAC.
inline std::vector<double> dac_convert(const WaveformTable& table, double full_scale) {
  table.validate();
  const double max_code = static_cast<double>((std::uint64_t{1} << table.bit_depth) - 1);
  std::vector<double> out;
  out.reserve(table.samples.size());
  for (auto code : table.samples) out.push_back(full_scale * static_cast<double>(code) / max_code);
  return out;
}

// Flux-controlled SPST microwave switch, linear in the control current.
struct SpstSwitchModel {
  double full_scale_current = 1e-3;  // A at full transmission

  double transmission(double i_mod) const { return i_mod / full_scale_current; }
};

constexpr double kCarrierMinHz = 1e9;
constexpr double kCarrierMaxHz = 50e9;
constexpr double kBurstMinS = 10e-9;
constexpr double kBurstMaxS = 1e-6;

// Envelope-level modulation: the output amplitude at each sample is the
// switch transmission under the modulation current. No carrier is
// synthesized; the burst is characterized by its envelope alone.
inline std::vector<double> modulate(const std::vector<double>& envelope, double sample_rate,
                                    double carrier_freq, const SpstSwitchModel& sw) {
  if (!(carrier_freq >= kCarrierMinHz && carrier_freq <= kCarrierMaxHz))
    throw std::invalid_argument("modulate: carrier outside the 1-50 GHz band");
  if (!(sample_rate > 0)) throw std::invalid_argument("modulate: sample_rate must be > 0");
  const double duration = static_cast<double>(envelope.size()) / sample_rate;
  if (!envelope.empty() && (duration < kBurstMinS || duration > kBurstMaxS))
    throw std::invalid_argument("modulate: burst duration outside 10 ns - 1 us");
  std::vector<double> out;
  out.reserve(envelope.size());
  for (double i : envelope) out.push_back(sw.transmission(i));
  return out;
}

// --- Feedback path --------------------------------------------------------------

struct FeedbackEvent {
  double time = 0;          // s, relative to the start of the control sequence
  std::string target_mode;  // branch destination
};

// Ordered queue from the high-speed layer to the reconfiguration controller.
struct FeedbackQueue {
  std::vector<FeedbackEvent> events;
};

inline void feedback_inject(FeedbackQueue& q, FeedbackEvent event) {
  q.events.push_back(std::move(event));
}

}  // namespace cryosim
