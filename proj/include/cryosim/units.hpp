#pragma once

// Unit-suffixed quantity parsing and byte-stable number formatting. Every
// physical quantity in a scenario file carries an explicit unit; parsing a
// dimensioned field without one is an error, which blocks the silent
// factor-of-1000 mistakes this domain invites.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cryosim {

enum class Dimension {
  Dimensionless,
  Capacitance,  // F
  Resistance,   // ohm
  Voltage,      // V
  Energy,       // J
  Time,         // s
  Temperature,  // K
  Frequency,    // Hz
  Power,        // W
  Current,      // A
};

inline const char* unit_symbol(Dimension d) {
  switch (d) {
    case Dimension::Dimensionless: return "";
    case Dimension::Capacitance: return "F";
    case Dimension::Resistance: return "Ohm";
    case Dimension::Voltage: return "V";
    case Dimension::Energy: return "J";
    case Dimension::Time: return "s";
    case Dimension::Temperature: return "K";
    case Dimension::Frequency: return "Hz";
    case Dimension::Power: return "W";
    case Dimension::Current: return "A";
  }
  return "";
}

namespace detail {

struct Prefix {
  std::string_view symbol;
  double factor;
};

inline constexpr std::array<Prefix, 12> kPrefixes{{
    {"a", 1e-18}, {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"µ", 1e-6},
    {"μ", 1e-6}, {"m", 1e-3}, {"k", 1e3}, {"M", 1e6}, {"G", 1e9}, {"T", 1e12},
}};

inline std::optional<Dimension> base_unit(std::string_view token) {
  if (token == "F") return Dimension::Capacitance;
  if (token == "Ohm" || token == "ohm" || token == "Ω") return Dimension::Resistance;
  if (token == "V") return Dimension::Voltage;
  if (token == "J") return Dimension::Energy;
  if (token == "s") return Dimension::Time;
  if (token == "K") return Dimension::Temperature;
  if (token == "Hz") return Dimension::Frequency;
  if (token == "W") return Dimension::Power;
  if (token == "A") return Dimension::Current;
  return std::nullopt;
}

}  // namespace detail

// Parses a unit token like "fF", "kOhm", "MHz", "mK" into its dimension and
// scale factor.
inline bool parse_unit(std::string_view token, Dimension& dim_out, double& factor_out) {
  for (std::size_t base_len = 1; base_len <= 3 && base_len <= token.size(); ++base_len) {
    const std::string_view base = token.substr(token.size() - base_len);
    auto dim = detail::base_unit(base);
    if (!dim) continue;
    const std::string_view head = token.substr(0, token.size() - base_len);
    if (head.empty()) {
      dim_out = *dim;
      factor_out = 1.0;
      return true;
    }
    for (const auto& p : detail::kPrefixes) {
      if (head == p.symbol) {
        dim_out = *dim;
        factor_out = p.factor;
        return true;
      }
    }
  }
  return false;
}

// Parses "<number> [unit]" against an expected dimension.
inline double parse_quantity(std::string_view text, Dimension expected) {
  std::size_t i = 0;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  std::size_t j = i;
  while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
  const std::string_view num = text.substr(i, j - i);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
  if (ec != std::errc{} || ptr != num.data() + num.size())
    throw std::invalid_argument("not a number: '" + std::string(num) + "'");
  while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
  std::size_t k = text.size();
  while (k > j && (text[k - 1] == ' ' || text[k - 1] == '\t')) --k;
  const std::string_view unit = text.substr(j, k - j);

  if (expected == Dimension::Dimensionless) {
    if (!unit.empty())
      throw std::invalid_argument("dimensionless field cannot carry unit '" + std::string(unit) + "'");
    return value;
  }
  if (unit.empty())
    throw std::invalid_argument(std::string("missing unit; expected e.g. '") + unit_symbol(expected) + "'");
  Dimension dim;
  double factor;
  if (!parse_unit(unit, dim, factor))
    throw std::invalid_argument("unknown unit '" + std::string(unit) + "'");
  if (dim != expected)
    throw std::invalid_argument("unit '" + std::string(unit) + "' has the wrong dimension; expected " +
                                unit_symbol(expected));
  return value * factor;
}

// Shortest representation that round-trips; used for all CSV output.
inline std::string format_full(double value) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

// Engineering notation with an SI prefix, for aligned text tables.
inline std::string format_eng(double value, const std::string& unit) {
  if (value == 0) return "0 " + unit;
  static const struct { double factor; const char* sym; } scales[] = {
      {1e12, "T"}, {1e9, "G"}, {1e6, "M"}, {1e3, "k"}, {1.0, ""},
      {1e-3, "m"}, {1e-6, "u"}, {1e-9, "n"}, {1e-12, "p"}, {1e-15, "f"}, {1e-18, "a"},
  };
  const double mag = std::abs(value);
  for (const auto& s : scales) {
    if (mag >= s.factor * 0.99999999) {
      const double scaled = value / s.factor;
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.4g", scaled);
      return std::string(buf) + " " + s.sym + unit;
    }
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", value);
  return std::string(buf) + " " + unit;
}

}  // namespace cryosim
