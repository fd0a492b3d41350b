#ifndef GRIDRESTORE_CASE_FILE_HPP
#define GRIDRESTORE_CASE_FILE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridrestore/grid.hpp"
#include "gridrestore/planner.hpp"

namespace gridrestore {

struct PlannerDefaults {
  double omega = 1.0;
  double switch_minutes = 5.0;
  double fluctuation = kDefaultFluctuation;
  std::uint64_t seed = 1;
  bool rank_per_mw = false;
};

/// Parsed and validated case. Every optional input has been resolved, so
/// `grid` is complete (default cranking power, seeded load coefficients,
/// wind series read from disk).
struct CaseFile {
  std::string name;
  Grid grid;
  PlannerDefaults planner;

  PlannerConfig planner_config() const;
};

/// Parses case text. Relative wind profile paths resolve against `base_dir`.
/// Throws ParseError (malformed text, with line) or ValidationError (the
/// network violates an invariant).
/// `seed`, when given, replaces the case's own seed for drawing omitted load
/// frequency coefficients.
CaseFile parse_case(std::string_view text, const std::filesystem::path& base_dir = ".",
                    std::optional<std::uint64_t> seed = std::nullopt);

/// Reads and parses a case file. Throws ParseError if it cannot be read.
CaseFile parse_case_file(const std::filesystem::path& path, std::optional<std::uint64_t> seed = std::nullopt);

/// Reads a two-column (minute, MW) wind series. Minutes must start at 0 and
/// be evenly spaced; the spacing becomes the resolution.
WindProfile read_wind_profile(const std::filesystem::path& path);

/// Canonical text form: fixed section order, keys sorted within each row,
/// shortest round-trip number formatting, wind series inlined. Parsing the
/// output reproduces the same grid.
std::string to_canonical_text(const CaseFile& c);

/// Uniform draw in [0, 1) from a 64-bit generator, independent of the
/// standard library's distribution implementations.
double unit_uniform(std::uint64_t& state);

}  // namespace gridrestore

#endif  // GRIDRESTORE_CASE_FILE_HPP
