#include "gridrestore/case_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace gridrestore {

namespace {

using Row = std::map<std::string, std::pair<std::string, int>>;  // key -> (value, column)

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Reads one table row of whitespace separated key=value tokens and checks
// every key against the section's vocabulary.
class RowReader {
 public:
  RowReader(int line, std::string_view section, Row row) : line_(line), section_(section), row_(std::move(row)) {}

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, _] : row_)
      if (std::find(keys.begin(), keys.end(), k) == keys.end())
        throw ParseError(line_, "unknown field '" + k + "' in [" + std::string(section_) + "]");
  }

  bool has(const std::string& key) const { return row_.contains(key); }

  std::string text(const std::string& key) const {
    const auto it = row_.find(key);
    if (it == row_.end()) throw ParseError(line_, "missing field '" + key + "' in [" + std::string(section_) + "]");
    return it->second.first;
  }

  double number(const std::string& key) const { return parse_number(key, text(key)); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError(line_, "field '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = text(key);
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw ParseError(line_, "field '" + key + "' must be a boolean");
  }

  double parse_number(const std::string& key, std::string_view value) const {
    double v = 0.0;
    const auto* first = value.data();
    if (!value.empty() && value.front() == '+') ++first;
    const auto res = std::from_chars(first, value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v))
      throw ParseError(line_, "field '" + key + "' is not a number: '" + std::string(value) + "'");
    return v;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    const std::string all = text(key);
    std::string_view rest = all;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.push_back(parse_number(key, trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  int line() const { return line_; }

 private:
  int line_;
  std::string_view section_;
  Row row_;
};

struct RawSection {
  std::string name;
  std::vector<RowReader> rows;
};

constexpr std::string_view kSections[] = {"system", "buses", "lines", "generators", "chp_regions",
                                          "wind_profiles", "loads", "planner"};

bool is_key_value_section(std::string_view s) { return s == "system" || s == "planner"; }

std::map<std::string, RawSection> tokenize(std::string_view text) {
  std::map<std::string, RawSection> sections;
  RawSection* current = nullptr;
  std::string current_name;
  std::map<std::string, int> seen_keys;
  int line_no = 0;
  bool any_content = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    any_content = true;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "malformed section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (std::find(std::begin(kSections), std::end(kSections), name) == std::end(kSections))
        throw ParseError(line_no, "unknown section [" + name + "]");
      if (sections.contains(name)) throw ParseError(line_no, "duplicate section [" + name + "]");
      current = &sections[name];
      current->name = name;
      current_name = name;
      seen_keys.clear();
      continue;
    }
    if (!current) throw ParseError(line_no, "content before the first section");

    if (is_key_value_section(current_name)) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty() || value.empty()) throw ParseError(line_no, "expected 'key = value'");
      if (!seen_keys.emplace(key, line_no).second) throw ParseError(line_no, "duplicate field '" + key + "'");
      // One row per field, so errors point at the field's own line.
      current->rows.emplace_back(line_no, std::string_view(current->name), Row{{key, {value, 0}}});
      continue;
    }

    Row row;
    std::istringstream tokens{std::string(line)};
    std::string token;
    int column = 0;
    while (tokens >> token) {
      ++column;
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
        throw ParseError(line_no, "expected key=value, got '" + token + "'");
      if (!row.emplace(token.substr(0, eq), std::pair{token.substr(eq + 1), column}).second)
        throw ParseError(line_no, "duplicate field '" + token.substr(0, eq) + "'");
    }
    current->rows.emplace_back(line_no, std::string_view(current->name), std::move(row));
  }
  if (!any_content) throw ParseError(0, "empty case input");
  return sections;
}

// Merges the one-field rows of a key-value section, keeping the line of each.
std::map<std::string, RowReader> fields_of(const std::map<std::string, RawSection>& sections,
                                           const std::string& name, std::initializer_list<std::string_view> allowed) {
  std::map<std::string, RowReader> out;
  const auto it = sections.find(name);
  if (it == sections.end()) return out;
  for (const RowReader& r : it->second.rows) {
    r.allow_only(allowed);
    for (const auto key : allowed)
      if (r.has(std::string(key))) out.emplace(std::string(key), r);
  }
  return out;
}

const std::vector<RowReader>& rows_of(const std::map<std::string, RawSection>& sections, const std::string& name) {
  static const std::vector<RowReader> none;
  const auto it = sections.find(name);
  return it == sections.end() ? none : it->second.rows;
}

}  // namespace

double unit_uniform(std::uint64_t& state) {
  // splitmix64
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

PlannerConfig CaseFile::planner_config() const {
  PlannerConfig config;
  config.switch_minutes = planner.switch_minutes;
  config.fluctuation = planner.fluctuation;
  config.rank_per_mw = planner.rank_per_mw;
  return config;
}

WindProfile read_wind_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot read wind profile " + path.string());
  std::vector<std::pair<double, double>> points;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    std::istringstream fields{std::string(line)};
    double minute = 0.0, mw = 0.0;
    std::string extra;
    if (!(fields >> minute >> mw) || (fields >> extra))
      throw ParseError(line_no, path.filename().string() + ": expected '<minute> <MW>'");
    points.emplace_back(minute, mw);
  }
  if (points.empty()) throw ParseError(0, path.string() + ": empty wind profile");
  if (points.front().first != 0.0) throw ParseError(0, path.string() + ": wind series must start at minute 0");
  WindProfile profile;
  profile.resolution_minutes = 5;
  if (points.size() > 1) {
    const double step = points[1].first - points[0].first;
    if (step <= 0 || step != std::floor(step)) throw ParseError(0, path.string() + ": invalid wind resolution");
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i].first - points[i - 1].first != step)
        throw ParseError(0, path.string() + ": wind samples must be evenly spaced");
    profile.resolution_minutes = static_cast<int>(step);
  }
  for (const auto& [_, mw] : points) profile.samples.push_back(mw);
  return profile;
}

CaseFile parse_case(std::string_view text, const std::filesystem::path& base_dir, std::optional<std::uint64_t> seed) {
  const auto sections = tokenize(text);
  CaseFile c;

  const auto system = fields_of(sections, "system", {"name", "base_mva"});
  c.name = system.contains("name") ? system.at("name").text("name") : "";
  const double base_mva = system.contains("base_mva") ? system.at("base_mva").number("base_mva") : 100.0;

  const auto planner = fields_of(sections, "planner", {"omega", "switch_minutes", "fluctuation", "seed", "rank_per_mw"});
  if (planner.contains("omega")) c.planner.omega = planner.at("omega").number("omega");
  if (planner.contains("switch_minutes")) c.planner.switch_minutes = planner.at("switch_minutes").number("switch_minutes");
  if (planner.contains("fluctuation")) c.planner.fluctuation = planner.at("fluctuation").number("fluctuation");
  if (planner.contains("seed")) {
    const double s = planner.at("seed").number("seed");
    if (s < 0 || s != std::floor(s)) throw ParseError(planner.at("seed").line(), "seed must be a nonnegative integer");
    c.planner.seed = static_cast<std::uint64_t>(s);
  }
  if (seed) c.planner.seed = *seed;
  if (planner.contains("rank_per_mw")) c.planner.rank_per_mw = planner.at("rank_per_mw").flag("rank_per_mw", false);

  std::vector<Bus> buses;
  for (const RowReader& r : rows_of(sections, "buses")) {
    r.allow_only({"id", "v"});
    buses.push_back({BusId{r.integer("id")}, r.number("v", 1.0), false});
  }

  std::vector<Line> lines;
  for (const RowReader& r : rows_of(sections, "lines")) {
    r.allow_only({"from", "to", "r", "x", "b", "in_service"});
    lines.push_back({BusId{r.integer("from")}, BusId{r.integer("to")}, r.number("r", 0.0), r.number("x"),
                     r.number("b", 0.0), r.flag("in_service", true)});
  }

  std::vector<GeneratorUnit> generators;
  std::map<int, std::size_t> unit_row;
  for (const RowReader& r : rows_of(sections, "generators")) {
    r.allow_only({"id", "name", "bus", "kind", "p_min", "p_max", "q_min", "q_max", "droop", "black_start", "crank",
                  "hot", "cold", "hot_window"});
    GeneratorUnit g;
    g.id = UnitId{r.integer("id")};
    g.name = r.has("name") ? r.text("name") : "";
    g.bus = BusId{r.integer("bus")};
    const auto kind = unit_kind_from_string(r.text("kind"));
    if (!kind) throw ParseError(r.line(), "unknown generator kind '" + r.text("kind") + "'");
    g.kind = *kind;
    g.p_min = r.number("p_min", 0.0);
    g.p_max = r.number("p_max");
    g.q_min = r.number("q_min", 0.0);
    g.q_max = r.number("q_max", 0.0);
    g.droop_k = r.number("droop", 0.0);
    g.black_start = r.flag("black_start", false);
    g.cranking_power = r.has("crank") ? r.number("crank") : (g.black_start ? 0.0 : kDefaultCrankingFraction * g.p_max);
    g.startup_hot_minutes = r.number("hot", 0.0);
    g.startup_cold_minutes = r.number("cold", 0.0);
    g.hot_window_minutes = r.number("hot_window", 0.0);
    unit_row[g.id.value] = generators.size();
    generators.push_back(std::move(g));
  }

  auto unit_for = [&](const RowReader& r) -> GeneratorUnit& {
    const int id = r.integer("unit");
    const auto it = unit_row.find(id);
    if (it == unit_row.end()) throw ValidationError("line " + std::to_string(r.line()) + ": unknown generator " + std::to_string(id));
    return generators[it->second];
  };

  for (const RowReader& r : rows_of(sections, "chp_regions")) {
    r.allow_only({"unit", "heat", "vertices"});
    GeneratorUnit& g = unit_for(r);
    if (g.chp_region) throw ParseError(r.line(), "second CHP region for one unit");
    ChpRegion region;  // P:H pairs separated by commas
    const std::string vertex_text = r.text("vertices");
    std::string_view rest = vertex_text;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) throw ParseError(r.line(), "CHP vertex must be P:H, got '" + std::string(item) + "'");
      region.vertices.emplace_back(r.parse_number("vertices", item.substr(0, colon)),
                                   r.parse_number("vertices", item.substr(colon + 1)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    g.chp_region = std::move(region);
    g.chp_heat_mw = r.number("heat", 0.0);
  }

  for (const RowReader& r : rows_of(sections, "wind_profiles")) {
    r.allow_only({"unit", "path", "samples", "resolution"});
    GeneratorUnit& g = unit_for(r);
    if (g.wind_profile) throw ParseError(r.line(), "second wind profile for one unit");
    if (r.has("path") == r.has("samples")) throw ParseError(r.line(), "wind profile needs exactly one of path or samples");
    WindProfile profile;
    if (r.has("path")) {
      std::filesystem::path p = r.text("path");
      if (p.is_relative()) p = base_dir / p;
      profile = read_wind_profile(p);
      if (r.has("resolution")) profile.resolution_minutes = r.integer("resolution");
    } else {
      profile.samples = r.numbers("samples");
      profile.resolution_minutes = r.has("resolution") ? r.integer("resolution") : 5;
    }
    g.wind_profile = std::move(profile);
  }

  // Load frequency coefficients are drawn for every load in order (two draws
  // each) so an explicit value never shifts another load's draw.
  std::vector<LoadPoint> loads;
  std::uint64_t rng = c.planner.seed;
  for (const RowReader& r : rows_of(sections, "loads")) {
    r.allow_only({"id", "bus", "p", "q", "alpha", "k_lp", "k_lq"});
    LoadPoint l;
    l.id = LoadId{r.integer("id")};
    l.bus = BusId{r.integer("bus")};
    l.p = r.number("p");
    l.q = r.number("q", 0.0);
    l.alpha = r.number("alpha");
    const double u_p = unit_uniform(rng);
    const double u_q = unit_uniform(rng);
    l.k_lp = r.has("k_lp") ? r.number("k_lp") : l.p * (0.01 + 0.01 * u_p);
    l.k_lq = r.has("k_lq") ? r.number("k_lq") : std::abs(l.q) * (0.01 + 0.01 * u_q);
    loads.push_back(l);
  }

  if (!(c.planner.omega >= 0 && c.planner.omega <= 1)) throw ValidationError("planner omega outside [0, 1]");
  if (!(c.planner.fluctuation >= 0 && c.planner.fluctuation <= 1))
    throw ValidationError("planner fluctuation outside [0, 1]");
  if (!(c.planner.switch_minutes >= 0)) throw ValidationError("planner switch_minutes negative");

  try {
    c.grid = Grid(std::move(buses), std::move(lines), std::move(generators), std::move(loads), base_mva);
    check_connected(c.grid);
  } catch (const InvalidModel& e) {
    throw ValidationError(e.what());
  }
  return c;
}

CaseFile parse_case_file(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot read case file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_case(text.str(), path.parent_path(), seed);
}

std::string to_canonical_text(const CaseFile& c) {
  const Grid& g = c.grid;
  std::ostringstream out;
  auto row = [&out](std::map<std::string, std::string> fields) {
    bool first = true;
    for (const auto& [k, v] : fields) {
      out << (first ? "" : " ") << k << '=' << v;
      first = false;
    }
    out << '\n';
  };
  auto num = format_number;
  auto boolean = [](bool b) { return std::string(b ? "1" : "0"); };

  out << "[system]\n";
  out << "base_mva = " << num(g.base_mva()) << '\n';
  if (!c.name.empty()) out << "name = " << c.name << '\n';

  out << "\n[buses]\n";
  for (const Bus& b : g.buses()) row({{"id", std::to_string(b.id.value)}, {"v", num(b.nominal_voltage)}});

  out << "\n[lines]\n";
  for (const Line& l : g.lines())
    row({{"from", std::to_string(l.from_bus.value)},
         {"to", std::to_string(l.to_bus.value)},
         {"r", num(l.resistance)},
         {"x", num(l.reactance)},
         {"b", num(l.shunt_susceptance)},
         {"in_service", boolean(l.in_service)}});

  out << "\n[generators]\n";
  for (const GeneratorUnit& u : g.generators()) {
    std::map<std::string, std::string> f{{"id", std::to_string(u.id.value)},
                                         {"bus", std::to_string(u.bus.value)},
                                         {"kind", std::string(to_string(u.kind))},
                                         {"p_min", num(u.p_min)},
                                         {"p_max", num(u.p_max)},
                                         {"q_min", num(u.q_min)},
                                         {"q_max", num(u.q_max)},
                                         {"droop", num(u.droop_k)},
                                         {"black_start", boolean(u.black_start)},
                                         {"crank", num(u.cranking_power)},
                                         {"hot", num(u.startup_hot_minutes)},
                                         {"cold", num(u.startup_cold_minutes)},
                                         {"hot_window", num(u.hot_window_minutes)}};
    if (!u.name.empty()) f["name"] = u.name;
    row(std::move(f));
  }

  out << "\n[chp_regions]\n";
  for (const GeneratorUnit& u : g.generators()) {
    if (!u.chp_region) continue;
    std::string vertices;
    for (const auto& v : u.chp_region->vertices)
      vertices += (vertices.empty() ? "" : ",") + num(v.x()) + ":" + num(v.y());
    row({{"unit", std::to_string(u.id.value)}, {"heat", num(u.chp_heat_mw)}, {"vertices", vertices}});
  }

  out << "\n[wind_profiles]\n";
  for (const GeneratorUnit& u : g.generators()) {
    if (!u.wind_profile) continue;
    std::string samples;
    for (double s : u.wind_profile->samples) samples += (samples.empty() ? "" : ",") + num(s);
    row({{"unit", std::to_string(u.id.value)},
         {"resolution", std::to_string(u.wind_profile->resolution_minutes)},
         {"samples", samples}});
  }

  out << "\n[loads]\n";
  for (const LoadPoint& l : g.loads())
    row({{"id", std::to_string(l.id.value)},
         {"bus", std::to_string(l.bus.value)},
         {"p", num(l.p)},
         {"q", num(l.q)},
         {"alpha", num(l.alpha)},
         {"k_lp", num(l.k_lp)},
         {"k_lq", num(l.k_lq)}});

  out << "\n[planner]\n";
  out << "fluctuation = " << num(c.planner.fluctuation) << '\n';
  out << "omega = " << num(c.planner.omega) << '\n';
  out << "rank_per_mw = " << boolean(c.planner.rank_per_mw) << '\n';
  out << "seed = " << c.planner.seed << '\n';
  out << "switch_minutes = " << num(c.planner.switch_minutes) << '\n';
  return out.str();
}

}  // namespace gridrestore
