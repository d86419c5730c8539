#include "fbvar/data.hpp"

#include "fbvar/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace fbvar {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------- Month

Month Month::parse(std::string_view text) {
  text = trim(text);
  int year = 0, month = 0;
  if (text.size() != 7 || text[4] != '-')
    throw ValidationError("bad date '" + std::string(text) + "', expected YYYY-MM");
  auto r1 = std::from_chars(text.data(), text.data() + 4, year);
  auto r2 = std::from_chars(text.data() + 5, text.data() + 7, month);
  if (r1.ec != std::errc() || r1.ptr != text.data() + 4 || r2.ec != std::errc() ||
      r2.ptr != text.data() + 7)
    throw ValidationError("bad date '" + std::string(text) + "', expected YYYY-MM");
  if (month < 1 || month > 12)
    throw ValidationError("bad date '" + std::string(text) + "': month out of range");
  return Month(year, month);
}

std::string Month::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year(), month());
  return buf;
}

// ---------------------------------------------------------------- schema

Role parse_role(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
  if (t == "INSTRUMENT") return Role::Instrument;
  if (t == "CORE") return Role::Core;
  if (t == "OTHER") return Role::Other;
  throw ValidationError("unknown role '" + std::string(text) + "'");
}

std::string_view role_name(Role role) {
  switch (role) {
    case Role::Instrument: return "INSTRUMENT";
    case Role::Core: return "CORE";
    case Role::Other: return "OTHER";
  }
  return "?";
}

bool valid_tcode(int tcode) {
  return tcode == 1 || tcode == 2 || tcode == 4 || tcode == 5 || tcode == 7;
}

int tcode_lag(int tcode) {
  switch (tcode) {
    case 1:
    case 4: return 0;
    case 2:
    case 5: return 1;
    case 7: return 12;
  }
  throw ValidationError("invalid tcode " + std::to_string(tcode));
}

std::vector<VariableMeta> parse_schema(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ValidationError("schema must be a JSON array");
  std::vector<VariableMeta> out;
  std::set<std::string> seen;
  for (const auto& item : j) {
    VariableMeta v;
    try {
      v.mnemonic = item.at("mnemonic").get<std::string>();
      v.role = parse_role(item.at("role").get<std::string>());
      v.tcode = item.at("tcode").get<int>();
      v.description = item.value("description", "");
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("schema entry malformed: ") + e.what());
    }
    if (!valid_tcode(v.tcode))
      throw ValidationError("variable " + v.mnemonic + ": tcode " + std::to_string(v.tcode) +
                            " not in {1,2,4,5,7}");
    if (!seen.insert(v.mnemonic).second)
      throw ValidationError("duplicate mnemonic " + v.mnemonic + " in schema");
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<VariableMeta> load_schema(const std::string& path) { return parse_schema(read_file(path)); }

void write_schema(const std::string& path, const std::vector<VariableMeta>& schema) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : schema)
    j.push_back({{"mnemonic", v.mnemonic},
                 {"role", std::string(role_name(v.role))},
                 {"tcode", v.tcode},
                 {"description", v.description}});
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- CSV

bool RawSeries::contiguous() const {
  for (std::size_t i = 1; i < dates.size(); ++i)
    if (dates[i] - dates[i - 1] != 1) return false;
  return true;
}

RawCollection parse_csv(std::string_view text, const std::vector<VariableMeta>& schema) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto pos = text.find('\n', start);
      auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
      if (!trim(line).empty()) lines.push_back(line);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  }
  if (lines.empty()) throw ValidationError("CSV is empty");
  // UTF-8 byte order mark
  if (lines[0].substr(0, 3) == "\xEF\xBB\xBF") lines[0].remove_prefix(3);

  auto header = split(lines[0], ',');
  if (header.empty() || header[0] != "date")
    throw ValidationError("CSV first column header must be 'date'");

  std::vector<int> column_of(schema.size(), -1);
  for (std::size_t v = 0; v < schema.size(); ++v) {
    for (std::size_t c = 1; c < header.size(); ++c)
      if (header[c] == schema[v].mnemonic) column_of[v] = static_cast<int>(c);
    if (column_of[v] < 0) throw ValidationError("schema error: column '" + schema[v].mnemonic + "' missing from CSV");
  }

  std::vector<std::pair<Month, std::vector<std::string_view>>> rows;
  std::set<Month> seen;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto cells = split(lines[r], ',');
    const std::string where = "row " + std::to_string(r + 1);
    Month date;
    try {
      date = Month::parse(cells[0]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ", column 1: " + e.what());
    }
    if (!seen.insert(date).second) throw ValidationError(where + ": duplicate date " + date.str());
    if (cells.size() > header.size())
      throw ValidationError(where + ": " + std::to_string(cells.size()) + " cells but " +
                            std::to_string(header.size()) + " header columns");
    rows.emplace_back(date, std::move(cells));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  RawCollection out;
  for (std::size_t v = 0; v < schema.size(); ++v) {
    RawSeries s;
    const auto c = static_cast<std::size_t>(column_of[v]);
    for (const auto& [date, cells] : rows) {
      if (c >= cells.size() || cells[c].empty()) continue;
      std::string_view cell = cells[c];
      double value = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(value))
        throw ValidationError("unparseable cell '" + std::string(cell) + "' at date " + date.str() +
                              ", column " + std::to_string(c + 1) + " (" + schema[v].mnemonic + ")");
      s.dates.push_back(date);
      s.values.push_back(value);
    }
    out.emplace(schema[v].mnemonic, std::move(s));
  }
  return out;
}

RawCollection load_csv(const std::string& path, const std::vector<VariableMeta>& schema) {
  return parse_csv(read_file(path), schema);
}

void write_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "date";
  for (const auto& v : ds.meta) out << ',' << v.mnemonic;
  out << '\n';
  char buf[64];
  for (Eigen::Index t = 0; t < ds.rows(); ++t) {
    out << ds.dates[t].str();
    for (Eigen::Index c = 0; c < ds.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.values(t, c));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

// ---------------------------------------------------------------- transforms

RawSeries apply_tcode(const RawSeries& series, int tcode) {
  const int lag = tcode_lag(tcode);
  if (series.size() <= static_cast<std::size_t>(lag))
    throw ValidationError("series of length " + std::to_string(series.size()) + " too short for tcode " +
                          std::to_string(tcode));
  if (lag > 0 && !series.contiguous())
    throw ValidationError("tcode " + std::to_string(tcode) + " needs a gap-free series");
  if (tcode == 4 || tcode == 5 || tcode == 7) {
    for (std::size_t i = 0; i < series.size(); ++i)
      if (!(series.values[i] > 0.0))
        throw ValidationError("nonpositive value under log transform at " + series.dates[i].str());
  }
  RawSeries out;
  const auto n = series.size();
  for (std::size_t i = static_cast<std::size_t>(lag); i < n; ++i) {
    const double x = series.values[i];
    double y = 0.0;
    switch (tcode) {
      case 1: y = x; break;
      case 2: y = x - series.values[i - 1]; break;
      case 4: y = 100.0 * std::log(x); break;
      case 5: y = 100.0 * (std::log(x) - std::log(series.values[i - 1])); break;
      case 7: y = 100.0 * (std::log(x) - std::log(series.values[i - 12])); break;
    }
    out.dates.push_back(series.dates[i]);
    out.values.push_back(y);
  }
  return out;
}

// ---------------------------------------------------------------- assembly

int Dataset::num_instruments() const {
  return static_cast<int>(std::count_if(meta.begin(), meta.end(),
                                        [](const VariableMeta& v) { return v.role == Role::Instrument; }));
}

std::vector<std::string> Dataset::mnemonics() const {
  std::vector<std::string> out;
  for (const auto& v : meta) out.push_back(v.mnemonic);
  return out;
}

Dataset assemble(const RawCollection& raw, const std::vector<VariableMeta>& schema, const SampleRange& sample) {
  std::vector<VariableMeta> ordered;
  for (Role role : {Role::Instrument, Role::Core, Role::Other})
    for (const auto& v : schema)
      if (v.role == role) ordered.push_back(v);

  std::vector<RawSeries> transformed;
  for (const auto& v : ordered) {
    auto it = raw.find(v.mnemonic);
    if (it == raw.end()) throw ValidationError("no raw series for " + v.mnemonic);
    if (it->second.size() == 0) {
      if (v.role == Role::Instrument) {
        transformed.emplace_back();
        continue;
      }
      throw ValidationError("series " + v.mnemonic + " has no observations");
    }
    transformed.push_back(apply_tcode(it->second, v.tcode));
  }

  // Default sample: intersection of the transformed macro spans.
  std::optional<Month> lo, hi;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (ordered[i].role == Role::Instrument) continue;
    const auto& s = transformed[i];
    if (!lo || s.dates.front() > *lo) lo = s.dates.front();
    if (!hi || s.dates.back() < *hi) hi = s.dates.back();
  }
  Month start = sample.start ? *sample.start : (lo ? *lo : Month());
  Month end = sample.end ? *sample.end : (hi ? *hi : Month());
  if (!sample.start && !lo) throw ValidationError("sample start required when there are no macro series");
  if (end < start) throw ValidationError("empty sample " + start.str() + " .. " + end.str());

  const int T = end - start + 1;
  Dataset ds;
  ds.values.resize(T, static_cast<Eigen::Index>(ordered.size()));
  for (int t = 0; t < T; ++t) ds.dates.push_back(start + t);
  ds.meta = ordered;

  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& s = transformed[i];
    const auto col = static_cast<Eigen::Index>(i);
    if (ordered[i].role == Role::Instrument) {
      ds.values.col(col).setZero();
      int present = 0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        const int t = s.dates[k] - start;
        if (t < 0 || t >= T) continue;
        ds.values(t, col) = s.values[k];
        ++present;
      }
      ds.zero_filled.push_back(T - present);
      continue;
    }
    // Macro series must cover every sample month.
    std::vector<char> have(T, 0);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const int t = s.dates[k] - start;
      if (t < 0 || t >= T) continue;
      ds.values(t, col) = s.values[k];
      have[t] = 1;
    }
    for (int t = 0; t < T; ++t) {
      if (have[t]) continue;
      int u = t;
      while (u + 1 < T && !have[u + 1]) ++u;
      throw ValidationError("coverage error: " + ordered[i].mnemonic + " missing " + (start + t).str() +
                            " .. " + (start + u).str() + " after tcode " + std::to_string(ordered[i].tcode));
    }
  }
  return ds;
}

Dataset standardize(const Dataset& ds) {
  const auto T = ds.rows();
  if (T < 2) throw ValidationError("standardize needs at least 2 observations");
  Dataset out = ds;
  std::vector<Scaling> scaling;
  for (Eigen::Index c = 0; c < ds.cols(); ++c) {
    const double mean = ds.values.col(c).mean();
    const double var = (ds.values.col(c).array() - mean).square().sum() / static_cast<double>(T - 1);
    if (!(var > 0.0)) throw ValidationError("zero-variance column " + ds.meta[c].mnemonic);
    const double sd = std::sqrt(var);
    out.values.col(c) = (ds.values.col(c).array() - mean) / sd;
    // A large offset cannot be stored finely enough in `mean`; recentre the scaled column.
    out.values.col(c).array() -= out.values.col(c).mean();
    scaling.push_back({mean, sd});
  }
  out.scaling = std::move(scaling);
  return out;
}

Dataset unstandardize(const Dataset& ds) {
  if (!ds.scaling) return ds;
  Dataset out = ds;
  for (Eigen::Index c = 0; c < ds.cols(); ++c) {
    const auto& s = (*ds.scaling)[c];
    out.values.col(c) = ds.values.col(c).array() * s.sd + s.mean;
  }
  out.scaling.reset();
  return out;
}

}  // namespace fbvar
