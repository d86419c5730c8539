#include "fbvar/identification.hpp"

#include "fbvar/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fbvar {

char restriction_symbol(Restriction r) {
  switch (r) {
    case Restriction::Free: return '.';
    case Restriction::Pos: return '+';
    case Restriction::Neg: return '-';
    case Restriction::Zero: return '0';
  }
  return '?';
}

bool RestrictionScheme::row_restricted(std::size_t row) const {
  for (auto r : grid[row])
    if (r != Restriction::Free) return true;
  return false;
}

std::string RestrictionScheme::pattern(std::size_t row) const {
  std::string out;
  for (std::size_t j = 0; j < grid[row].size(); ++j) {
    if (j) out += ' ';
    out += restriction_symbol(grid[row][j]);
  }
  return out;
}

RestrictionScheme default_scheme(int m, int n_core, int n_other, int r,
                                 const std::optional<std::vector<std::string>>& row_labels) {
  if (m != 2 || n_core != 7)
    throw ValidationError("default scheme needs 2 instruments and 7 core variables (got " + std::to_string(m) +
                          ", " + std::to_string(n_core) + ")");
  if (r < 2) throw ValidationError("default scheme needs at least the Target and Path shocks (r >= 2)");
  if (n_other < 0) throw ValidationError("negative OTHER count");

  using R = Restriction;
  constexpr R P = R::Pos, N = R::Neg, Z = R::Zero, F = R::Free;
  // Target and Path columns for Target, Path, RGDP, PCE, FFR, GS1, GS10, M2REAL, SP500.
  const std::vector<std::pair<R, R>> identified{
      {P, Z}, {Z, P}, {N, F}, {N, Z}, {P, Z}, {P, F}, {Z, P}, {N, F}, {N, F},
  };

  RestrictionScheme s;
  s.shock_labels = {"Target", "Path"};
  for (int k = 1; k <= r - 2; ++k) s.shock_labels.push_back("Residual" + std::to_string(k));
  s.row_labels = {"Target", "Path"};
  s.row_labels.insert(s.row_labels.end(), kTable2CoreRows.begin(), kTable2CoreRows.end());
  for (int k = 1; k <= n_other; ++k) s.row_labels.push_back("OTHER" + std::to_string(k));

  for (std::size_t i = 0; i < s.row_labels.size(); ++i) {
    std::vector<R> row(r, F);
    if (i < identified.size()) {
      row[0] = identified[i].first;
      row[1] = identified[i].second;
      if (i < 2)
        for (int j = 2; j < r; ++j) row[j] = Z;
    }
    s.grid.push_back(std::move(row));
    s.tv_mask.push_back(i >= identified.size());
  }
  if (row_labels) {
    if (row_labels->size() != s.row_labels.size())
      throw ValidationError("default scheme: " + std::to_string(row_labels->size()) + " labels for " +
                            std::to_string(s.row_labels.size()) + " rows");
    s.row_labels = *row_labels;
  }
  return s;
}

RestrictionScheme instrument_scheme(int m, int n_core, int n_other, int r) {
  if (m < 0 || n_core < 0 || n_other < 0) throw ValidationError("negative block size");
  if (r < std::max(m, 1)) throw ValidationError("instrument scheme needs r >= max(m, 1)");
  RestrictionScheme s;
  for (int j = 0; j < r; ++j) s.shock_labels.push_back(j < m ? "Shock" + std::to_string(j + 1) : "Residual" + std::to_string(j - m + 1));
  for (int i = 0; i < m + n_core + n_other; ++i) {
    std::vector<Restriction> row(r, Restriction::Free);
    if (i < m)
      for (int j = 0; j < r; ++j) row[j] = j == i ? Restriction::Pos : Restriction::Zero;
    s.grid.push_back(std::move(row));
    s.tv_mask.push_back(i >= m + n_core);
    s.row_labels.push_back(i < m ? "Z" + std::to_string(i + 1)
                                 : (i < m + n_core ? "CORE" + std::to_string(i - m + 1) : "OTHER" + std::to_string(i - m - n_core + 1)));
  }
  return s;
}

RestrictionScheme parse_scheme(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("restriction config is not valid JSON: ") + e.what());
  }
  RestrictionScheme s;
  try {
    s.shock_labels = j.at("shocks").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
      const auto name = row.at("name").get<std::string>();
      const auto pattern = row.at("pattern").get<std::string>();
      std::vector<Restriction> cells;
      std::size_t col = 0;
      for (char ch : pattern) {
        if (ch == ' ' || ch == '\t' || ch == ',') continue;
        ++col;
        switch (ch) {
          case '+': cells.push_back(Restriction::Pos); break;
          case '-': cells.push_back(Restriction::Neg); break;
          case '0': cells.push_back(Restriction::Zero); break;
          case '.': cells.push_back(Restriction::Free); break;
          default:
            throw ValidationError("restriction parse error: row '" + name + "', shock " + std::to_string(col) +
                                  ": unknown symbol \"" + std::string(1, ch) + "\"");
        }
      }
      if (cells.size() != s.shock_labels.size())
        throw ValidationError("restriction dimension error: row '" + name + "' has " + std::to_string(cells.size()) +
                              " entries for " + std::to_string(s.shock_labels.size()) + " shocks");
      s.row_labels.push_back(name);
      s.grid.push_back(std::move(cells));
      s.tv_mask.push_back(row.value("tv", false));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("restriction config malformed: ") + e.what());
  }
  return s;
}

RestrictionScheme load_scheme(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scheme(ss.str());
}

std::string scheme_to_json(const RestrictionScheme& scheme) {
  nlohmann::json j;
  j["shocks"] = scheme.shock_labels;
  j["rows"] = nlohmann::json::array();
  for (std::size_t i = 0; i < scheme.rows(); ++i)
    j["rows"].push_back({{"name", scheme.row_labels[i]}, {"pattern", scheme.pattern(i)}, {"tv", bool(scheme.tv_mask[i])}});
  return j.dump(2);
}

std::vector<std::string> validate(const RestrictionScheme& scheme, int m, int n, int r) {
  std::vector<std::string> v;
  if (m < 0 || n < 0 || r < 1) v.push_back("dimensions must satisfy m >= 0, n >= 0, r >= 1");
  if (r < m) v.push_back("r = " + std::to_string(r) + " is smaller than the instrument count " + std::to_string(m));
  if (static_cast<int>(scheme.rows()) != m + n)
    v.push_back("scheme has " + std::to_string(scheme.rows()) + " rows, expected m + n = " + std::to_string(m + n));
  if (static_cast<int>(scheme.shocks()) != r)
    v.push_back("scheme has " + std::to_string(scheme.shocks()) + " shocks, expected r = " + std::to_string(r));
  if (scheme.row_labels.size() != scheme.rows() || scheme.tv_mask.size() != scheme.rows())
    v.push_back("row labels / tv mask length differ from grid rows");
  if (!v.empty()) return v;

  for (std::size_t i = 0; i < scheme.rows(); ++i) {
    const auto& label = scheme.row_labels[i];
    if (scheme.grid[i].size() != scheme.shocks()) {
      v.push_back("row " + label + ": wrong number of entries");
      continue;
    }
    if (static_cast<int>(i) < m) {
      for (std::size_t j = 0; j < scheme.shocks(); ++j) {
        const auto cell = scheme.grid[i][j];
        if (j == i && cell != Restriction::Pos)
          v.push_back("instrument row " + label + ": diagonal entry (shock " + scheme.shock_labels[j] +
                      ") must be POS");
        if (j != i && cell != Restriction::Zero)
          v.push_back("instrument row " + label + ", shock " + scheme.shock_labels[j] +
                      ": instrument off-diagonal must be ZERO");
      }
      if (scheme.tv_mask[i]) v.push_back("instrument row " + label + ": tv_mask must be false");
    } else if (scheme.tv_mask[i] && scheme.row_restricted(i)) {
      v.push_back("row " + label + ": tv_mask true on a restricted row");
    }
  }
  return v;
}

void check_rows_match(const RestrictionScheme& scheme, const std::vector<std::string>& mnemonics) {
  std::string problems;
  const auto n = std::max(scheme.rows(), mnemonics.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string a = i < scheme.rows() ? scheme.row_labels[i] : "<none>";
    const std::string b = i < mnemonics.size() ? mnemonics[i] : "<none>";
    if (a != b) problems += " [row " + std::to_string(i + 1) + ": scheme " + a + " vs data " + b + "]";
  }
  if (!problems.empty()) throw ValidationError("scheme/data row mismatch:" + problems);
}

bool satisfies(const RestrictionScheme& scheme, const Eigen::MatrixXd& loadings) {
  for (std::size_t i = 0; i < scheme.rows(); ++i)
    for (std::size_t j = 0; j < scheme.shocks(); ++j) {
      const double x = loadings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      switch (scheme.grid[i][j]) {
        case Restriction::Pos:
          if (!(x > 0.0)) return false;
          break;
        case Restriction::Neg:
          if (!(x < 0.0)) return false;
          break;
        case Restriction::Zero:
          if (x != 0.0) return false;
          break;
        case Restriction::Free: break;
      }
    }
  return true;
}

}  // namespace fbvar
