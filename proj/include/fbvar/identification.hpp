#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fbvar {

enum class Restriction : unsigned char { Free, Pos, Neg, Zero };

char restriction_symbol(Restriction r);

/// Impact-loading constraints for the stacked [instruments; macro] x shocks grid.
struct RestrictionScheme {
  std::vector<std::string> row_labels;
  std::vector<std::string> shock_labels;
  std::vector<std::vector<Restriction>> grid;  // rows x shocks
  std::vector<bool> tv_mask;

  std::size_t rows() const { return grid.size(); }
  std::size_t shocks() const { return shock_labels.size(); }
  Restriction at(std::size_t row, std::size_t shock) const { return grid[row][shock]; }
  /// True when the row carries any POS/NEG/ZERO entry.
  bool row_restricted(std::size_t row) const;
  std::string pattern(std::size_t row) const;
};

inline const std::vector<std::string> kTable2CoreRows{"RGDP", "PCE", "FFR", "GS1", "GS10", "M2REAL", "SP500"};

/// The two-instrument, seven-core-variable scheme: Target and Path shocks on
/// the instruments and core block, r - 2 residual shocks, OTHER rows free and
/// time-varying. Row labels default to Target, Path, the core mnemonics above
/// and OTHER1..; pass `row_labels` to rename (order is kept).
RestrictionScheme default_scheme(int m, int n_core, int n_other, int r,
                                 const std::optional<std::vector<std::string>>& row_labels = std::nullopt);

/// Instrument block only: each instrument loads on its own shock (POS) and
/// nothing else; macro rows are free, OTHER rows time-varying.
RestrictionScheme instrument_scheme(int m, int n_core, int n_other, int r);

/// JSON: {"shocks": [...], "rows": [{"name": ..., "pattern": "+ 0 . -", "tv": false}, ...]}.
/// Symbols: + POS, - NEG, 0 ZERO, . FREE.
RestrictionScheme parse_scheme(std::string_view json_text);
RestrictionScheme load_scheme(const std::string& path);
std::string scheme_to_json(const RestrictionScheme& scheme);

/// Checks the grid against the instrument-block and time-variation conventions.
/// Returns every violation found; empty means valid.
std::vector<std::string> validate(const RestrictionScheme& scheme, int m, int n, int r);

/// Throws ValidationError naming the rows when the scheme labels do not match.
void check_rows_match(const RestrictionScheme& scheme, const std::vector<std::string>& mnemonics);

/// True when every entry of `loadings` (rows x shocks) obeys the grid; ZERO
/// must be exactly 0.0.
bool satisfies(const RestrictionScheme& scheme, const Eigen::MatrixXd& loadings);

}  // namespace fbvar
