#pragma once

#include <Eigen/Dense>

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fbvar {

/// Calendar month, ordered by its serial index.
class Month {
 public:
  constexpr Month() = default;
  constexpr Month(int year, int month) : serial_(year * 12 + (month - 1)) {}

  /// Parses "YYYY-MM". Throws ValidationError on anything else.
  static Month parse(std::string_view text);
  static constexpr Month from_serial(int serial) {
    Month m;
    m.serial_ = serial;
    return m;
  }

  constexpr int year() const { return serial_ / 12; }
  constexpr int month() const { return serial_ % 12 + 1; }
  constexpr int serial() const { return serial_; }
  std::string str() const;

  constexpr Month operator+(int months) const { return from_serial(serial_ + months); }
  constexpr Month operator-(int months) const { return from_serial(serial_ - months); }
  constexpr int operator-(Month other) const { return serial_ - other.serial_; }
  constexpr auto operator<=>(const Month&) const = default;

 private:
  int serial_ = 0;
};

enum class Role { Instrument, Core, Other };

Role parse_role(std::string_view text);
std::string_view role_name(Role role);

struct VariableMeta {
  std::string mnemonic;
  Role role = Role::Core;
  int tcode = 1;
  std::string description;
};

/// Reads a JSON array of {mnemonic, role, tcode, description}.
std::vector<VariableMeta> load_schema(const std::string& path);
std::vector<VariableMeta> parse_schema(std::string_view json_text);
void write_schema(const std::string& path, const std::vector<VariableMeta>& schema);

/// Observations of one variable. Months are strictly increasing but may have
/// gaps (empty CSV cells are simply absent).
struct RawSeries {
  std::vector<Month> dates;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool contiguous() const;
};

using RawCollection = std::map<std::string, RawSeries>;

RawCollection load_csv(const std::string& path, const std::vector<VariableMeta>& schema);
RawCollection parse_csv(std::string_view text, const std::vector<VariableMeta>& schema);

/// Observations lost at the start of a series under each stationarity code.
int tcode_lag(int tcode);
bool valid_tcode(int tcode);

/// 1 level, 2 first difference, 4 100*log, 5 100*dlog, 7 100*(log x_t - log x_{t-12}).
RawSeries apply_tcode(const RawSeries& series, int tcode);

struct Scaling {
  double mean = 0.0;
  double sd = 1.0;
};

struct Dataset {
  Eigen::MatrixXd values;  // T x (m+n), instrument block first
  std::vector<Month> dates;
  std::vector<VariableMeta> meta;
  std::optional<std::vector<Scaling>> scaling;
  // In-sample months absent from each instrument's raw series, in column order.
  std::vector<int> zero_filled;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  int num_instruments() const;
  std::vector<std::string> mnemonics() const;
};

struct SampleRange {
  std::optional<Month> start;
  std::optional<Month> end;
};

/// Transforms, orders columns by role, zero-fills instrument months and trims
/// to the sample. Without explicit bounds the sample is the longest span that
/// every macro series covers after transformation.
Dataset assemble(const RawCollection& raw, const std::vector<VariableMeta>& schema,
                 const SampleRange& sample = {});

/// (x - mean) / sd per column with the sample standard deviation (n - 1).
Dataset standardize(const Dataset& ds);
Dataset unstandardize(const Dataset& ds);

/// Writes values in the CSV layout load_csv reads (already-transformed values,
/// so pair it with a schema whose tcodes are 1 for a lossless round trip).
void write_csv(const std::string& path, const Dataset& ds);

}  // namespace fbvar
