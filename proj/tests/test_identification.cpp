#include "fbvar/error.hpp"
#include "fbvar/identification.hpp"

#include <doctest.h>

#include <algorithm>

using namespace fbvar;
using R = Restriction;

namespace {

std::size_t row_of(const RestrictionScheme& s, const std::string& label) {
  return static_cast<std::size_t>(std::find(s.row_labels.begin(), s.row_labels.end(), label) - s.row_labels.begin());
}

bool mentions(const std::vector<std::string>& problems, const std::string& text) {
  return std::any_of(problems.begin(), problems.end(), [&](const std::string& p) { return p.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("default scheme reproduces the published grid") {
  const auto s = default_scheme(2, 7, 3, 4);
  REQUIRE(s.rows() == 12);
  REQUIRE(s.shocks() == 4);
  CHECK(s.shock_labels == std::vector<std::string>{"Target", "Path", "Residual1", "Residual2"});

  const std::vector<std::pair<std::string, std::pair<R, R>>> expect{
      {"Target", {R::Pos, R::Zero}}, {"Path", {R::Zero, R::Pos}},  {"RGDP", {R::Neg, R::Free}},
      {"PCE", {R::Neg, R::Zero}},    {"FFR", {R::Pos, R::Zero}},   {"GS1", {R::Pos, R::Free}},
      {"GS10", {R::Zero, R::Pos}},   {"M2REAL", {R::Neg, R::Free}}, {"SP500", {R::Neg, R::Free}},
  };
  for (const auto& [label, cells] : expect) {
    const auto i = row_of(s, label);
    REQUIRE(i < s.rows());
    INFO(label);
    CHECK(s.at(i, 0) == cells.first);
    CHECK(s.at(i, 1) == cells.second);
    CHECK_FALSE(s.tv_mask[i]);
  }
  CHECK(s.at(row_of(s, "RGDP"), 0) == R::Neg);
  CHECK(s.at(row_of(s, "GS10"), 1) == R::Pos);
  for (std::size_t j = 2; j < 4; ++j) {
    CHECK(s.at(0, j) == R::Zero);
    CHECK(s.at(1, j) == R::Zero);
    for (std::size_t i = 2; i < 9; ++i) CHECK(s.at(i, j) == R::Free);
  }
  for (std::size_t i = 9; i < 12; ++i) {
    CHECK(s.tv_mask[i]);
    for (std::size_t j = 0; j < 4; ++j) CHECK(s.at(i, j) == R::Free);
  }
}

TEST_CASE("default scheme is idempotent and valid") {
  const auto a = default_scheme(2, 7, 5, 3);
  const auto b = default_scheme(2, 7, 5, 3);
  CHECK(a.grid == b.grid);
  CHECK(a.tv_mask == b.tv_mask);
  CHECK(a.row_labels == b.row_labels);
  CHECK(validate(a, 2, 12, 3).empty());
  CHECK(validate(default_scheme(2, 7, 0, 2), 2, 7, 2).empty());
  CHECK_THROWS_AS(default_scheme(3, 7, 0, 4), ValidationError);
  CHECK_THROWS_AS(default_scheme(2, 6, 0, 4), ValidationError);
  CHECK_THROWS_AS(default_scheme(2, 7, 0, 1), ValidationError);
}

TEST_CASE("default scheme with custom labels") {
  std::vector<std::string> labels{"FF4", "ED8", "a", "b", "c", "d", "e", "f", "g", "x"};
  const auto s = default_scheme(2, 7, 1, 3, labels);
  CHECK(s.row_labels == labels);
  CHECK(s.at(2, 0) == R::Neg);
  CHECK_THROWS_AS(default_scheme(2, 7, 2, 3, labels), ValidationError);
}

TEST_CASE("instrument scheme") {
  const auto s = instrument_scheme(1, 3, 2, 2);
  CHECK(validate(s, 1, 5, 2).empty());
  CHECK(s.at(0, 0) == R::Pos);
  CHECK(s.at(0, 1) == R::Zero);
  CHECK(s.at(2, 1) == R::Free);
  CHECK(s.tv_mask == std::vector<bool>{false, false, false, false, true, true});
  CHECK(validate(instrument_scheme(0, 4, 0, 4), 0, 4, 4).empty());
  CHECK_THROWS_AS(instrument_scheme(3, 3, 0, 2), ValidationError);
}

TEST_CASE("scheme parsing") {
  const auto s = parse_scheme(R"({"shocks": ["Target", "Path", "R1", "R2"],
    "rows": [{"name": "Target", "pattern": "+ 0 0 0"},
             {"name": "RGDP", "pattern": "- . . ."},
             {"name": "CPI", "pattern": ". . . .", "tv": true}]})");
  REQUIRE(s.rows() == 3);
  CHECK(s.grid[0] == std::vector<R>{R::Pos, R::Zero, R::Zero, R::Zero});
  CHECK(s.grid[1] == std::vector<R>{R::Neg, R::Free, R::Free, R::Free});
  CHECK(s.tv_mask == std::vector<bool>{false, false, true});
  CHECK(s.row_labels[1] == "RGDP");
  CHECK(s.pattern(1) == "- . . .");

  try {
    parse_scheme(R"({"shocks": ["a","b","c","d"], "rows": [{"name": "PCE", "pattern": "? . . ."}]})");
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("PCE") != std::string::npos);
    CHECK(msg.find("\"?\"") != std::string::npos);
    CHECK(msg.find("shock 1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scheme(R"({"shocks": ["a","b"], "rows": [{"name": "X", "pattern": "+ 0 0"}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_scheme("not json"), ValidationError);
  CHECK_THROWS_AS(parse_scheme(R"({"rows": []})"), ValidationError);
}

TEST_CASE("scheme JSON round trip") {
  const auto s = default_scheme(2, 7, 2, 4);
  const auto back = parse_scheme(scheme_to_json(s));
  CHECK(back.grid == s.grid);
  CHECK(back.tv_mask == s.tv_mask);
  CHECK(back.row_labels == s.row_labels);
  CHECK(back.shock_labels == s.shock_labels);
}

TEST_CASE("validation reports every violation") {
  auto s = default_scheme(2, 7, 1, 3);
  SUBCASE("instrument off-diagonal") {
    s.grid[0][1] = R::Pos;
    const auto v = validate(s, 2, 8, 3);
    CHECK(mentions(v, "instrument off-diagonal must be ZERO"));
  }
  SUBCASE("tv on a sign-restricted row") {
    s.tv_mask[row_of(s, "PCE")] = true;
    const auto v = validate(s, 2, 8, 3);
    REQUIRE(v.size() == 1);
    CHECK(mentions(v, "PCE"));
  }
  SUBCASE("several at once") {
    s.grid[1][1] = R::Neg;
    s.grid[0][2] = R::Free;
    s.tv_mask[0] = true;
    s.tv_mask[row_of(s, "RGDP")] = true;
    const auto v = validate(s, 2, 8, 3);
    CHECK(v.size() == 4);
    CHECK(mentions(v, "must be POS"));
    CHECK(mentions(v, "tv_mask must be false"));
    CHECK(mentions(v, "RGDP"));
  }
  SUBCASE("dimension mismatch") {
    CHECK_FALSE(validate(s, 2, 9, 3).empty());
    CHECK_FALSE(validate(s, 2, 8, 4).empty());
    CHECK(mentions(validate(s, 4, 6, 3), "smaller than the instrument count"));
  }
}

TEST_CASE("row matching names the mismatched rows") {
  const auto s = default_scheme(2, 7, 1, 3);
  auto names = s.row_labels;
  CHECK_NOTHROW(check_rows_match(s, names));
  names[4] = "CPI";
  try {
    check_rows_match(s, names);
    FAIL("expected mismatch");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("FFR") != std::string::npos);
    CHECK(msg.find("CPI") != std::string::npos);
  }
  names.pop_back();
  CHECK_THROWS_AS(check_rows_match(s, names), ValidationError);
}

TEST_CASE("grid satisfaction") {
  const auto s = parse_scheme(R"({"shocks": ["a","b"], "rows": [{"name": "x", "pattern": "+ 0"}, {"name": "y", "pattern": "- ."}]})");
  Eigen::MatrixXd L(2, 2);
  L << 0.1, 0.0, -2.0, 5.0;
  CHECK(satisfies(s, L));
  L(0, 1) = 1e-300;
  CHECK_FALSE(satisfies(s, L));
  L(0, 1) = -0.0;
  CHECK(satisfies(s, L));
  L(0, 0) = 0.0;
  CHECK_FALSE(satisfies(s, L));
  L(0, 0) = 1.0;
  L(1, 0) = 0.0;
  CHECK_FALSE(satisfies(s, L));
}
