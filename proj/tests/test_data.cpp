#include "fbvar/data.hpp"
#include "fbvar/error.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fbvar;

namespace {

std::vector<VariableMeta> schema_of(std::initializer_list<std::tuple<const char*, Role, int>> items) {
  std::vector<VariableMeta> out;
  for (const auto& [name, role, tcode] : items) out.push_back({name, role, tcode, ""});
  return out;
}

RawSeries monthly(Month start, const std::vector<double>& values) {
  RawSeries s;
  for (std::size_t i = 0; i < values.size(); ++i) s.dates.push_back(start + static_cast<int>(i));
  s.values = values;
  return s;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("month parsing and arithmetic") {
  const Month m = Month::parse("1995-03");
  CHECK(m.year() == 1995);
  CHECK(m.month() == 3);
  CHECK(m.str() == "1995-03");
  CHECK((m + 10).str() == "1996-01");
  CHECK((Month(1996, 1) - m) == 10);
  CHECK_THROWS_AS(Month::parse("2020-13"), ValidationError);
  CHECK_THROWS_AS(Month::parse("2020-00"), ValidationError);
  CHECK_THROWS_AS(Month::parse("2020/01"), ValidationError);
  CHECK_THROWS_AS(Month::parse("20-01"), ValidationError);
}

TEST_CASE("schema loading") {
  const auto schema = parse_schema(R"([{"mnemonic":"Target","role":"INSTRUMENT","tcode":1,"description":"surprise"},
                                       {"mnemonic":"RGDP","role":"CORE","tcode":5,"description":""}])");
  REQUIRE(schema.size() == 2);
  CHECK(schema[0].role == Role::Instrument);
  CHECK(schema[1].tcode == 5);
  CHECK(error_of([] { parse_schema(R"([{"mnemonic":"X","role":"CORE","tcode":3}])"); }).find("tcode 3") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_schema(R"([{"mnemonic":"X","role":"BOGUS","tcode":1}])"), ValidationError);
  CHECK_THROWS_AS(parse_schema(R"([{"mnemonic":"X","role":"CORE","tcode":1},{"mnemonic":"X","role":"CORE","tcode":1}])"),
                  ValidationError);

  const auto dir = testutil::scratch("schema");
  write_schema((dir / "s.json").string(), schema);
  const auto back = load_schema((dir / "s.json").string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].mnemonic == "Target");
  CHECK(back[1].role == Role::Core);
}

TEST_CASE("csv parsing") {
  const auto schema = schema_of({{"Target", Role::Instrument, 1}, {"RGDP", Role::Core, 1}});

  SUBCASE("three rows give two series of length three") {
    const auto raw = parse_csv("date,Target,RGDP\n2000-01,0.1,1.5\n2000-02,0.2,1.6\n2000-03,-0.3,1.7\n", schema);
    REQUIRE(raw.size() == 2);
    CHECK(raw.at("Target").size() == 3);
    CHECK(raw.at("RGDP").size() == 3);
    CHECK(raw.at("Target").values[2] == -0.3);
    CHECK(raw.at("RGDP").dates[0] == Month(2000, 1));
  }
  SUBCASE("missing declared column names it") {
    const auto with_path = schema_of({{"Target", Role::Instrument, 1}, {"Path", Role::Instrument, 1}});
    const auto msg = error_of([&] { parse_csv("date,Target\n2000-01,0.1\n", with_path); });
    CHECK(msg.find("Path") != std::string::npos);
  }
  SUBCASE("invalid month reports the row") {
    const auto msg = error_of([&] { parse_csv("date,Target,RGDP\n2020-12,0,1\n2020-13,0,1\n", schema); });
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("2020-13") != std::string::npos);
  }
  SUBCASE("strict numeric cells") {
    CHECK_THROWS_AS(parse_csv("date,Target,RGDP\n2000-01,0.1,1.5x\n", schema), ValidationError);
    CHECK_THROWS_AS(parse_csv("date,Target,RGDP\n2000-01,abc,1.5\n", schema), ValidationError);
    const auto msg = error_of([&] { parse_csv("date,Target,RGDP\n2000-01,0.1,1.5x\n", schema); });
    CHECK(msg.find("2000-01") != std::string::npos);
    CHECK(msg.find("column 3") != std::string::npos);
  }
  SUBCASE("duplicate dates rejected") {
    CHECK_THROWS_AS(parse_csv("date,Target,RGDP\n2000-01,0,1\n2000-01,0,2\n", schema), ValidationError);
  }
  SUBCASE("empty cells are gaps") {
    const auto raw = parse_csv("date,Target,RGDP\n2000-01,,1\n2000-02,0.5,2\n", schema);
    CHECK(raw.at("Target").size() == 1);
    CHECK(raw.at("Target").dates[0] == Month(2000, 2));
  }
  SUBCASE("column order follows the header") {
    const auto raw = parse_csv("date,RGDP,Target\n2000-01,7,0.25\n", schema);
    CHECK(raw.at("RGDP").values[0] == 7.0);
    CHECK(raw.at("Target").values[0] == 0.25);
  }
}

TEST_CASE("stationarity transforms") {
  CHECK(tcode_lag(1) == 0);
  CHECK(tcode_lag(2) == 1);
  CHECK(tcode_lag(4) == 0);
  CHECK(tcode_lag(5) == 1);
  CHECK(tcode_lag(7) == 12);
  CHECK_FALSE(valid_tcode(3));
  CHECK_FALSE(valid_tcode(6));

  SUBCASE("level is the identity") {
    const auto out = apply_tcode(monthly(Month(2000, 1), {3.0, 2.5, 4.0}), 1);
    CHECK(out.values == std::vector<double>{3.0, 2.5, 4.0});
  }
  SUBCASE("first difference") {
    const auto out = apply_tcode(monthly(Month(2000, 1), {3.0, 2.5, 4.0}), 2);
    CHECK(out.values == std::vector<double>{-0.5, 1.5});
    CHECK(out.dates.front() == Month(2000, 2));
  }
  SUBCASE("log growth of a constant is zero") {
    for (double c : {0.01, 1.0, 12345.0}) {
      const auto out = apply_tcode(monthly(Month(2000, 1), {c, c, c}), 5);
      CHECK(out.values == std::vector<double>{0.0, 0.0});
    }
  }
  SUBCASE("log level") {
    const auto out = apply_tcode(monthly(Month(2000, 1), {std::exp(1.0)}), 4);
    CHECK(out.values[0] == doctest::Approx(100.0).epsilon(1e-14));
  }
  SUBCASE("annual log growth of an exponential") {
    std::vector<double> x;
    for (int t = 0; t < 60; ++t) x.push_back(std::exp(0.01 * t));
    const auto out = apply_tcode(monthly(Month(2000, 1), x), 7);
    REQUIRE(out.size() == 48);
    CHECK(out.dates.front() == Month(2001, 1));
    for (double v : out.values) CHECK(v == doctest::Approx(12.0).epsilon(1e-12));
  }
  SUBCASE("domain and length errors") {
    const auto msg = error_of([] { apply_tcode(monthly(Month(2000, 1), {1.0, -1.0}), 5); });
    CHECK(msg.find("2000-02") != std::string::npos);
    CHECK_THROWS_AS(apply_tcode(monthly(Month(2000, 1), {1.0, 0.0}), 4), ValidationError);
    CHECK_THROWS_AS(apply_tcode(monthly(Month(2000, 1), std::vector<double>(12, 1.0)), 7), ValidationError);
    CHECK_THROWS_AS(apply_tcode(monthly(Month(2000, 1), {1.0}), 2), ValidationError);
    CHECK_THROWS_AS(apply_tcode(monthly(Month(2000, 1), {1.0, 2.0}), 3), ValidationError);
  }
}

TEST_CASE("transform output length property") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(13, 200);
  std::uniform_real_distribution<double> val(0.5, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = len(rng);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = val(rng);
    for (int tcode : {1, 2, 4, 5, 7}) {
      const auto out = apply_tcode(monthly(Month(1980, 1), x), tcode);
      CHECK(static_cast<int>(out.size()) == n - tcode_lag(tcode));
      CHECK(out.dates.size() == out.values.size());
    }
  }
}

TEST_CASE("assembly") {
  SUBCASE("instrument gaps are zero-filled") {
    const auto schema = schema_of({{"RGDP", Role::Core, 1}, {"Target", Role::Instrument, 1}, {"Path", Role::Instrument, 1}});
    RawCollection raw;
    raw["RGDP"] = monthly(Month(1995, 1), {1, 2, 3, 4, 5, 6});
    RawSeries target, path;
    for (int t : {0, 1, 3, 4, 5}) {
      target.dates.push_back(Month(1995, 1) + t);
      target.values.push_back(0.1 * (t + 1));
    }
    for (int t : {0, 1, 3}) {
      path.dates.push_back(Month(1995, 1) + t);
      path.values.push_back(-0.2 * (t + 1));
    }
    raw["Target"] = target;
    raw["Path"] = path;
    const auto ds = assemble(raw, schema);
    REQUIRE(ds.rows() == 6);
    CHECK(ds.mnemonics() == std::vector<std::string>{"Target", "Path", "RGDP"});
    CHECK(ds.num_instruments() == 2);
    const int row = Month(1995, 3) - ds.dates.front();
    CHECK(ds.values(row, 0) == 0.0);
    CHECK(ds.values(row, 1) == 0.0);
    CHECK(ds.values(1, 0) == doctest::Approx(0.2));
    CHECK(ds.zero_filled == std::vector<int>{1, 3});
    CHECK(ds.values.allFinite());
  }
  SUBCASE("role order with nine columns") {
    std::vector<VariableMeta> schema;
    RawCollection raw;
    const char* core[] = {"RGDP", "PCE", "FFR", "GS1", "GS10", "M2REAL", "SP500"};
    for (const char* c : core) {
      schema.push_back({c, Role::Core, 1, ""});
      raw[c] = monthly(Month(2000, 1), {1, 2, 3});
    }
    schema.insert(schema.begin() + 3, {"Path", Role::Instrument, 1, ""});
    schema.push_back({"Target", Role::Instrument, 1, ""});
    raw["Path"] = monthly(Month(2000, 1), {0, 0, 1});
    raw["Target"] = monthly(Month(2000, 1), {1, 0, 0});
    const auto ds = assemble(raw, schema);
    CHECK(ds.cols() == 9);
    const std::vector<std::string> expect{"Path", "Target", "RGDP", "PCE", "FFR", "GS1", "GS10", "M2REAL", "SP500"};
    CHECK(ds.mnemonics() == expect);
  }
  SUBCASE("macro coverage gap names the series") {
    const auto schema = schema_of({{"Target", Role::Instrument, 1}, {"RGDP", Role::Core, 1}, {"CPI", Role::Other, 1}});
    RawCollection raw;
    raw["Target"] = monthly(Month(1995, 1), std::vector<double>(24, 0.1));
    raw["RGDP"] = monthly(Month(1995, 1), std::vector<double>(24, 1.0));
    raw["CPI"] = monthly(Month(1996, 1), std::vector<double>(12, 1.0));
    const auto msg = error_of([&] { assemble(raw, schema, {Month(1995, 1), Month(1996, 12)}); });
    CHECK(msg.find("CPI") != std::string::npos);
    CHECK(msg.find("1995-01") != std::string::npos);
    CHECK(msg.find("1995-12") != std::string::npos);
  }
  SUBCASE("default sample is the common transformed span") {
    const auto schema = schema_of({{"Target", Role::Instrument, 1}, {"A", Role::Core, 5}, {"B", Role::Core, 1}});
    RawCollection raw;
    raw["Target"] = monthly(Month(1990, 1), std::vector<double>(100, 0.1));
    raw["A"] = monthly(Month(1995, 1), std::vector<double>(10, 2.0));
    raw["B"] = monthly(Month(1995, 3), std::vector<double>(10, 2.0));
    const auto ds = assemble(raw, schema);
    CHECK(ds.dates.front() == Month(1995, 3));
    CHECK(ds.dates.back() == Month(1995, 10));
    CHECK(ds.zero_filled == std::vector<int>{0});
  }
}

TEST_CASE("zero-fill count property") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const auto schema = schema_of({{"Z", Role::Instrument, 1}, {"Y", Role::Core, 1}});
    RawCollection raw;
    raw["Y"] = monthly(Month(2000, 1), std::vector<double>(60, 1.0));
    RawSeries z;
    int absent = 0;
    for (int t = -5; t < 65; ++t) {
      const bool keep = (rng() % 3) != 0;
      if (keep) {
        z.dates.push_back(Month(2000, 1) + t);
        z.values.push_back(1.0 + t);
      } else if (t >= 0 && t < 60) {
        ++absent;
      }
    }
    raw["Z"] = z;
    const auto ds = assemble(raw, schema);
    CHECK(ds.zero_filled[0] == absent);
    CHECK((ds.values.col(0).array() == 0.0).count() == absent);
    CHECK(ds.values.allFinite());
  }
}

TEST_CASE("standardization") {
  Dataset ds;
  ds.values.resize(3, 1);
  ds.values << 1, 2, 3;
  ds.meta = {{"x", Role::Core, 1, ""}};
  for (int t = 0; t < 3; ++t) ds.dates.push_back(Month(2000, 1) + t);

  const auto z = standardize(ds);
  CHECK(z.values(0, 0) == doctest::Approx(-1.0));
  CHECK(z.values(1, 0) == doctest::Approx(0.0));
  CHECK(z.values(2, 0) == doctest::Approx(1.0));
  CHECK((*z.scaling)[0].mean == doctest::Approx(2.0));
  CHECK((*z.scaling)[0].sd == doctest::Approx(1.0));

  const auto zz = standardize(z);
  CHECK(std::abs((*zz.scaling)[0].mean) < 1e-10);
  CHECK(std::abs((*zz.scaling)[0].sd - 1.0) < 1e-10);
  CHECK((zz.values - z.values).cwiseAbs().maxCoeff() < 1e-10);

  Dataset flat = ds;
  flat.values.setConstant(4.0);
  const auto msg = error_of([&] { standardize(flat); });
  CHECK(msg.find("zero-variance") != std::string::npos);
  CHECK(msg.find("x") != std::string::npos);
}

TEST_CASE("standardization moments and round trip") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const int T = 5 + static_cast<int>(rng() % 300), N = 1 + static_cast<int>(rng() % 6);
    Dataset ds;
    ds.values.resize(T, N);
    for (int c = 0; c < N; ++c) {
      const double scale = std::exp(4.0 * g(rng)), shift = 1000.0 * g(rng);
      for (int t = 0; t < T; ++t) ds.values(t, c) = shift + scale * g(rng);
      ds.meta.push_back({"v" + std::to_string(c), Role::Core, 1, ""});
    }
    const auto z = standardize(ds);
    for (int c = 0; c < N; ++c) {
      const double mean = z.values.col(c).mean();
      const double sd = std::sqrt((z.values.col(c).array() - mean).square().sum() / (T - 1));
      CHECK(std::abs(mean) < 1e-10);
      CHECK(std::abs(sd - 1.0) < 1e-10);
    }
    const auto back = unstandardize(z);
    const double rel = ((back.values - ds.values).array().abs() / ds.values.array().abs().max(1e-300)).maxCoeff();
    CHECK(rel < 1e-12);
    CHECK_FALSE(back.scaling.has_value());
  }
}

TEST_CASE("csv write and reload") {
  const auto dir = testutil::scratch("csv_roundtrip");
  Dataset ds;
  ds.values.resize(4, 2);
  ds.values << 0.0, 1.25, 0.5, -2.0, 0.0, 3.0, 1e-17, 4.5;
  ds.meta = {{"Z", Role::Instrument, 1, ""}, {"Y", Role::Core, 1, ""}};
  for (int t = 0; t < 4; ++t) ds.dates.push_back(Month(2010, 11) + t);
  write_csv((dir / "d.csv").string(), ds);
  const auto raw = load_csv((dir / "d.csv").string(), ds.meta);
  const auto back = assemble(raw, ds.meta);
  CHECK(back.values == ds.values);
  CHECK(back.dates == ds.dates);
  CHECK_THROWS_AS(load_csv((dir / "missing.csv").string(), ds.meta), IoError);
}
