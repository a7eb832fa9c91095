#include "doctest.h"
#include "hbml/csv.hpp"
#include "hbml/error.hpp"
#include "support.hpp"

#include <cmath>
#include <limits>

using namespace hbml;

TEST_CASE("split_line handles quotes and whitespace") {
  const auto cells = csv::split_line(R"(a, "b,c" ,"d""e",)");
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == "a");
  CHECK(cells[1] == "b,c");
  CHECK(cells[2] == "d\"e");
  CHECK(cells[3] == "");
}

TEST_CASE("missing cells and numeric conversion") {
  CHECK(csv::is_missing(""));
  CHECK(csv::is_missing("."));
  CHECK_FALSE(csv::is_missing("0"));
  CHECK(csv::to_double("1.5e3") == doctest::Approx(1500.0));
  CHECK(csv::to_double("-.25") == doctest::Approx(-0.25));
  CHECK_FALSE(csv::to_double("abc"));
  CHECK_FALSE(csv::to_double("1.0x"));
  CHECK_FALSE(csv::to_double("inf"));
  CHECK_FALSE(csv::to_double("nan"));
}

TEST_CASE("parse reads header and rows, tolerating CRLF") {
  const auto t = test::table_from("x,y\r\n1,2\r\n3,4\r\n");
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
  CHECK(t.column("y") == std::optional<std::size_t>(1));
  CHECK_FALSE(t.column("z"));
}

TEST_CASE("ragged rows are rejected") {
  CHECK_THROWS_AS(test::table_from("x,y\n1\n"), ValidationError);
}

TEST_CASE("read of a missing file is an I/O error") {
  CHECK_THROWS_AS(csv::read("/nonexistent/really/not/here.csv"), IoError);
}

TEST_CASE("quantize and format round-trip at 9 significant digits") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-12, 12);
  for (int i = 0; i < 2000; ++i) {
    const double v = csv::quantize(mant(gen) * std::pow(10.0, expo(gen)));
    const auto text = csv::format_number(v);
    const auto back = csv::to_double(text);
    REQUIRE(back);
    CHECK(*back == v);
    CHECK(csv::quantize(v) == v);
  }
  CHECK(csv::format_number(csv::quantize(0.123456789123)) == "0.123456789");
  CHECK(csv::format_number(0.0) == "0");
}

TEST_CASE("write mode combinations") {
  CHECK(csv::write_mode(false, false) == csv::WriteMode::Create);
  CHECK(csv::write_mode(true, false) == csv::WriteMode::Replace);
  CHECK(csv::write_mode(false, true) == csv::WriteMode::Append);
  CHECK_THROWS_AS(csv::write_mode(true, true), ValidationError);
}
