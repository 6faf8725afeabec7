#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lz/report.hpp"

using namespace lz;

TEST_CASE("csv output uses 16 significant digits") {
    Table t{{"a", "b"}, {{1.0 / 3.0, 2.0}, {-1e-300, 1e10}}};
    std::string csv = format_table(t, "csv");
    CHECK(csv == "a,b\n0.3333333333333333,2\n-1e-300,10000000000\n");
}

TEST_CASE("header-only table") {
    Table t{{"x"}, {}};
    CHECK(format_table(t, "csv") == "x\n");
    CHECK(parse_table_json(format_table(t, "json")).rows.empty());
}

TEST_CASE("json round trip is exact") {
    Table t{{"r", "e"}, {{0.1, 1.0 / 7.0}, {2.0 / 3.0, 1e-17}}};
    Table back = parse_table_json(format_table(t, "json"));
    REQUIRE(back.columns == t.columns);
    REQUIRE(back.rows.size() == 2);
    for (size_t i = 0; i < 2; ++i)
        for (size_t j = 0; j < 2; ++j) CHECK(back.rows[i][j] == t.rows[i][j]);
}

TEST_CASE("non-finite numbers are spelled out") {
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("malformed tables and paths are errors") {
    Table bad{{"a", "b"}, {{1.0}}};
    CHECK_THROWS_AS(format_table(bad, "csv"), std::invalid_argument);
    CHECK_THROWS_AS(format_table(Table{{"a"}, {}}, "xml"), std::invalid_argument);
    CHECK_THROWS_AS(emit_table(Table{{"a"}, {}}, "csv", "/nonexistent-dir/out.csv"), std::runtime_error);
}
