#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "laborcast/csv_io.hpp"
#include "laborcast/errors.hpp"
#include "laborcast/series.hpp"
#include "support/synth.hpp"

using namespace laborcast;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "tmp_" + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("DateStamp formatting and month arithmetic") {
    CHECK(DateStamp{2001, 1}.to_string() == "2001-01");
    CHECK(DateStamp{2020, 12}.to_string() == "2020-12");
    CHECK(DateStamp{2001, 12}.next() == DateStamp{2002, 1});
    CHECK(DateStamp{2001, 1}.next() == DateStamp{2001, 2});
    CHECK(DateStamp{2002, 1}.month_index() - DateStamp{2001, 12}.month_index() == 1);
}

TEST_CASE("DateStamp last day follows the Gregorian leap rule") {
    CHECK(DateStamp{2001, 1}.last_day() == 31);
    CHECK(DateStamp{2001, 2}.last_day() == 28);
    CHECK(DateStamp{2004, 2}.last_day() == 29);
    CHECK(DateStamp{2000, 2}.last_day() == 29);
    CHECK(DateStamp{1900, 2}.last_day() == 28);
    CHECK(DateStamp{2001, 4}.last_day() == 30);
}

TEST_CASE("chrono_split boundary values") {
    CHECK(chrono_split(240, 0.7).train_end == 168);
    CHECK(chrono_split(10, 0.5).train_end == 5);
    CHECK_THROWS_AS(chrono_split(2, 0.1), ArgumentError);
    CHECK_THROWS_AS(chrono_split(10, 0.0), ArgumentError);
    CHECK_THROWS_AS(chrono_split(10, 1.0), ArgumentError);
    CHECK_THROWS_AS(chrono_split(1, 0.7), ArgumentError);
}

TEST_CASE("chrono_split keeps all train rows before test rows") {
    for (const std::size_t n : {5u, 24u, 240u})
        for (const double r : {0.3, 0.5, 0.7, 0.9}) {
            const SplitIndex s = chrono_split(n, r);
            CHECK(s.train_end >= 1);
            CHECK(s.train_end < n);
        }
}

TEST_CASE("extract_series shares the date index and round trips") {
    FeatureMatrix m = synth::random_matrix(12, 3, 21);
    const TimeSeries s = extract_series(m, "f1");
    CHECK(s.name == "f1");
    CHECK(s.dates == m.dates);
    CHECK(s.values.size() == m.n_rows());

    FeatureMatrix rebuilt = m.select({"f0", "f2"});
    rebuilt.add_column("f1", s.values);
    const FeatureMatrix reordered = rebuilt.select({"f0", "f1", "f2"});
    CHECK(reordered.names == m.names);
    CHECK(reordered.columns == m.columns);

    CHECK_THROWS_AS(extract_series(m, "nope"), LookupError);
}

TEST_CASE("FeatureMatrix column helpers") {
    FeatureMatrix m = synth::random_matrix(6, 2, 3);
    CHECK(m.col_index("f1") == 1);
    CHECK(m.has_column("f0"));
    CHECK_FALSE(m.has_column("zzz"));
    CHECK_THROWS_AS(m.col_index("zzz"), LookupError);
    CHECK_THROWS_AS(m.add_column("f0", m.columns[0]), ArgumentError);
    CHECK_THROWS_AS(m.add_column("f9", {}), ArgumentError);

    m.columns[1][2] = std::nullopt;
    CHECK_FALSE(m.complete());
    CHECK_THROWS_AS(m.dense_column("f1"), ImputationError);
    CHECK(m.dense_column("f0").size() == 6);
}

TEST_CASE("load_panel_csv parses dates, numbers, and missing cells") {
    const std::string path = write_temp("panel_ok.csv",
                                        "date,A,B\n"
                                        "1/31/2001,1.5,\n"
                                        "2/28/2001,,2.25\n"
                                        "3/31/2001,-3,0.1\n");
    const FeatureMatrix m = load_panel_csv(path, "date");
    CHECK(m.n_rows() == 3);
    CHECK(m.names == std::vector<std::string>{"A", "B"});
    CHECK(m.dates.front() == DateStamp{2001, 1});
    CHECK(m.dates.back() == DateStamp{2001, 3});
    CHECK(*m.columns[0][0] == 1.5);
    CHECK_FALSE(m.columns[0][1].has_value());
    CHECK(*m.columns[0][2] == -3.0);
    CHECK_FALSE(m.columns[1][0].has_value());
    CHECK(*m.columns[1][1] == 2.25);
    std::remove(path.c_str());
}

TEST_CASE("load_panel_csv rejects malformed inputs") {
    CHECK_THROWS_AS(load_panel_csv("no_such_file.csv", "date"), ArgumentError);

    const std::string dup = write_temp("panel_dup.csv",
                                       "date,A\n1/31/2001,1\n1/15/2001,2\n");
    CHECK_THROWS_AS(load_panel_csv(dup, "date"), DuplicateDateError);
    std::remove(dup.c_str());

    const std::string order = write_temp("panel_order.csv",
                                         "date,A\n2/28/2001,1\n1/31/2001,2\n");
    CHECK_THROWS_AS(load_panel_csv(order, "date"), DateOrderError);
    std::remove(order.c_str());

    const std::string gap = write_temp("panel_gap.csv",
                                       "date,A\n1/31/2001,1\n3/31/2001,2\n");
    CHECK_THROWS_AS(load_panel_csv(gap, "date"), DateOrderError);
    std::remove(gap.c_str());

    const std::string badnum = write_temp("panel_badnum.csv",
                                          "date,A\n1/31/2001,abc\n");
    CHECK_THROWS_AS(load_panel_csv(badnum, "date"), FormatError);
    std::remove(badnum.c_str());

    const std::string baddate = write_temp("panel_baddate.csv",
                                           "date,A\n2001-01-31,1\n");
    CHECK_THROWS_AS(load_panel_csv(baddate, "date"), FormatError);
    std::remove(baddate.c_str());

    const std::string badhdr = write_temp("panel_badhdr.csv",
                                          "month,A\n1/31/2001,1\n");
    CHECK_THROWS_AS(load_panel_csv(badhdr, "date"), FormatError);
    std::remove(badhdr.c_str());

    const std::string dupcol = write_temp("panel_dupcol.csv",
                                          "date,A,A\n1/31/2001,1,2\n");
    CHECK_THROWS_AS(load_panel_csv(dupcol, "date"), FormatError);
    std::remove(dupcol.c_str());

    const std::string ragged = write_temp("panel_ragged.csv",
                                          "date,A,B\n1/31/2001,1\n");
    CHECK_THROWS_AS(load_panel_csv(ragged, "date"), FormatError);
    std::remove(ragged.c_str());
}

TEST_CASE("save then load is identity on dates and present values") {
    FeatureMatrix m = synth::random_matrix(24, 4, 77);
    m.columns[0][0] = std::nullopt;
    m.columns[3][23] = std::nullopt;
    m.columns[1][7] = 0.1;
    m.columns[1][8] = 1e-17;
    m.columns[1][9] = 12345.678901234567;
    m.columns[2][0] = -0.0;

    const std::string path = "tmp_roundtrip.csv";
    save_panel_csv(m, path, "date");
    const FeatureMatrix back = load_panel_csv(path, "date");
    CHECK(back.dates == m.dates);
    CHECK(back.names == m.names);
    REQUIRE(back.columns.size() == m.columns.size());
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        for (std::size_t r = 0; r < m.n_rows(); ++r) {
            REQUIRE(back.columns[c][r].has_value() == m.columns[c][r].has_value());
            if (m.columns[c][r]) CHECK(*back.columns[c][r] == *m.columns[c][r]);
        }
    }

    save_panel_csv(back, "tmp_roundtrip2.csv", "date");
    CHECK(read_all(path) == read_all("tmp_roundtrip2.csv"));
    std::remove(path.c_str());
    std::remove("tmp_roundtrip2.csv");
}
