#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "lgallee/errors.hpp"
#include "lgallee/report.hpp"

using namespace lgallee;

TEST_CASE("fmt is the shortest round-trip form") {
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(-0.05) == "-0.05");
  CHECK(fmt(1e-300) == "1e-300");
  CHECK(fmt(3) == "3");
  CHECK(fmt(std::size_t{7}) == "7");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(parse_double(fmt(x)) == x);
  }
  CHECK(std::isnan(parse_double(fmt(NAN))));
  CHECK(parse_double(fmt(-INFINITY)) == -INFINITY);
  CHECK_THROWS_AS(parse_double("0.1x"), ValidationError);
  CHECK_THROWS_AS(parse_double(""), ValidationError);
}

TEST_CASE("report round trip is byte identical") {
  Report r;
  r.kind = "demo";
  r.set("A", fmt(0.1));
  r.set("note", "a value: with a colon");
  r.set("empty", "");
  r.columns = {"x", "y", "label"};
  r.add_row({fmt(0.1), fmt(1.0 / 3.0), "P1"});
  r.add_row({"", fmt(-2.5e-17), "P2=P3"});
  const std::string text = r.serialize();
  CHECK(text.rfind("#lgallee-report v1\n#kind: demo\n", 0) == 0);
  const Report back = Report::parse(text);
  CHECK(back == r);
  CHECK(back.serialize() == text);
  CHECK(back.get("note") == "a value: with a colon");
  CHECK(back.column("label") == 2);
  CHECK_THROWS_AS(back.get("missing"), ValidationError);
  CHECK_THROWS_AS(back.column("z"), ValidationError);

  r.set("A", "0.2");
  CHECK(r.get("A") == "0.2");
  CHECK(r.header.size() == 3);
}

TEST_CASE("report rejects malformed input") {
  CHECK_THROWS_AS(Report::parse(""), ValidationError);
  CHECK_THROWS_AS(Report::parse("x\n"), ValidationError);
  CHECK_THROWS_AS(Report::parse("#lgallee-report v1\n#kind: a\nx,y\n1,2"), ValidationError);
  CHECK_THROWS_AS(Report::parse("#lgallee-report v1\n#kind: a\nx,y\n1\n"), ValidationError);
  CHECK_THROWS_AS(Report::parse("#lgallee-report v1\nx,y\n"), ValidationError);
  CHECK_THROWS_AS(Report::parse("#lgallee-report v1\n#kind: a\n#broken\nx\n"), ValidationError);
  CHECK_THROWS_AS(Report::parse("#lgallee-report v1\n#kind: a\n"), ValidationError);

  Report r;
  r.kind = "a";
  r.columns = {"x"};
  CHECK_THROWS_AS(r.add_row({"1", "2"}), ValidationError);
  r.rows.push_back({"1,2"});
  CHECK_THROWS_AS(r.serialize(), ValidationError);
  CHECK_THROWS_AS(r.set("bad:key", "v"), ValidationError);
  CHECK_THROWS_AS(r.set("k", "two\nlines"), ValidationError);
}

TEST_CASE("atomic writes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lgallee_report_test";
  fs::remove_all(dir);
  const fs::path file = dir / "sub" / "out.csv";
  write_atomic(file, "hello\n");
  CHECK(read_file(file) == "hello\n");
  write_atomic(file, "again\n");
  CHECK(read_file(file) == "again\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) {
    ++entries;
  }
  CHECK(entries == 1);
  CHECK_THROWS_AS(read_file(dir / "nope"), IoError);
  CHECK_THROWS_AS(write_atomic(file / "below_a_file", "x"), IoError);
  fs::remove_all(dir);
}
