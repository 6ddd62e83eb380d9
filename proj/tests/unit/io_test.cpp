#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nilmix/io/json_io.hpp"

using namespace nilmix;
using io::json;

TEST(ParseRational, Forms) {
  EXPECT_EQ(io::parse_rational(json(7)), 7);
  EXPECT_EQ(io::parse_rational(json("-6/4")), mpq_class(-3, 2));
  EXPECT_EQ(io::parse_rational(json("-0.05")), mpq_class(-1, 20));
  EXPECT_EQ(io::parse_rational(json("1e-3")), mpq_class(1, 1000));
  EXPECT_EQ(io::parse_rational(json("+2.5E2")), 250);
  EXPECT_EQ(io::parse_rational(json("123456789012345678901234567890")),
            mpq_class(mpz_class("123456789012345678901234567890")));
}

TEST(ParseRational, Rejects) {
  EXPECT_THROW(io::parse_rational(json("1/0")), io::SchemaError);
  EXPECT_THROW(io::parse_rational(json("abc")), io::SchemaError);
  EXPECT_THROW(io::parse_rational(json(0.5)), io::SchemaError);
  EXPECT_THROW(io::parse_rational(json::array()), io::SchemaError);
}

TEST(ParseRational, RoundTripsThroughOutput) {
  for (const char* s : {"0", "-3/7", "22/7", "1000000000000000000001/3"}) {
    mpq_class q(s);
    q.canonicalize();
    EXPECT_EQ(io::parse_rational(io::exact(q)["exact"]), q);
  }
}

TEST(ParseMatrix, ShapesAndErrors) {
  IntMatrix m = io::parse_int_matrix(json::parse("[[2,1],[1,\"1\"]]"));
  EXPECT_EQ(m, (IntMatrix{{2, 1}, {1, 1}}));
  EXPECT_THROW(io::parse_int_matrix(json::parse("[[1,2],[3]]")), io::SchemaError);
  EXPECT_THROW(io::parse_int_matrix(json::parse("[]")), io::SchemaError);
  EXPECT_THROW(io::parse_int_matrix(json::parse("[[1.5]]")), io::SchemaError);
  auto gens = io::parse_generators(json::parse("[[[2,1],[1,1]]]"));
  ASSERT_EQ(gens.size(), 1u);
  EXPECT_THROW(io::parse_generators(json::parse("[[[2,0],[0,1]]]")), InvalidInput);
}

TEST(ParseTrig, RoundTrip) {
  TrigPolynomial f(2);
  f.add({mpz_class(1), mpz_class(-2)}, {mpq_class(1, 3), mpq_class(-5, 2)});
  f.add({mpz_class(0), mpz_class(0)}, {7, 0});
  f.set_tail(mpq_class(1, 100));
  TrigPolynomial g = io::parse_trig(io::to_json(f));
  EXPECT_EQ(g, f);
  EXPECT_EQ(g.tail(), f.tail());
}

TEST(ParseTrig, Rejects) {
  EXPECT_THROW(io::parse_trig(json::parse(R"({"dim":2,"coeffs":[{"freq":[1]}]})")), io::SchemaError);
  EXPECT_THROW(io::parse_trig(json::parse(R"({"dim":0,"coeffs":[]})")), io::SchemaError);
  EXPECT_THROW(io::parse_trig(json::parse(R"({"dim":1,"coeffs":[],"tail":"-1"})")), io::SchemaError);
  EXPECT_THROW(io::parse_trig(json::parse(R"({"coeffs":[]})")), io::SchemaError);
}

TEST(ParseField, ElementCoordinates) {
  FieldPtr k = io::parse_field(json::parse(R"({"polynomial":[-2,0,1]})"));
  EXPECT_EQ(k->degree(), 2);
  NumberFieldElement e = io::parse_element(k, json::parse(R"(["1","1/2"])"));
  EXPECT_EQ(e.norm(), mpq_class(1, 2));  // 1 - 2/4
  EXPECT_THROW(io::parse_element(k, json::parse("[1,2,3]")), io::SchemaError);
  EXPECT_EQ(io::to_json(e), json::parse(R"(["1","1/2"])"));
}

TEST(ParseHeisAuto, CanonicalAndExplicitLinearTerm) {
  HeisAuto canon = io::parse_heis_auto(json::parse(R"({"block":[[2,1],[1,1]]})"));
  HeisAuto expl = io::parse_heis_auto(json::parse(R"({"block":[[2,1],[1,1]],"linear":["0","-1/2"]})"));
  HeisPointQ p{mpq_class(1), mpq_class(0), mpq_class(0)};
  EXPECT_EQ(canon.apply(p), expl.apply(p));
  EXPECT_THROW(io::parse_heis_auto(json::parse(R"({"block":[[2,1],[1,1]],"linear":["0"]})")), io::SchemaError);
}

TEST(ParseTestFunction, BumpsAndZeroMean) {
  TestFunction f = io::parse_test_function(json::parse(
      R"({"constant":"1/4","balls":[{"center":[0.5,0.5,0.5],"radius":0.2,"power":2,"weight":3}],"zero_mean":true})"));
  EXPECT_NEAR(f.integral().mid_d(), 0.0, 1e-15);
  EXPECT_THROW(io::parse_test_function(json::parse(R"({"balls":[{"center":[0,0]}]})")), io::SchemaError);
  EXPECT_THROW(io::parse_test_function(json::parse(R"({"characters":[{"frequency":[1,2,3]}]})")), io::SchemaError);
}

TEST(Output, EnclosureContainsValue) {
  Interval v = Interval::pi(128);
  json e = io::enclosure(v, 25);
  EXPECT_LE(std::stod(e["lo"].get<std::string>()), 3.14159265358979323846);
  EXPECT_GE(std::stod(e["hi"].get<std::string>()), 3.14159265358979);
  EXPECT_EQ(io::decimal(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(io::decimal(1.0 / 3)), 1.0 / 3);
}

TEST(Csv, QuotingAndLineEndings) {
  io::CsvWriter w({"a", "b"});
  w.row({"1/2", "x,y"});
  w.row({"say \"hi\"", ""});
  EXPECT_EQ(w.str(), "a,b\r\n1/2,\"x,y\"\r\n\"say \"\"hi\"\"\",\r\n");
  EXPECT_THROW(w.row({"only one"}), Error);
}

TEST(AtomicWrite, ReplacesContentWithoutLeftovers) {
  auto dir = std::filesystem::temp_directory_path() / "nilmix_io_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "out.json";
  io::atomic_write(path, "first");
  io::atomic_write(path, "second");
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  EXPECT_EQ(ss.str(), "second");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.json.tmp"));
  std::filesystem::remove_all(dir);
}
