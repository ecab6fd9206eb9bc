#include "doctest.h"
#include "etale/error.hpp"
#include "etale/io.hpp"

using namespace etale;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("model files round trip") {
  const char* specs[] = {
      R"({"format_version": 1, "kind": "pair", "n": 3})",
      R"({"format_version": 1, "kind": "group", "group": {"family": "zd", "d": 2}})",
      R"({"format_version": 1, "kind": "group", "group": {"family": "product", "orders": [2, 2]}, "amenability": "asserted"})",
      R"({"format_version": 1, "kind": "group", "group": {"family": "lamplighter", "m": 2}})",
      R"({"format_version": 1, "kind": "group_bundle", "groups": [{"family": "cyclic", "n": 2}, {"family": "cyclic", "n": 3}]})",
      R"({"format_version": 1, "kind": "transformation", "points": 2, "group": {"family": "cyclic", "n": 4}, "generators": [[1, 0]], "labels": ["a", "b"]})",
      R"({"format_version": 1, "kind": "cylinder_shift", "alphabet": 2, "forbidden": [[1, 1]], "amenability": "unknown"})",
      R"({"format_version": 1, "kind": "finite", "units": [0, 1], "range": [0, 1, 0, 1], "source": [0, 1, 1, 0],
          "inverse": [0, 1, 3, 2], "compositions": [[2, 3, 0], [3, 2, 1]]})",
  };
  for (const char* s : specs) {
    auto m = parse_model(s);
    const auto once = serialize_model(*m);
    CHECK(serialize_model(*parse_model(once)) == once);
  }
  auto p3 = parse_model(specs[0]);
  CHECK(p3->arrows().size() == 9);
  CHECK(p3->units().size() == 3);
  CHECK(parse_model(specs[6])->amenability() == AmenabilityMode::Withheld);
}

TEST_CASE("model file errors") {
  CHECK(kind_of([] { parse_model(R"({"format_version": 1, "kind": "cylinder_shift", "alphabet": -2})"); }) ==
        ErrorKind::MalformedSpec);
  CHECK(kind_of([] { parse_model(R"({"format_version": 1, "kind": "pair", "n": 3, "colour": 1})"); }) ==
        ErrorKind::MalformedSpec);
  CHECK(kind_of([] { parse_model(R"({"kind": "pair", "n": 3})"); }) == ErrorKind::MalformedSpec);
  CHECK(kind_of([] { parse_model("{\"format_version\": 1,\n \"kind\": }"); }) == ErrorKind::ParseError);
  // (2)(3) = 1 is not a unit arrow over the range of 2
  CHECK(kind_of([] {
          parse_model(R"({"format_version": 1, "kind": "finite", "units": [0, 1], "range": [0, 1, 0, 1],
                          "source": [0, 1, 1, 0], "inverse": [0, 1, 3, 2], "compositions": [[2, 3, 1], [3, 2, 1]]})");
        }) == ErrorKind::StructureError);
  try {
    parse_model("{\"format_version\": 1,\n \"kind\": }");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("cocycle files") {
  auto z2 = parse_model(R"({"format_version": 1, "kind": "group", "group": {"family": "zd", "d": 2}})");
  auto s = parse_cocycle(R"({"format_version": 1, "kind": "bicharacter", "theta": [["0", "1/4"], ["0", "0"]]})", z2);
  CHECK(s.eval(GroupArrow{{{1, 0}}}, GroupArrow{{{0, 1}}}) == Phase(1, 4));
  CHECK(serialize_cocycle(parse_cocycle(serialize_cocycle(s), z2)) == serialize_cocycle(s));
  auto t = parse_model(
      R"({"format_version": 1, "kind": "transformation", "points": 2, "group": {"family": "product", "orders": [2, 2]}, "generators": [[1, 0], [0, 1]]})");
  auto pb = parse_cocycle(R"({"format_version": 1, "kind": "pullback", "group": {"family": "product", "orders": [2, 2]},
                              "cocycle": {"kind": "bicharacter", "theta": [["0", "0"], ["1/2", "0"]]}})",
                          t);
  CHECK(serialize_cocycle(parse_cocycle(serialize_cocycle(pb), t)) == serialize_cocycle(pb));
  auto p2 = parse_model(R"({"format_version": 1, "kind": "pair", "n": 2})");
  auto tab = parse_cocycle(R"({"format_version": 1, "kind": "table", "denominator": 2, "entries": [
      {"left": {"i": 0, "j": 1}, "right": {"i": 1, "j": 0}, "value": "1/2"},
      {"left": {"i": 1, "j": 0}, "right": {"i": 0, "j": 1}, "value": "1/2"}]})",
                           p2);
  CHECK(serialize_cocycle(parse_cocycle(serialize_cocycle(tab), p2)) == serialize_cocycle(tab));
  CHECK(kind_of([&] { parse_cocycle(R"({"format_version": 1, "kind": "twisted"})", p2); }) == ErrorKind::MalformedSpec);
}

TEST_CASE("element files") {
  auto z = parse_model(R"({"format_version": 1, "kind": "group", "group": {"family": "zd", "d": 1}})");
  auto f = parse_element(R"({"format_version": 1, "terms": [{"arrow": {"n": 0}, "re": "1"}, {"arrow": {"n": 1}, "re": "1"},
                              {"arrow": {"n": 2}, "im": "1"}]})",
                         z);
  REQUIRE(f.is_exact);
  CHECK(f.exact.size() == 3);
  CHECK(f.exact.at(GroupArrow{{{2}}}) == Cyclotomic::i());
  auto dup = parse_element(R"({"format_version": 1, "terms": [{"arrow": {"n": 1}, "re": "1/2"}, {"arrow": {"n": 1}, "re": "1/2"}]})", z);
  CHECK(dup.exact.at(GroupArrow{{{1}}}) == Cyclotomic(1));
  CHECK(dup.exact.size() == 1);
  auto fl = parse_element(R"({"format_version": 1, "terms": [{"arrow": {"n": 1}, "re": 0.5}]})", z);
  CHECK_FALSE(fl.is_exact);
  CHECK(fl.numeric.at(GroupArrow{{{1}}}) == std::complex<double>(0.5));
  auto zeta = parse_element(R"({"format_version": 1, "terms": [{"arrow": {"n": 1}, "re": "1", "phase": "1/8"}]})", z);
  const auto text = serialize_element(zeta.exact);
  CHECK(serialize_element(parse_element(text, z).exact) == text);
  CHECK(parse_element(text, z).exact == zeta.exact);

  auto fin = parse_model(R"({"format_version": 1, "kind": "finite", "units": [0], "range": [0, 0], "source": [0, 0],
                             "inverse": [0, 1], "compositions": [[1, 1, 0]]})");
  CHECK(kind_of([&] { parse_element(R"({"format_version": 1, "terms": [{"arrow": {"id": 7}, "re": "1"}]})", fin); }) ==
        ErrorKind::UnknownArrow);

  auto shift = parse_model(R"({"format_version": 1, "kind": "cylinder_shift", "alphabet": 2})");
  auto b = parse_element(
      R"({"format_version": 1, "terms": [{"bundle": {"constraint": [[0, 0]], "shift": 1}, "re": "1"}]})", shift);
  CHECK(b.exact.size() == 1);
  const auto bt = serialize_element(b.exact);
  CHECK(serialize_element(parse_element(bt, shift).exact) == bt);
}

TEST_CASE("arrow descriptors") {
  auto shift = parse_model(R"({"format_version": 1, "kind": "cylinder_shift", "alphabet": 2})");
  auto x = SequencePoint::from_parts({0}, 0, {1, 1, 0, 1}, {1, 0});
  Arrow a = ShiftArrow{x, 3};
  CHECK(parse_arrow(arrow_to_json(a), *shift) == a);
  Arrow p = ShiftArrow{SequencePoint::periodic({0, 1}), -2};
  CHECK(parse_arrow(arrow_to_json(p), *shift) == p);
}
