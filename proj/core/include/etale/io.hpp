#pragma once

#include <string>

#include "etale/cocycle.hpp"
#include "etale/element.hpp"
#include "etale/groupoid.hpp"

namespace etale {

// JSON file formats. Every top-level object carries "format_version": 1 and
// unknown fields are rejected. Exact rationals are strings "p/q".
//
// Syntax errors raise ParseError (with line and column); schema violations
// raise MalformedSpec naming the offending field; groupoid axiom violations
// raise StructureError with a witness.
inline constexpr int kFormatVersion = 1;

std::string read_text_file(const std::string& path);

ModelPtr parse_model(const std::string& text);
ModelPtr load_model_file(const std::string& path);
std::string serialize_model(const GroupoidModel& model);

TwoCocycle parse_cocycle(const std::string& text, const ModelPtr& model);
TwoCocycle load_cocycle_file(const std::string& path, const ModelPtr& model);
std::string serialize_cocycle(const TwoCocycle& sigma);

// Exact when every coefficient is given by strings; any JSON number makes the
// whole element floating point.
struct ParsedElement {
  bool is_exact = true;
  Element exact;
  FloatElement numeric;
};

ParsedElement parse_element(const std::string& text, const ModelPtr& model);
ParsedElement load_element_file(const std::string& path, const ModelPtr& model);
std::string serialize_element(const Element& f);
std::string serialize_element(const FloatElement& f);

// Single descriptors, as JSON text.
std::string arrow_to_json(const Arrow& a);
std::string unit_to_json(const Unit& u);
std::string support_to_json(const Support& s);
Arrow parse_arrow(const std::string& text, const GroupoidModel& model);

}  // namespace etale
