#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

namespace etale::cli {

using ojson = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kInternal = 1, kValidation = 2, kInconclusive = 3, kInput = 4 };

// A command result: structured data plus the lines of the text rendering.
struct Report {
  ojson data = ojson::object();
  std::vector<std::string> text;
  int exit_code = kOk;

  void line(std::string s) { text.push_back(std::move(s)); }
};

// Non-finite doubles have no JSON form; they are written as strings.
inline ojson number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

std::string fmt(double v);

}  // namespace etale::cli
