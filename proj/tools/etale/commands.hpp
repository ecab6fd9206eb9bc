#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "report.hpp"

namespace etale::cli {

struct Options {
  std::string command;
  std::string model;
  std::string cocycle;
  std::vector<std::string> elements;
  std::size_t depth = 4;
  std::size_t truncation = 64;
  double tol = 1e-9;
  std::size_t samples = 0;  // 0: every unit of a finite unit space, 4 points otherwise
  std::uint64_t seed = 1;
  std::string output = "text";
};

// Throws etale::Error on failure.
Report run_command(const Options& options);

}  // namespace etale::cli
