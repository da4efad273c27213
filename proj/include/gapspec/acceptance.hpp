#pragma once

#include <string>
#include <vector>

#include "gapspec/io.hpp"

namespace gapspec::acceptance {

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;   // one line with the measured values
  io::json measured;
  double seconds = 0;
  double budget = 0;     // wall-clock limit in seconds; exceeding it fails the suite
};

// Suite names in criterion order.
const std::vector<std::string>& suite_names();

// Throws ConfigError for an unknown name.
Outcome run(const std::string& name);
std::vector<Outcome> run_all();

std::string format_line(const Outcome& o);
io::json to_json(const Outcome& o);

}  // namespace gapspec::acceptance
