#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapspec/comb.hpp"
#include "gapspec/gapset.hpp"
#include "gapspec/greens.hpp"
#include "gapspec/herglotz.hpp"

namespace gapspec::io {

using json = nlohmann::ordered_json;

const char* version();

// Numbers with 17 significant digits, non-finite values as null, keys in
// insertion order. Byte-identical for identical input.
std::string dump(const json& j, int indent = 2);
std::string format_double(double v);

// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const json& config);
// {"version", "config_hash", "command", "config", "result"}.
json certificate(const std::string& command, const json& config, json result);

json to_json(const EllRule& r);
EllRule ell_from_json(const json& j);
// "geometric:l1,q", "power:c,r" or "list:v1,v2,...".
EllRule parse_ell(const std::string& s);

json to_json(const GapSet& s);
GapSet gapset_from_json(const json& j);

struct Divisor {
  DirichletDivisor mu;
  std::optional<NuDivisor> nu;
};
json to_json(const DirichletDivisor& d, const NuDivisor* n = nullptr);
Divisor divisor_from_json(const json& j);

// Turns a named density form into an evaluator. "const:<v>" is handled
// before the resolver is consulted.
using DensityResolver = std::function<std::function<double(double)>(const std::string&)>;
json to_json(const SpectralMeasure& m);
SpectralMeasure measure_from_json(const json& j, const DensityResolver& resolve = {});

json to_json(const CombData& cd);

json read_json_file(const std::string& path);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

struct Grid {
  double start = 0, stop = 1;
  int count = 2;
  bool geometric = false;
  std::vector<double> points() const;
};
// "start:stop:count" (integer third field), "start:stop:step" (with a decimal
// point or exponent), with an optional ":geo" or ":lin" suffix.
Grid parse_grid(const std::string& s);
json to_json(const Grid& g);

}  // namespace gapspec::io
