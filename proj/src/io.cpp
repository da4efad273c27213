#include "gapspec/io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gapspec/errors.hpp"

namespace gapspec::io {

namespace {

void write(std::string& out, const json& j, int indent, int level) {
  auto nl = [&](int lv) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lv), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        nl(level + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, level + 1);
      }
      nl(level);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat && indent >= 0 ? ", " : ",";
        first = false;
        if (!flat) nl(level + 1);
        write(out, v, indent, level + 1);
      }
      if (!flat) nl(level);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::vector<double> split_numbers(const std::string& s, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double x = 0;
    auto r = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) throw ConfigError("bad number '" + tok + "' in " + what);
    v.push_back(x);
  }
  return v;
}

double parse_double(const std::string& tok, const std::string& what) {
  auto v = split_numbers(tok, what);
  if (v.size() != 1) throw ConfigError("expected one number in " + what);
  return v[0];
}

double num(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw ConfigError(std::string("missing numeric field '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

const char* version() { return GAPSPEC_VERSION; }

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  std::string s(buf, r.ptr);
  // Keep it a JSON float so it reads back as one.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump(config, -1)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json certificate(const std::string& command, const json& config, json result) {
  json c;
  c["version"] = version();
  c["config_hash"] = config_hash(config);
  c["command"] = command;
  c["config"] = config;
  c["result"] = std::move(result);
  return c;
}

json to_json(const EllRule& r) {
  json j;
  switch (r.kind) {
    case EllRule::Kind::List:
      j["kind"] = "list";
      j["values"] = r.values;
      break;
    case EllRule::Kind::Geometric:
      j["kind"] = "geometric";
      j["l1"] = r.l1;
      j["q"] = r.q;
      break;
    case EllRule::Kind::Power:
      j["kind"] = "power";
      j["c"] = r.c;
      j["r"] = r.r;
      break;
  }
  return j;
}

EllRule ell_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("ell rule needs a kind");
  EllRule r;
  const std::string k = j["kind"].get<std::string>();
  if (k == "list") {
    r.kind = EllRule::Kind::List;
    if (!j.contains("values") || !j["values"].is_array()) throw ConfigError("list ell rule needs values");
    r.values = j["values"].get<std::vector<double>>();
  } else if (k == "geometric") {
    r.kind = EllRule::Kind::Geometric;
    r.l1 = num(j, "l1");
    r.q = num(j, "q");
  } else if (k == "power") {
    r.kind = EllRule::Kind::Power;
    r.c = num(j, "c");
    r.r = num(j, "r");
  } else {
    throw ConfigError("unknown ell rule kind '" + k + "'");
  }
  return r;
}

EllRule parse_ell(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("ell rule must look like kind:args");
  const std::string kind = s.substr(0, colon);
  auto v = split_numbers(s.substr(colon + 1), "ell rule");
  EllRule r;
  if (kind == "list") {
    r.kind = EllRule::Kind::List;
    r.values = v;
  } else if (kind == "geometric" || kind == "power") {
    if (v.size() != 2) throw ConfigError(kind + " ell rule takes two numbers");
    if (kind == "geometric") {
      r.kind = EllRule::Kind::Geometric;
      r.l1 = v[0];
      r.q = v[1];
    } else {
      r.kind = EllRule::Kind::Power;
      r.c = v[0];
      r.r = v[1];
    }
  } else {
    throw ConfigError("unknown ell rule kind '" + kind + "'");
  }
  return r;
}

json to_json(const GapSet& s) {
  json j;
  j["E0"] = s.E0;
  j["gaps"] = json::array();
  for (const auto& g : s.gaps) j["gaps"].push_back({g.a, g.b});
  if (s.tail) {
    json t;
    t["kind"] = "denjoy";
    t["b1"] = s.tail->b1;
    t["ell"] = to_json(s.tail->ell);
    t["first_index"] = s.tail->first_index;
    t["b_first"] = s.tail->b_first;
    j["tail"] = t;
  }
  if (s.cap) j["cap"] = *s.cap;
  return j;
}

GapSet gapset_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("gap set must be a JSON object");
  GapSet s;
  s.E0 = num(j, "E0");
  if (j.contains("gaps")) {
    if (!j["gaps"].is_array()) throw ConfigError("gaps must be an array");
    for (const auto& g : j["gaps"]) {
      if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number())
        throw ConfigError("each gap must be [a, b]");
      s.gaps.push_back({g[0].get<double>(), g[1].get<double>()});
    }
  }
  if (j.contains("tail") && !j["tail"].is_null()) {
    const auto& t = j["tail"];
    if (t.value("kind", "") != "denjoy") throw ConfigError("only denjoy tails are supported");
    DenjoyTail d;
    d.b1 = num(t, "b1");
    d.ell = ell_from_json(t["ell"]);
    if (t.contains("first_index")) {
      d.first_index = t["first_index"].get<int>();
      d.b_first = num(t, "b_first");
    } else if (s.gaps.empty()) {
      // A bare rule describes the whole system from b1.
      d.first_index = 1;
      d.b_first = d.b1;
    } else {
      // Tail continues below the listed gaps: recompute b_{n+1} from b1.
      double b = d.b1;
      int n = 1;
      for (; n <= static_cast<int>(s.gaps.size()); ++n) b *= d.ell(n);
      d.first_index = n;
      d.b_first = b;
    }
    s.tail = d;
  }
  if (j.contains("cap") && !j["cap"].is_null()) s.cap = j["cap"].get<double>();
  return s;
}

json to_json(const DirichletDivisor& d, const NuDivisor* n) {
  json j;
  j["mu"] = d.mu;
  j["sigma"] = d.sigma;
  if (n) {
    j["nu0"] = n->nu0;
    j["nu"] = n->nu;
  }
  return j;
}

Divisor divisor_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("divisor must be a JSON object");
  Divisor d;
  if (j.contains("mu")) d.mu.mu = j["mu"].get<std::vector<double>>();
  if (j.contains("sigma")) d.mu.sigma = j["sigma"].get<std::vector<int>>();
  if (d.mu.sigma.empty()) d.mu.sigma.assign(d.mu.mu.size(), 1);
  if (d.mu.sigma.size() != d.mu.mu.size()) throw ConfigError("sigma and mu lengths differ");
  for (int s : d.mu.sigma)
    if (s != 1 && s != -1) throw ConfigError("sigma entries must be +1 or -1");
  if (j.contains("nu0") || j.contains("nu")) {
    NuDivisor n;
    n.nu0 = num(j, "nu0");
    if (j.contains("nu")) n.nu = j["nu"].get<std::vector<double>>();
    d.nu = n;
  }
  return d;
}

json to_json(const SpectralMeasure& m) {
  json j;
  j["ac"] = json::array();
  for (const auto& p : m.ac) {
    json a;
    a["l"] = p.l;
    a["u"] = p.u;
    a["density"] = p.form.empty() ? std::string("unnamed") : p.form;
    a["left_exp"] = p.left_exp;
    a["right_exp"] = p.right_exp;
    j["ac"].push_back(a);
  }
  j["pp"] = json::array();
  for (const auto& p : m.pp) j["pp"].push_back(json{{"loc", p.loc}, {"w", p.weight}});
  return j;
}

SpectralMeasure measure_from_json(const json& j, const DensityResolver& resolve) {
  if (!j.is_object()) throw ConfigError("measure must be a JSON object");
  SpectralMeasure m;
  if (j.contains("ac")) {
    for (const auto& a : j["ac"]) {
      AcPiece p;
      p.l = num(a, "l");
      p.u = num(a, "u");
      p.left_exp = a.value("left_exp", 0.0);
      p.right_exp = a.value("right_exp", 0.0);
      p.form = a.value("density", std::string());
      if (p.form.rfind("const:", 0) == 0) {
        const double v = parse_double(p.form.substr(6), "density");
        p.density = [v](double) { return v; };
      } else if (resolve) {
        p.density = resolve(p.form);
      }
      if (!p.density) throw ConfigError("cannot resolve density form '" + p.form + "'");
      m.ac.push_back(std::move(p));
    }
  }
  if (j.contains("pp")) {
    for (const auto& p : j["pp"]) m.pp.push_back({num(p, "loc"), num(p, "w")});
  }
  m.validate();
  return m;
}

json to_json(const CombData& cd) {
  json j;
  j["c"] = cd.c;
  j["h"] = cd.h;
  j["u"] = cd.u;
  j["residual"] = cd.residual;
  j["E0"] = cd.E0;
  j["h_error"] = cd.h_error;
  j["iterations"] = cd.iterations;
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header) : os_(os), columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw ConfigError("CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os_ << ',';
    os_ << (std::isfinite(values[i]) ? format_double(values[i]) : std::string("nan"));
  }
  os_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw ConfigError("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << cells[i];
  }
  os_ << '\n';
}

std::vector<double> Grid::points() const {
  std::vector<double> p;
  if (count < 1) throw ConfigError("grid needs at least one point");
  if (count == 1) return {start};
  if (geometric && !(start > 0 && stop > 0) && !(start < 0 && stop < 0))
    throw ConfigError("geometric grid needs endpoints of one sign");
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    double v = geometric ? start * std::pow(stop / start, t) : start + (stop - start) * t;
    if (i + 1 == count) v = stop;
    p.push_back(v);
  }
  return p;
}

Grid parse_grid(const std::string& s) {
  std::vector<std::string> f;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) f.push_back(tok);
  if (f.size() < 3 || f.size() > 4) throw ConfigError("grid must be start:stop:count or start:stop:step");
  Grid g;
  g.start = parse_double(f[0], "grid");
  g.stop = parse_double(f[1], "grid");
  if (f.size() == 4) {
    if (f[3] == "geo")
      g.geometric = true;
    else if (f[3] != "lin")
      throw ConfigError("grid spacing must be lin or geo");
  }
  const double third = parse_double(f[2], "grid");
  const bool is_count = f[2].find_first_of(".eE") == std::string::npos;
  if (is_count) {
    if (third < 1) throw ConfigError("grid count must be >= 1");
    g.count = static_cast<int>(third);
  } else {
    if (g.geometric) throw ConfigError("geometric grids take a count, not a step");
    if (!(third > 0) || !(g.stop >= g.start)) throw ConfigError("grid step must be positive with stop >= start");
    g.count = static_cast<int>(std::floor((g.stop - g.start) / third + 1e-9)) + 1;
    if (g.count > 10000000) throw ConfigError("grid too large");
    g.stop = g.start + (g.count - 1) * third;
  }
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw ConfigError("grid endpoints must be finite");
  return g;
}

json to_json(const Grid& g) {
  json j;
  j["start"] = g.start;
  j["stop"] = g.stop;
  j["count"] = g.count;
  j["spacing"] = g.geometric ? "geometric" : "linear";
  return j;
}

}  // namespace gapspec::io
