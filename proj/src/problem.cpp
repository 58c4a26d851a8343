#include "nilheat/problem.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "nilheat/errors.hpp"
#include "nilheat/graded.hpp"
#include "nilheat/parser.hpp"

namespace nilheat {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ValidationError(origin + ":" + std::to_string(line) + ": " + msg);
}

// Rational literal: [sign] digits [ '/' digits | '.' digits ].
Rational parse_rational_literal(const std::string& text, const std::string& origin, int line) {
  std::string s = trim(text);
  if (s.empty()) fail(origin, line, "empty number");
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == start) fail(origin, line, "malformed number '" + s + "'");
  Integer num(s.substr(start, i - start));
  Integer den(1);
  if (i < s.size() && s[i] == '/') {
    ++i;
    size_t d0 = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == d0) fail(origin, line, "malformed fraction '" + s + "'");
    den = Integer(s.substr(d0, i - d0));
    if (den == 0) fail(origin, line, "zero denominator in '" + s + "'");
  } else if (i < s.size() && s[i] == '.') {
    ++i;
    size_t d0 = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == d0) fail(origin, line, "malformed decimal '" + s + "'");
    for (size_t p = d0; p < i; ++p) {
      num = num * 10 + (s[p] - '0');
      den *= 10;
    }
  }
  if (i != s.size()) fail(origin, line, "trailing characters in number '" + s + "'");
  Rational q(num, den);
  return neg ? -q : q;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& text, const std::string& origin, int line) {
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    if (trim(text.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  fail(origin, line, "malformed real number '" + trim(text) + "'");
}

long long parse_int(const std::string& text, const std::string& origin, int line) {
  try {
    size_t pos = 0;
    long long v = std::stoll(trim(text), &pos);
    if (pos == trim(text).size()) return v;
  } catch (const std::exception&) {
  }
  fail(origin, line, "malformed integer '" + trim(text) + "'");
}

uint64_t parse_u64(const std::string& text, const std::string& origin, int line) {
  try {
    size_t pos = 0;
    uint64_t v = std::stoull(trim(text), &pos);
    if (pos == trim(text).size()) return v;
  } catch (const std::exception&) {
  }
  fail(origin, line, "malformed unsigned integer '" + trim(text) + "'");
}

std::vector<double> parse_double_list(const std::string& text, const std::string& origin,
                                      int line) {
  std::vector<double> out;
  for (const auto& part : split_commas(text)) out.push_back(parse_double(part, origin, line));
  return out;
}

}  // namespace

ProblemSpec parse_problem(const std::string& text, const std::string& origin,
                          const ProblemOverrides& ov) {
  ProblemSpec spec;
  spec.t_grid.clear();
  spec.h_schedule.clear();

  enum Section { Preamble, Fields, Point, Options } section = Preamble;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_dim = false, have_k = false, have_x0 = false;
  std::vector<std::pair<int, std::string>> field_lines;  // (line, "fI = ...")
  std::vector<bool> have_f;
  std::vector<std::string> raw_f;
  std::vector<int> line_f;
  int x0_line = 0;
  std::string raw_x0;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line == "[fields]") {
        if (!have_dim || !have_k) fail(origin, lineno, "dim and k must be set before [fields]");
        section = Fields;
      } else if (line == "[point]") {
        section = Point;
      } else if (line == "[options]") {
        section = Options;
      } else {
        fail(origin, lineno, "unknown section " + line);
      }
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (value.empty()) fail(origin, lineno, "empty value for '" + key + "'");

    switch (section) {
      case Preamble: {
        if (key == "dim") {
          long long d = parse_int(value, origin, lineno);
          if (d < 1 || d > 16) fail(origin, lineno, "dim must be in 1..16");
          spec.dim = static_cast<int>(d);
          have_dim = true;
        } else if (key == "k") {
          long long kk = parse_int(value, origin, lineno);
          if (kk < 1 || kk > 16) fail(origin, lineno, "k must be in 1..16");
          spec.k = static_cast<int>(kk);
          have_k = true;
        } else {
          fail(origin, lineno, "unknown preamble key '" + key + "' (expected dim or k)");
        }
        break;
      }
      case Fields: {
        if (key.size() < 2 || key[0] != 'f')
          fail(origin, lineno, "expected f0..f" + std::to_string(spec.k) + ", got '" + key + "'");
        int idx = -1;
        try {
          size_t pos = 0;
          idx = std::stoi(key.substr(1), &pos);
          if (pos != key.size() - 1) idx = -1;
        } catch (const std::exception&) {
        }
        if (idx < 0 || idx > spec.k)
          fail(origin, lineno, "field index out of range in '" + key + "'");
        if (have_f.empty()) {
          have_f.assign(spec.k + 1, false);
          raw_f.assign(spec.k + 1, "");
          line_f.assign(spec.k + 1, 0);
        }
        if (have_f[idx]) fail(origin, lineno, "duplicate definition of " + key);
        have_f[idx] = true;
        raw_f[idx] = value;
        line_f[idx] = lineno;
        break;
      }
      case Point: {
        if (key != "x0") fail(origin, lineno, "expected x0 in [point]");
        if (have_x0) fail(origin, lineno, "duplicate x0");
        have_x0 = true;
        raw_x0 = value;
        x0_line = lineno;
        break;
      }
      case Options: {
        if (key == "seed")
          spec.seed = parse_u64(value, origin, lineno);
        else if (key == "paths") {
          spec.paths = parse_int(value, origin, lineno);
          if (spec.paths < 1) fail(origin, lineno, "paths must be >= 1");
        } else if (key == "steps") {
          spec.steps = static_cast<int>(parse_int(value, origin, lineno));
          if (spec.steps < 1) fail(origin, lineno, "steps must be >= 1");
        } else if (key == "weight_cap") {
          spec.weight_cap = static_cast<int>(parse_int(value, origin, lineno));
          if (spec.weight_cap < 1) fail(origin, lineno, "weight_cap must be >= 1");
        } else if (key == "taylor_degree") {
          spec.taylor_degree = static_cast<int>(parse_int(value, origin, lineno));
          if (spec.taylor_degree < 1) fail(origin, lineno, "taylor_degree must be >= 1");
        } else if (key == "rank_tol") {
          spec.rank_tol = parse_double(value, origin, lineno);
          if (!(spec.rank_tol > 0)) fail(origin, lineno, "rank_tol must be > 0");
        } else if (key == "adjust_divergence") {
          if (value == "true")
            spec.adjust_divergence = true;
          else if (value == "false")
            spec.adjust_divergence = false;
          else
            fail(origin, lineno, "adjust_divergence must be true or false");
        } else if (key == "t_grid") {
          spec.t_grid = parse_double_list(value, origin, lineno);
          for (double t : spec.t_grid)
            if (!(t > 0)) fail(origin, lineno, "t_grid entries must be > 0");
        } else if (key == "h_schedule") {
          spec.h_schedule = parse_double_list(value, origin, lineno);
          for (double h : spec.h_schedule)
            if (!(h > 0)) fail(origin, lineno, "h_schedule entries must be > 0");
        } else if (key == "control_bound") {
          spec.control_bound = parse_double(value, origin, lineno);
          if (!(spec.control_bound > 0)) fail(origin, lineno, "control_bound must be > 0");
        } else if (key == "control_switches") {
          spec.control_switches = static_cast<int>(parse_int(value, origin, lineno));
          if (spec.control_switches < 1) fail(origin, lineno, "control_switches must be >= 1");
        } else if (key == "control_rollouts") {
          spec.control_rollouts = static_cast<int>(parse_int(value, origin, lineno));
          if (spec.control_rollouts < 1) fail(origin, lineno, "control_rollouts must be >= 1");
        } else if (key == "scaling_eps") {
          spec.scaling_eps = parse_double(value, origin, lineno);
          if (!(spec.scaling_eps > 0)) fail(origin, lineno, "scaling_eps must be > 0");
        } else {
          fail(origin, lineno, "unknown option '" + key + "'");
        }
        break;
      }
    }
  }

  if (!have_dim) fail(origin, lineno, "missing dim");
  if (!have_k) fail(origin, lineno, "missing k");
  if (have_f.empty() || !have_x0) {
    if (have_f.empty()) fail(origin, lineno, "missing [fields] section");
    fail(origin, lineno, "missing x0 in [point]");
  }
  for (int i = 0; i <= spec.k; ++i)
    if (!have_f[i]) fail(origin, lineno, "missing field f" + std::to_string(i));

  // Command-line overrides, then dim-dependent defaults.
  if (ov.seed) spec.seed = *ov.seed;
  if (ov.paths) spec.paths = *ov.paths;
  if (ov.weight_cap) spec.weight_cap = *ov.weight_cap;
  if (ov.taylor_degree) spec.taylor_degree = *ov.taylor_degree;
  if (spec.weight_cap == 0) spec.weight_cap = 2 * spec.dim + 2;
  if (spec.taylor_degree == 0) spec.taylor_degree = 2 * spec.weight_cap;
  if (spec.t_grid.empty()) spec.t_grid = {0.05, 0.08, 0.125, 0.2, 0.32, 0.5};
  if (spec.h_schedule.empty()) spec.h_schedule = {0.8, 0.6, 0.45, 0.34, 0.25};

  // x0.
  std::vector<std::string> coords = split_commas(raw_x0);
  if (static_cast<int>(coords.size()) != spec.dim)
    fail(origin, x0_line,
         "x0 has " + std::to_string(coords.size()) + " coordinates, expected " +
             std::to_string(spec.dim));
  for (const auto& c : coords) spec.x0.push_back(parse_rational_literal(c, origin, x0_line));

  // Fields.
  for (int i = 0; i <= spec.k; ++i) {
    std::vector<std::string> comps = split_commas(raw_f[i]);
    if (static_cast<int>(comps.size()) != spec.dim)
      fail(origin, line_f[i],
           "f" + std::to_string(i) + " has " + std::to_string(comps.size()) +
               " components, expected " + std::to_string(spec.dim));
    std::vector<Polynomial> polys;
    for (const auto& c : comps) {
      try {
        polys.push_back(parse_field_component(c, spec.dim, spec.taylor_degree));
      } catch (const ValidationError& e) {
        fail(origin, line_f[i], "in f" + std::to_string(i) + ": " + e.what());
      }
    }
    spec.fields.emplace_back(std::move(polys));
    if (i == 0)
      spec.f0_exprs = comps;
    else
      spec.f_exprs.push_back(comps);
  }

  // Optional divergence adjustment, then the stationarity gate.
  if (spec.adjust_divergence) spec.fields[0] = divergence_drift_adjust(spec.fields, -1);
  std::vector<Rational> v = spec.fields[0].evaluate(spec.x0);
  for (const auto& c : v) {
    if (c != 0)
      throw ValidationError(
          origin + ": DriftNotStationary: f0(x0) != 0" +
          std::string(spec.adjust_divergence ? " (after divergence adjustment)"
                                             : "; set adjust_divergence = true if the drift "
                                               "is meant in divergence form"));
  }
  return spec;
}

ProblemSpec load_problem(const std::string& path, const ProblemOverrides& ov) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open problem file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path, ov);
}

}  // namespace nilheat
