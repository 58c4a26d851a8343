#include "nilheat/parser.hpp"

#include <cctype>
#include <sstream>

#include "nilheat/errors.hpp"

namespace nilheat {

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  int nvars;
  int cap;

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "parse error at position " << pos << ": " << msg << " in \"" << s << "\"";
    throw ValidationError(os.str());
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  Integer read_uint() {
    skip_ws();
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      fail("expected an unsigned integer");
    Integer v(0);
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + (s[pos] - '0');
      ++pos;
    }
    return v;
  }

  Polynomial expr() {
    skip_ws();
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    Polynomial acc = term();
    if (neg) acc = -acc;
    for (;;) {
      if (eat('+'))
        acc += term();
      else if (eat('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (eat('*')) acc = (acc * factor()).truncated(cap);
    return acc;
  }

  Polynomial factor() {
    Polynomial b = base();
    if (eat('^')) {
      Integer e = read_uint();
      if (e > 1000) fail("exponent too large");
      return b.pow(e.convert_to<unsigned>(), cap);
    }
    return b;
  }

  // Maclaurin series of sin/cos/exp applied to an argument with zero
  // constant term, truncated at total degree cap.
  Polynomial transcendental(const std::string& name, const Polynomial& arg) {
    if (arg.constant_term() != 0)
      fail(name + " argument has nonzero constant term; recenter the expression first");
    Polynomial acc = Polynomial::zero(nvars);
    // arg has no constant term, so arg^p only contributes degrees >= p.
    for (int p = 0; p <= cap; ++p) {
      Rational c(0);
      if (name == "exp") {
        c = Rational(1) / rat_factorial(p);
      } else if (name == "sin") {
        if (p % 2 == 1) c = Rational((p / 2) % 2 == 0 ? 1 : -1) / rat_factorial(p);
      } else {  // cos
        if (p % 2 == 0) c = Rational((p / 2) % 2 == 0 ? 1 : -1) / rat_factorial(p);
      }
      if (c != 0) acc += arg.pow(static_cast<unsigned>(p), cap).scaled(c);
    }
    return acc;
  }

  Polynomial base() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of expression");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      Polynomial inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Integer num = read_uint();
      if (eat('/')) {
        Integer den = read_uint();
        if (den == 0) fail("zero denominator");
        return Polynomial::constant(nvars, Rational(num, den));
      }
      return Polynomial::constant(nvars, Rational(num));
    }
    if (c == 'x') {
      ++pos;
      Integer idx = read_uint();
      if (idx < 1 || idx > nvars) {
        std::ostringstream os;
        os << "variable x" << idx << " out of range (1.." << nvars << ")";
        fail(os.str());
      }
      return Polynomial::variable(nvars, idx.convert_to<int>());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
      std::string name = s.substr(start, pos - start);
      if (name != "sin" && name != "cos" && name != "exp") {
        pos = start;
        fail("unknown function \"" + name + "\"");
      }
      if (!eat('(')) fail("expected '(' after " + name);
      Polynomial arg = expr();
      if (!eat(')')) fail("expected ')'");
      return transcendental(name, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Polynomial parse_field_component(const std::string& text, int nvars, int taylor_degree) {
  if (nvars < 1) throw ValidationError("parse_field_component: nvars must be >= 1");
  if (taylor_degree < 0) throw ValidationError("parse_field_component: negative taylor_degree");
  Parser p{text, 0, nvars, taylor_degree};
  Polynomial out = p.expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters");
  return out.truncated(taylor_degree);
}

std::vector<Polynomial> parse_components(const std::string& line, int nvars, int taylor_degree) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  std::vector<Polynomial> out;
  out.reserve(parts.size());
  for (const std::string& p : parts) out.push_back(parse_field_component(p, nvars, taylor_degree));
  return out;
}

}  // namespace nilheat
