#ifndef NILHEAT_PARSER_HPP
#define NILHEAT_PARSER_HPP

#include <string>
#include <vector>

#include "nilheat/polynomial.hpp"

namespace nilheat {

// Parses one vector-field component over variables x1..xn into a polynomial,
// expanding sin/cos/exp as Maclaurin series truncated at total degree
// taylor_degree. Grammar:
//
//   expr     := ['+'|'-'] term (('+'|'-') term)*
//   term     := factor ('*' factor)*
//   factor   := base ('^' uint)?
//   base     := rational | 'x'uint | '(' expr ')'
//             | ('sin'|'cos'|'exp') '(' expr ')'
//   rational := uint ['/' uint]
//
// The leading sign is accepted as a convenience superset of the documented
// grammar. Transcendental arguments must have zero constant term (otherwise
// the coefficients would be irrational); violations raise ValidationError
// with a character position.
Polynomial parse_field_component(const std::string& text, int nvars, int taylor_degree);

// Splits "expr, expr, ..." on top-level commas (commas never occur inside the
// expression grammar) and parses each component.
std::vector<Polynomial> parse_components(const std::string& line, int nvars, int taylor_degree);

}  // namespace nilheat

#endif
