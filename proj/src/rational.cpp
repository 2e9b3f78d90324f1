#include "condual/rational.hpp"

#include <cctype>

namespace condual {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

Integer parse_integer(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  return Integer(std::string(s));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
  const Integer d = parse_integer(den);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(parse_integer(num), d);
}

std::string to_string(const Rational& value) {
  return boost::multiprecision::numerator(value).str() + "/" +
         boost::multiprecision::denominator(value).str();
}

VectorQ make_vector(std::initializer_list<Rational> values) {
  VectorQ out(static_cast<Index>(values.size()));
  Index i = 0;
  for (const auto& v : values) out(i++) = v;
  return out;
}

Extended difference(const Extended& a, const Extended& b) {
  if (a.finite() && b.finite()) return Extended(a.value_ - b.value_);
  if (a.kind_ == b.kind_) return Extended(Rational(0));
  if (a.is_pos_inf() || b.is_neg_inf()) return Extended::pos_inf();
  return Extended::neg_inf();
}

Extended min(const Extended& a, const Extended& b) { return b < a ? b : a; }
Extended max(const Extended& a, const Extended& b) { return a < b ? b : a; }

std::string to_string(const Extended& value) {
  switch (value.kind()) {
    case Extended::Kind::PosInf: return "+inf";
    case Extended::Kind::NegInf: return "-inf";
    case Extended::Kind::Finite: break;
  }
  return to_string(value.value());
}

Extended parse_extended(std::string_view text) {
  if (text == "+inf" || text == "inf") return Extended::pos_inf();
  if (text == "-inf") return Extended::neg_inf();
  return Extended(parse_rational(text));
}

}  // namespace condual
