#include "pandora/rational.hpp"

namespace pandora {

namespace {

BigInt parse_big(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer in rational");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw std::invalid_argument("sign without digits in rational");
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9')
      throw std::invalid_argument("invalid integer '" + s + "' in rational");
  return BigInt(s);
}

}  // namespace

Rat parse_rat(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rat(parse_big(text));
  BigInt num = parse_big(text.substr(0, slash));
  BigInt den = parse_big(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in rational '" + text + "'");
  return Rat(num, den);
}

std::string rat_to_string(const Rat& x) {
  std::string s = numerator(x).str();
  if (denominator(x) != 1) s += "/" + denominator(x).str();
  return s;
}

double rat_to_double(const Rat& x) { return x.convert_to<double>(); }

Rat floor_to_multiple(const Rat& x, const Rat& g) {
  BigInt q = numerator(x) * denominator(g);
  BigInt d = denominator(x) * numerator(g);
  BigInt m = q / d;
  if (m * d != q && (q < 0) != (d < 0)) --m;  // round toward -inf
  return Rat(m) * g;
}

Rat ceil_to_multiple(const Rat& x, const Rat& g) {
  Rat f = floor_to_multiple(x, g);
  return f == x ? f : f + g;
}

}  // namespace pandora
