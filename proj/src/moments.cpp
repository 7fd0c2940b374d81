#include "linamp/moments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace linamp::moments {

using fock::AncillaState;
using fock::FockOperator;

namespace {

void guard(int k) {
  if (k < 0) throw std::invalid_argument("Stirling order must be nonnegative");
  if (k > kStirlingGuard)
    throw std::overflow_error("Stirling order " + std::to_string(k) + " exceeds guard " +
                              std::to_string(kStirlingGuard));
}

Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Integer binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Integer b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

Integer falling(int n, int m) {
  Integer f = 1;
  for (int i = 0; i < m; ++i) f *= (n - i);
  return f;
}

Rational pow2(int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= 2;
  return r;
}

Rational exact_weight(const AncillaState& sigma, int n) {
  if (sigma.exact_weights()) return (*sigma.exact_weights())[n];
  return Rational(sigma.weights()[n]);
}

void require_kind(const MomentSequence& m, MomentKind kind, const char* what) {
  if (m.kind != kind) throw std::invalid_argument(std::string(what) + ": wrong moment kind");
}

}  // namespace

StirlingTable::StirlingTable(StirlingKind kind, int max_order) : kind_(kind) {
  guard(max_order);
  for (int k = 0; k <= max_order; ++k)
    rows_.push_back(kind == StirlingKind::first_signed ? stirling_first(k) : stirling_second(k));
}

const Integer& StirlingTable::operator()(int row, int col) const {
  static const Integer zero = 0;
  if (row < 0 || row > max_order() || col < 0 || col > row) return zero;
  return rows_[row][col];
}

std::vector<Integer> stirling_first(int k) {
  guard(k);
  std::vector<Integer> c{1};
  for (int j = 0; j < k; ++j) {
    // multiply by (x - j)
    std::vector<Integer> next(c.size() + 1, 0);
    for (size_t l = 0; l < c.size(); ++l) {
      next[l + 1] += c[l];
      next[l] -= c[l] * j;
    }
    c.swap(next);
  }
  return c;
}

std::vector<Integer> stirling_second(int l) {
  guard(l);
  std::vector<Integer> row(l + 1, 0);
  for (int k = 0; k <= l; ++k) {
    Integer sum = 0;
    for (int m = 0; m <= k; ++m) {
      Integer p = (l == 0) ? Integer(1) : Integer(0);
      if (l > 0) {
        p = 1;
        for (int i = 0; i < l; ++i) p *= m;
      }
      const Integer term = binomial(k, m) * p;
      if ((k - m) % 2) sum -= term; else sum += term;
    }
    row[k] = sum / factorial(k);
  }
  return row;
}

Rational MomentSequence::at(int k) const {
  if (k == 0) return 1;
  if (k < 0 || k > order()) throw std::out_of_range("moment index outside sequence");
  return values[k - 1];
}

std::string to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::added_noise: return "added_noise";
    case MomentKind::number: return "number";
    case MomentKind::factorial: return "factorial";
    case MomentKind::noise: return "noise";
  }
  return "number";
}

MomentKind moment_kind_from_string(const std::string& s) {
  if (s == "added_noise" || s == "ak") return MomentKind::added_noise;
  if (s == "number" || s == "ml") return MomentKind::number;
  if (s == "factorial") return MomentKind::factorial;
  if (s == "noise") return MomentKind::noise;
  throw std::invalid_argument("unknown moment kind '" + s + "'");
}

MomentSequence coherent_noise_moments(int K) {
  MomentSequence m{MomentKind::noise, {}, true, {}};
  for (int k = 1; k <= K; ++k) m.values.push_back(Rational(factorial(k)) / pow2(k));
  return m;
}

MomentSequence thermal_noise_moments(const Rational& nbar, int K) {
  MomentSequence m{MomentKind::noise, {}, true, {}};
  Rational p = 1;
  for (int k = 1; k <= K; ++k) {
    p *= nbar + Rational(1, 2);
    m.values.push_back(Rational(factorial(k)) * p);
  }
  return m;
}

Rational sym_product_diagonal(int k, int n) {
  Rational sum = 0;
  for (int m = 0; m <= std::min(k, n); ++m)
    sum += Rational(binomial(k, m)) * pow2(m) / Rational(factorial(m)) * Rational(falling(n, m));
  return sum * Rational(factorial(k)) / pow2(k);
}

FockOperator sym_product_operator(int k, int dim) {
  if (k < 0 || 2 * k >= dim) throw std::invalid_argument("symmetric product needs 2k < dim");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(sym_product_diagonal(k, n));
  return FockOperator(std::move(m));
}

MomentSequence added_noise_numbers(const AncillaState& sigma, int K, int dim) {
  MomentSequence out{MomentKind::added_noise, {}, sigma.exact_weights().has_value(), {}};
  const int levels = std::min(dim, sigma.levels());
  double tail = sigma.truncated_mass();
  for (int n = levels; n < sigma.levels(); ++n) tail += std::abs(sigma.weights()[n]);
  if (tail > 1e-12)
    out.warnings.push_back("tail mass " + std::to_string(tail) + " outside the truncation");
  std::vector<Rational> w(levels);
  for (int n = 0; n < levels; ++n) w[n] = exact_weight(sigma, n);
  for (int k = 1; k <= K; ++k) {
    Rational a = 0;
    for (int n = 0; n < levels; ++n)
      if (w[n] != 0) a += w[n] * sym_product_diagonal(k, n);
    out.values.push_back(a);
  }
  return out;
}

MomentSequence number_moments(const AncillaState& sigma, int K) {
  MomentSequence out{MomentKind::number, {}, sigma.exact_weights().has_value(), {}};
  if (sigma.truncated_mass() > 1e-12)
    out.warnings.push_back("tail mass " + std::to_string(sigma.truncated_mass()) +
                           " outside the truncation");
  std::vector<Rational> w(sigma.levels());
  for (int n = 0; n < sigma.levels(); ++n) w[n] = exact_weight(sigma, n);
  for (int l = 1; l <= K; ++l) {
    Rational m = 0;
    for (int n = 1; n < sigma.levels(); ++n) {
      if (w[n] == 0) continue;
      Integer p = 1;
      for (int i = 0; i < l; ++i) p *= n;
      m += w[n] * Rational(p);
    }
    out.values.push_back(m);
  }
  return out;
}

MomentSequence factorial_from_number(const MomentSequence& M) {
  require_kind(M, MomentKind::number, "factorial_from_number");
  MomentSequence out{MomentKind::factorial, {}, M.exact, M.warnings};
  for (int m = 1; m <= M.order(); ++m) {
    const std::vector<Integer> s = stirling_first(m);
    Rational f = 0;
    for (int l = 0; l <= m; ++l) f += Rational(s[l]) * M.at(l);
    out.values.push_back(f);
  }
  return out;
}

MomentSequence factorial_moments(const AncillaState& sigma, int K) {
  return factorial_from_number(number_moments(sigma, K));
}

MomentSequence ml_from_ak(const MomentSequence& A) {
  require_kind(A, MomentKind::added_noise, "ml_from_ak");
  const int K = A.order();
  const StirlingTable s2(StirlingKind::second, K);
  MomentSequence out{MomentKind::number, {}, A.exact, A.warnings};
  for (int l = 1; l <= K; ++l) {
    Rational ml = 0;
    for (int m = 0; m <= l; ++m) {
      Rational c = 0;
      Rational half_pow = 1;  // (-1/2)^{k-m}
      for (int k = m; k <= l; ++k) {
        c += half_pow * Rational(factorial(k)) / Rational(factorial(m)) *
             Rational(binomial(k, m)) * Rational(s2(l, k));
        half_pow *= Rational(-1, 2);
      }
      ml += A.at(m) * c;
    }
    out.values.push_back(ml);
  }
  return out;
}

MomentSequence ak_from_ml(const MomentSequence& M) {
  require_kind(M, MomentKind::number, "ak_from_ml");
  const int K = M.order();
  const StirlingTable s1(StirlingKind::first_signed, K);
  MomentSequence out{MomentKind::added_noise, {}, M.exact, M.warnings};
  for (int k = 1; k <= K; ++k) {
    Rational ak = 0;
    for (int l = 0; l <= k; ++l) {
      Rational d = 0;
      for (int m = l; m <= k; ++m)
        d += Rational(binomial(k, m)) * pow2(m) / Rational(factorial(m)) * Rational(s1(m, l));
      ak += M.at(l) * d;
    }
    out.values.push_back(ak * Rational(factorial(k)) / pow2(k));
  }
  return out;
}

MomentSequence moment_io(const MomentSequence& in, const MomentSequence& A, double g, int K) {
  require_kind(in, MomentKind::noise, "moment_io input");
  require_kind(A, MomentKind::added_noise, "moment_io added-noise numbers");
  if (in.order() < K || A.order() < K) throw std::invalid_argument("moment_io: sequences shorter than K");
  const Rational g2 = Rational(g) * Rational(g);
  const Rational n2 = g2 - 1;
  MomentSequence out{MomentKind::noise, {}, in.exact && A.exact, {}};
  for (int k = 1; k <= K; ++k) {
    Rational sum = 0;
    for (int m = 0; m <= k; ++m) {
      Rational t = Rational(binomial(k, m) * binomial(k, m));
      for (int i = 0; i < k - m; ++i) t *= g2;
      for (int i = 0; i < m; ++i) t *= n2;
      sum += t * in.at(k - m) * A.at(m);
    }
    out.values.push_back(sum);
  }
  return out;
}

cplx mean_field(const FockOperator& state) {
  cplx sum = 0.0;
  for (int n = 1; n < state.dim(); ++n) sum += std::sqrt(double(n)) * state(n, n - 1);
  return sum;
}

double noise_moment(const FockOperator& state, int k) {
  const int dim = state.dim();
  const cplx mu = mean_field(state);
  const Eigen::MatrixXcd d = fock::displacement_elements(-mu, dim);
  const Eigen::MatrixXcd centered = d * state.matrix() * d.adjoint();
  double sum = 0.0;
  for (int n = 0; n < dim; ++n)
    sum += centered(n, n).real() * static_cast<double>(sym_product_diagonal(k, n));
  return sum;
}

std::string to_decimal(const Rational& q) {
  const Integer num = boost::multiprecision::numerator(q);
  const Integer den = boost::multiprecision::denominator(q);
  Integer d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return num.str() + "/" + den.str();
  const int e = std::max(twos, fives);
  Integer scale = 1;
  for (int i = 0; i < e; ++i) scale *= 10;
  Integer scaled = num * scale / den;
  const bool neg = scaled < 0;
  std::string digits = (neg ? Integer(-scaled) : scaled).str();
  if (e > 0) {
    if (static_cast<int>(digits.size()) <= e) digits.insert(0, e + 1 - digits.size(), '0');
    digits.insert(digits.size() - e, ".");
  }
  return (neg ? "-" : "") + digits;
}

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty number");
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const Rational p = parse_rational(s.substr(0, slash));
    const Rational q = parse_rational(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return p / q;
  }
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  Integer mant = 0;
  int frac_digits = 0, digits = 0;
  bool dot = false;
  for (; i < s.size(); ++i) {
    const char ch = s[i];
    if (ch == '.' && !dot) { dot = true; continue; }
    if (!std::isdigit(static_cast<unsigned char>(ch))) break;
    mant = mant * 10 + (ch - '0');
    ++digits;
    if (dot) ++frac_digits;
  }
  if (digits == 0) throw std::invalid_argument("malformed number '" + text + "'");
  long exp10 = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw std::invalid_argument("malformed number '" + text + "'");
    ++i;
    size_t used = 0;
    try {
      exp10 = std::stol(s.substr(i), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed exponent in '" + text + "'");
    }
    if (i + used != s.size()) throw std::invalid_argument("malformed number '" + text + "'");
    if (std::abs(exp10) > 4000) throw std::invalid_argument("exponent out of range in '" + text + "'");
  }
  exp10 -= frac_digits;
  Integer p10 = 1;
  for (long k = 0; k < std::abs(exp10); ++k) p10 *= 10;
  Rational r = exp10 >= 0 ? Rational(mant * p10) : Rational(mant, p10);
  return neg ? Rational(-r) : r;
}

nlohmann::json to_json(const MomentSequence& m) {
  nlohmann::json j;
  j["kind"] = to_string(m.kind);
  j["K"] = m.order();
  j["exact"] = m.exact;
  nlohmann::json vals = nlohmann::json::array();
  for (int k = 1; k <= m.order(); ++k) {
    std::string v;
    if (m.exact) {
      v = to_decimal(m.at(k));
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", m.value(k));
      v = buf;
    }
    vals.push_back({{"k", k}, {"value", v}});
  }
  j["values"] = vals;
  if (!m.warnings.empty()) j["warnings"] = m.warnings;
  return j;
}

MomentSequence moment_sequence_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("moment sequence must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "kind" && key != "K" && key != "exact" && key != "values" && key != "warnings")
      throw std::invalid_argument("unknown key '" + key + "' in moment sequence");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("moment sequence needs a string 'kind'");
  if (!j.contains("values") || !j["values"].is_array())
    throw std::invalid_argument("moment sequence needs a 'values' array");
  MomentSequence m;
  m.kind = moment_kind_from_string(j["kind"].get<std::string>());
  m.exact = j.value("exact", true);
  int k = 0;
  for (const auto& v : j["values"]) {
    ++k;
    const nlohmann::json* val = &v;
    if (v.is_object()) {
      if (!v.contains("k") || !v.contains("value") || v.size() != 2)
        throw std::invalid_argument("indexed value needs exactly 'k' and 'value'");
      if (!v["k"].is_number_integer() || v["k"].get<int>() != k)
        throw std::invalid_argument("moment indices must run 1, 2, ... in order");
      val = &v["value"];
    }
    if (val->is_string()) {
      m.values.push_back(parse_rational(val->get<std::string>()));
    } else if (val->is_number()) {
      m.values.push_back(Rational(val->get<double>()));
      if (!val->is_number_integer()) m.exact = false;
    } else {
      throw std::invalid_argument("moment values must be strings or numbers");
    }
  }
  if (j.contains("K")) {
    if (!j["K"].is_number_integer() || j["K"].get<int>() != m.order())
      throw std::invalid_argument("'K' does not match the number of values");
  }
  if (j.contains("warnings"))
    for (const auto& w : j["warnings"]) m.warnings.push_back(w.get<std::string>());
  return m;
}

}  // namespace linamp::moments
