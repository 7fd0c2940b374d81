#include <cmath>
#include <random>

#include "doctest.h"
#include "linamp/gate.hpp"
#include "linamp/moments.hpp"

using namespace linamp;
using namespace linamp::moments;
using fock::AncillaState;

namespace {

Integer ifact(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Integer ibinom(int n, int k) { return ifact(n) / (ifact(k) * ifact(n - k)); }

// <n| W |n> summed over every word W with k lowering and k raising operators,
// divided by C(2k, k). Along a closed path each edge is climbed and descended
// equally often, so the sqrt factors pair into integers.
Rational brute_symmetric_diagonal(int k, int n) {
  Integer total = 0;
  const int len = 2 * k;
  for (unsigned mask = 0; mask < (1u << len); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    int level = n;
    Integer prod = 1;
    bool alive = true;
    for (int pos = 0; pos < len && alive; ++pos) {
      if (mask & (1u << pos)) {
        ++level;
        prod *= level;  // raising: |m> -> sqrt(m+1)|m+1>, weight counted once per climb
      } else {
        if (level == 0) alive = false;
        --level;
      }
    }
    if (alive) total += prod;
  }
  return Rational(total) / Rational(ibinom(len, k));
}

MomentSequence seq(MomentKind kind, std::vector<Rational> v) {
  MomentSequence m;
  m.kind = kind;
  m.values = std::move(v);
  return m;
}

Rational random_rational(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-40, 40), den(1, 12);
  return Rational(num(rng), den(rng));
}

}  // namespace

TEST_CASE("Stirling numbers of the first kind") {
  CHECK(stirling_first(0) == std::vector<Integer>{1});
  CHECK(stirling_first(1) == std::vector<Integer>{0, 1});
  CHECK(stirling_first(3) == std::vector<Integer>{0, 2, -3, 1});
  CHECK(stirling_first(4) == std::vector<Integer>{0, -6, 11, -6, 1});
  // Recurrence S(n+1, k) = S(n, k-1) - n S(n, k).
  for (int n = 0; n < 30; ++n) {
    const auto a = stirling_first(n), b = stirling_first(n + 1);
    for (int k = 1; k <= n + 1; ++k) {
      const Integer prev = k - 1 <= n ? a[k - 1] : Integer(0);
      const Integer same = k <= n ? a[k] : Integer(0);
      CHECK(b[k] == prev - n * same);
    }
    CHECK(b[0] == 0);
  }
  CHECK_NOTHROW(stirling_first(64));
  CHECK_THROWS_AS(stirling_first(65), std::overflow_error);
}

TEST_CASE("Stirling numbers of the second kind") {
  CHECK(stirling_second(1) == std::vector<Integer>{0, 1});
  CHECK(stirling_second(4)[2] == 7);
  for (int n = 0; n < 30; ++n) {
    const auto a = stirling_second(n), b = stirling_second(n + 1);
    for (int k = 1; k <= n + 1; ++k) {
      const Integer prev = k - 1 <= n ? a[k - 1] : Integer(0);
      const Integer same = k <= n ? a[k] : Integer(0);
      CHECK(b[k] == k * same + prev);
    }
  }
  CHECK_THROWS_AS(stirling_second(65), std::overflow_error);
}

TEST_CASE("Stirling inverse pairing") {
  const StirlingTable s1(StirlingKind::first_signed, 16), s2(StirlingKind::second, 16);
  CHECK(s1(3, 7) == 0);
  CHECK(s2(2, 5) == 0);
  for (int l = 0; l <= 16; ++l)
    for (int lp = 0; lp <= 16; ++lp) {
      Integer a = 0, b = 0;
      for (int k = 0; k <= 16; ++k) {
        a += s1(k, l) * s2(lp, k);
        b += s1(lp, k) * s2(k, l);
      }
      CHECK(a == (l == lp ? 1 : 0));
      CHECK(b == (l == lp ? 1 : 0));
    }
}

TEST_CASE("symmetric products") {
  const auto k1 = sym_product_operator(1, 10);
  for (int n = 0; n < 10; ++n) CHECK(k1(n, n).real() == doctest::Approx(n + 0.5));
  CHECK(sym_product_diagonal(4, 0) == Rational(3, 2));
  CHECK(sym_product_diagonal(3, 0) == Rational(3, 4));
  CHECK_THROWS(sym_product_operator(5, 10));
  // Closed form against brute-force symmetrization, exactly.
  for (int k = 0; k <= 10; ++k)
    for (int n = 0; n <= 10; ++n) CHECK(sym_product_diagonal(k, n) == brute_symmetric_diagonal(k, n));
  const auto k3 = sym_product_operator(3, 20);
  CHECK((k3.matrix() - k3.matrix().diagonal().asDiagonal().toDenseMatrix()).norm() == 0.0);
  for (int n = 0; n < 20; ++n) CHECK(k3(n, n).real() == doctest::Approx(static_cast<double>(sym_product_diagonal(3, n))));
}

TEST_CASE("printed expansions for k = 1..4, coefficient for coefficient") {
  // A_k in terms of M_l: feed unit moment vectors into the affine map.
  const std::vector<std::vector<Rational>> sym_in_number = {
      {Rational(1, 2), 1},
      {Rational(1, 2), 1, 1},
      {Rational(3, 4), 2, Rational(3, 2), 1},
      {Rational(3, 2), 4, 5, 2, 1}};
  const auto zero = ak_from_ml(seq(MomentKind::number, std::vector<Rational>(4, 0)));
  for (int k = 1; k <= 4; ++k) CHECK(zero.at(k) == sym_in_number[k - 1][0]);
  for (int l = 1; l <= 4; ++l) {
    std::vector<Rational> e(4, 0);
    e[l - 1] = 1;
    const auto a = ak_from_ml(seq(MomentKind::number, e));
    for (int k = 1; k <= 4; ++k) {
      const Rational want = l <= k ? sym_in_number[k - 1][l] : Rational(0);
      CHECK(a.at(k) - zero.at(k) == want);
    }
  }
  const std::vector<std::vector<Rational>> number_in_sym = {
      {Rational(-1, 2), 1},
      {0, -1, 1},
      {Rational(1, 4), Rational(-1, 2), Rational(-3, 2), 1},
      {0, 2, -2, -2, 1}};
  const auto zero_a = ml_from_ak(seq(MomentKind::added_noise, std::vector<Rational>(4, 0)));
  for (int l = 1; l <= 4; ++l) CHECK(zero_a.at(l) == number_in_sym[l - 1][0]);
  for (int m = 1; m <= 4; ++m) {
    std::vector<Rational> e(4, 0);
    e[m - 1] = 1;
    const auto mm = ml_from_ak(seq(MomentKind::added_noise, e));
    for (int l = 1; l <= 4; ++l) {
      const Rational want = m <= l ? number_in_sym[l - 1][m] : Rational(0);
      CHECK(mm.at(l) - zero_a.at(l) == want);
    }
  }
  // Normally ordered products in powers of the number operator are the
  // first-kind rows; the reverse relation uses the second kind.
  CHECK(stirling_first(2) == std::vector<Integer>{0, -1, 1});
  CHECK(stirling_second(3) == std::vector<Integer>{0, 1, 3, 1});
}

TEST_CASE("added-noise numbers") {
  const auto vac = added_noise_numbers(AncillaState::vacuum(), 4, 10);
  CHECK(vac.exact);
  CHECK(vac.at(1) == Rational(1, 2));
  CHECK(vac.at(2) == Rational(1, 2));
  CHECK(vac.at(3) == Rational(3, 4));
  CHECK(vac.at(4) == Rational(3, 2));
  const auto th = added_noise_numbers(AncillaState::thermal(1.0, 120), 4, 120);
  CHECK(th.value(2) == doctest::Approx(4.5).epsilon(1e-12));
  for (const Rational lam : {Rational(1, 4), Rational(-3, 5), Rational(0), Rational(7, 10)}) {
    const auto a = added_noise_numbers(gate::lambda_family(lam), 6, 10);
    for (int k = 1; k <= 6; ++k) {
      const Rational want = Rational(ifact(k)) / Rational(Integer(1) << k) * (1 + 2 * k * (lam + Rational(k + 1, 2)));
      CHECK(a.at(k) == want);
    }
  }
  const auto warn = added_noise_numbers(AncillaState::thermal(3.0, 30), 2, 30);
  CHECK(!warn.warnings.empty());
}

TEST_CASE("number and factorial moments") {
  const auto vac = number_moments(AncillaState::vacuum(), 5);
  for (int l = 1; l <= 5; ++l) CHECK(vac.at(l) == 0);
  for (const Rational lam : {Rational(1, 4), Rational(-1), Rational(0)}) {
    const auto m = number_moments(gate::lambda_family(lam), 7);
    for (int l = 1; l <= 7; ++l) CHECK(m.at(l) == lam + Rational(Integer(1) << (l - 1)));
  }
  CHECK(number_moments(gate::lambda_family(0.0), 2).at(2) == 2);
  const auto sigma = AncillaState::diagonal_exact({Rational(1, 5), Rational(1, 5), Rational(1, 5), Rational(2, 5)});
  const auto f = factorial_moments(sigma, 4);
  for (int m = 1; m <= 4; ++m) {
    Rational want = 0;
    for (int n = m; n < 4; ++n) want += sigma.exact_weights()->at(n) * Rational(ifact(n) / ifact(n - m));
    CHECK(f.at(m) == want);
  }
  CHECK(factorial_from_number(number_moments(sigma, 4)).at(3) == f.at(3));
}

TEST_CASE("conversions between added-noise numbers and number moments") {
  CHECK(ml_from_ak(added_noise_numbers(AncillaState::vacuum(), 6, 12)).at(3) == 0);
  CHECK(ml_from_ak(seq(MomentKind::added_noise, {Rational(1, 2)})).at(1) == 0);
  auto zero = ak_from_ml(seq(MomentKind::number, std::vector<Rational>(5, 0)));
  for (int k = 1; k <= 5; ++k) CHECK(zero.at(k) == Rational(ifact(k)) / Rational(Integer(1) << k));
  const auto th = number_moments(AncillaState::thermal(1.0, 200), 1);
  CHECK(ak_from_ml(th).value(1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS(ml_from_ak(seq(MomentKind::number, {1})));

  std::mt19937 rng(17);
  for (int t = 0; t < 20; ++t) {
    std::vector<Rational> v;
    for (int k = 0; k < 16; ++k) v.push_back(random_rational(rng));
    const auto a = seq(MomentKind::added_noise, v);
    const auto back = ak_from_ml(ml_from_ak(a));
    for (int k = 1; k <= 16; ++k) CHECK(back.at(k) == a.at(k));
    const auto m = seq(MomentKind::number, v);
    const auto back2 = ml_from_ak(ak_from_ml(m));
    for (int k = 1; k <= 16; ++k) CHECK(back2.at(k) == m.at(k));
    // First printed cases.
    const auto mm = ml_from_ak(a);
    CHECK(mm.at(1) == a.at(1) - Rational(1, 2));
    CHECK(mm.at(2) == a.at(2) - a.at(1));
    CHECK(mm.at(3) == a.at(3) - Rational(3, 2) * a.at(2) - Rational(1, 2) * a.at(1) + Rational(1, 4));
    CHECK(mm.at(4) == a.at(4) - 2 * a.at(3) - 2 * a.at(2) + 2 * a.at(1));
    const auto aa = ak_from_ml(m);
    CHECK(aa.at(3) == m.at(3) + Rational(3, 2) * m.at(2) + 2 * m.at(1) + Rational(3, 4));
    CHECK(aa.at(4) == m.at(4) + 2 * m.at(3) + 5 * m.at(2) + 4 * m.at(1) + Rational(3, 2));
  }
}

TEST_CASE("moment input-output relation") {
  const auto coh = coherent_noise_moments(4);
  const auto ideal = added_noise_numbers(AncillaState::vacuum(), 4, 10);
  CHECK(moment_io(coh, ideal, 4.0, 1).value(1) == doctest::Approx(15.5));
  const auto th = thermal_noise_moments(Rational(1, 3), 4);
  const auto same = moment_io(th, ideal, 1.0, 4);
  for (int k = 1; k <= 4; ++k) CHECK(same.value(k) == doctest::Approx(th.value(k)));
  CHECK(thermal_noise_moments(Rational(1), 4).at(3) == Rational(6) * Rational(27, 8));
}

TEST_CASE("invariant: quantum-limit floor on random physical ancillas") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> lv(1, 6), w(0, 20);
  for (int t = 0; t < 200; ++t) {
    const int levels = lv(rng);
    std::vector<Rational> weights;
    Integer total = 0;
    std::vector<int> raw;
    for (int i = 0; i < levels; ++i) {
      raw.push_back(w(rng));
      total += raw.back();
    }
    if (total == 0) continue;
    for (int r : raw) weights.push_back(Rational(r) / Rational(total));
    const auto sigma = AncillaState::diagonal_exact(weights);
    const auto a = added_noise_numbers(sigma, 4, 12);
    const bool vacuum = weights[0] == 1;
    for (int k = 1; k <= 4; ++k) {
      const Rational floor = Rational(ifact(k)) / Rational(Integer(1) << k);
      CHECK(a.at(k) >= floor);
      CHECK((a.at(k) == floor) == vacuum);
    }
  }
}

TEST_CASE("state moments") {
  const auto st = fock::coherent_state(cplx(0.6, -0.2), 40);
  CHECK(std::abs(mean_field(st) - cplx(0.6, -0.2)) < 1e-12);
  for (int k = 1; k <= 4; ++k)
    CHECK(noise_moment(st, k) == doctest::Approx(static_cast<double>(coherent_noise_moments(4).at(k))).epsilon(1e-9));
  const auto th = fock::thermal_state(0.5, 120);
  for (int k = 1; k <= 3; ++k)
    CHECK(noise_moment(th, k) == doctest::Approx(static_cast<double>(thermal_noise_moments(Rational(1, 2), 3).at(k))).epsilon(1e-10));
}

TEST_CASE("decimal strings and JSON") {
  CHECK(to_decimal(Rational(3, 4)) == "0.75");
  CHECK(to_decimal(Rational(-3, 2)) == "-1.5");
  CHECK(to_decimal(Rational(7)) == "7");
  CHECK(to_decimal(Rational(1, 3)) == "1/3");
  CHECK(parse_rational("0.75") == Rational(3, 4));
  CHECK(parse_rational("-1/3") == Rational(-1, 3));
  CHECK(parse_rational("1.5e2") == Rational(150));
  CHECK(parse_rational("2.5E-1") == Rational(1, 4));
  CHECK_THROWS(parse_rational("abc"));

  const auto a = added_noise_numbers(gate::lambda_family(Rational(1, 3)), 4, 10);
  const auto j = to_json(a);
  CHECK(j["kind"] == "added_noise");
  CHECK(j["K"] == 4);
  const auto back = moment_sequence_from_json(j);
  CHECK(back.kind == MomentKind::added_noise);
  CHECK(back.exact);
  for (int k = 1; k <= 4; ++k) CHECK(back.at(k) == a.at(k));

  // Strings and integers are exact; other JSON numbers count as measured reals.
  nlohmann::json measured = {{"kind", "number"}, {"K", 2}, {"values", {"0.25", 2}}};
  CHECK(moment_sequence_from_json(measured).exact);
  measured["values"] = {0.3, 0.5};
  CHECK_FALSE(moment_sequence_from_json(measured).exact);
  CHECK_THROWS(moment_sequence_from_json({{"kind", "number"}, {"K", 3}, {"values", {1, 2}}}));
  CHECK_THROWS(moment_sequence_from_json({{"kind", "number"}, {"K", 1}, {"values", {1}}, {"extra", 1}}));
  CHECK_THROWS(moment_sequence_from_json({{"kind", "bogus"}, {"K", 1}, {"values", {1}}}));
  CHECK(moment_kind_from_string("ak") == MomentKind::added_noise);
  CHECK(moment_kind_from_string("ml") == MomentKind::number);
}
