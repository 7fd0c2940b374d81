// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "linamp/ampmap.hpp"
#include "linamp/figures.hpp"
#include "linamp/fock.hpp"
#include "linamp/gate.hpp"
#include "linamp/moments.hpp"
#include "linamp/phasespace.hpp"

using namespace linamp;
using ampmap::AmplifierSpec;
using fock::AncillaState;
using fock::FockOperator;
using moments::Integer;
using moments::MomentKind;
using moments::MomentSequence;
using phase::PhaseGrid;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double husimi(const FockOperator& rho, cplx alpha) {
  const Eigen::VectorXcd c = fock::coherent_vector(alpha, rho.dim());
  return (c.adjoint() * rho.matrix() * c)(0, 0).real() / std::numbers::pi;
}

double sym_var(const FockOperator& rho) {
  const auto ops = fock::mode_ops(rho.dim());
  const cplx mean = (rho.matrix() * ops.a.matrix()).trace();
  return (rho.matrix() * ops.num.matrix()).trace().real() - std::norm(mean) + 0.5;
}

Rational lam_grid(int i) { return Rational(-8, 5) + Rational(i, 20); }

MomentSequence seq(MomentKind kind, std::vector<Rational> v) {
  MomentSequence m;
  m.kind = kind;
  m.values = std::move(v);
  return m;
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double g = 2.0;
  const FockOperator rho = fock::coherent_state(0.5, 60);
  const PhaseGrid grid(10.0, 100);
  const auto qin = phase::quasidist(rho, phase::ANTINORMAL, grid);
  const auto qout = ampmap::quasidist_io(qin, AmplifierSpec::ideal(g), phase::ANTINORMAL);
  double worst = 0.0;
  for (int i = 0; i < grid.steps(); ++i)
    for (int j = 0; j < grid.steps(); ++j)
      worst = std::max(worst, std::abs(qout.at(i, j).real() - husimi(rho, grid.point(i, j) / g) / (g * g)));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-6 && secs < 30.0, fmt("max deviation %.3e (tol 1e-6), runtime %.1f s (limit 30 s)", worst, secs)};
}

Outcome c2() {
  bool ok = true;
  std::string d;
  const FockOperator rho = fock::coherent_state(cplx(0.5, 0.2), 20);
  for (double g : {1.25, 2.0, 4.0}) {
    const AmplifierSpec spec = AmplifierSpec::ideal(g);
    const double want = g * g - 0.5;
    const double eh = std::abs(ampmap::heisenberg_output_moments(rho.resized(120), spec).symmetric_variance - want) / want;
    const auto run = ampmap::parametric_run(rho, spec, {120, 0});
    const double es = std::abs(sym_var(run.state) - want) / want;
    // At g = 4 the output state does not fit dim 120; the Heisenberg route carries the check.
    ok = ok && eh < 1e-6 && (g > 3.0 || es < 1e-6);
    d += fmt("g=%.2f heisenberg %.1e", g, eh) + fmt(", state %.1e", es);
    if (!run.cert.within(1e-9)) d += fmt(" (state trace defect %.1e)", run.cert.trace_defect);
    d += "; ";
  }
  return {ok, d + "relative tol 1e-6"};
}

Outcome c3() {
  const double g = 1.25;
  const int dim = 80;
  const auto p = fock::SqueezeParams::from_gain(g);
  const double b_out = 6.4;
  const int steps = 128;
  const PhaseGrid in_grid(g * b_out, steps);
  double worst = 0.0;
  for (const auto& [label, sigma] : std::vector<std::pair<std::string, AncillaState>>{
           {"vacuum", AncillaState::vacuum()},
           {"lambda 0.25", gate::lambda_family(Rational(1, 4))},
           {"|1>", AncillaState::number(1)}}) {
    for (const cplx beta : {cplx(0.5, 0.0), cplx(-0.2, 0.35)}) {
      const FockOperator rho = fock::coherent_state(beta, dim);
      const auto kraus = fock::squeeze_kraus_general(p, sigma, 60, dim);
      const FockOperator kout = fock::apply_kraus(kraus, rho);
      const auto chr = phase::char_grid(fock::coherent_state(beta, 30), phase::SYMMETRIC, in_grid);
      const auto cout = ampmap::char_io(chr, AmplifierSpec(g, sigma), phase::SYMMETRIC);
      const FockOperator sout = phase::state_from_char(cout, dim);
      worst = std::max(worst, fock::trace_distance(kout, sout));
    }
  }
  return {worst < 1e-7, fmt("max trace distance %.3e over 3 ancillas x 2 inputs (tol 1e-7)", worst)};
}

Outcome c4() {
  const double g = 2.0;
  const int dim = 90;
  const FockOperator vac = fock::number_state(0, 4);
  ampmap::MasterStats st;
  const auto me = ampmap::master_evolve(vac, {1.0, 2.0 * std::log(g)}, dim, &st);
  const auto ref = ampmap::parametric_apply(vac, AmplifierSpec::ideal(g), {dim, 0});
  const double d = fock::trace_distance(me, ref);
  return {d < 1e-5, fmt("trace distance %.3e (tol 1e-5), %.0f accepted steps", d, st.accepted)};
}

Outcome c5() {
  const double g = 4.0;
  const cplx beta(0.3, 0.0);
  const int dim = 300;
  const PhaseGrid grid(g * (std::abs(beta) + 6.0), 124);
  const FockOperator rho = fock::coherent_state(beta, 20);
  const auto ak = ampmap::measurement_model_apply(rho, g, ampmap::MeasurementVariant::arthurs_kelly, grid, dim);
  const auto id = ampmap::measurement_model_apply(rho, g, ampmap::MeasurementVariant::ideal, grid, dim);
  const double a_ak = (sym_var(ak) - 0.5 * g * g) / (g * g - 1.0);
  const double a_id = (sym_var(id) - 0.5 * g * g) / (g * g - 1.0);
  const double want = (g * g + 1.0) / (2.0 * (g * g - 1.0));
  const double e1 = std::abs(a_ak - want), e2 = std::abs(a_id - 0.5);
  return {e1 < 1e-4 && e2 < 1e-4,
          fmt("Arthurs-Kelly A1 error %.2e, ideal A1 error %.2e (tol 1e-4)", e1, e2)};
}

Outcome c6() {
  bool ok = true;
  const auto s1 = moments::StirlingTable(moments::StirlingKind::first_signed, 12);
  const auto s2 = moments::StirlingTable(moments::StirlingKind::second, 12);
  for (int k = 0; k <= 12; ++k)
    for (int m = 0; m <= 12; ++m) {
      Integer a = 0, b = 0;
      for (int l = 0; l <= 12; ++l) {
        a += s1(k, l) * s2(l, m);
        b += s2(k, l) * s1(l, m);
      }
      ok = ok && a == (k == m ? 1 : 0) && b == (k == m ? 1 : 0);
    }
  // |b|^{2k} as a polynomial in b^dag b, checked on the exact diagonal.
  const std::vector<std::vector<Rational>> sym_in_number = {
      {Rational(1, 2), 1}, {Rational(1, 2), 1, 1}, {Rational(3, 4), 2, Rational(3, 2), 1}, {Rational(3, 2), 4, 5, 2, 1}};
  for (int k = 1; k <= 4; ++k)
    for (int n = 0; n <= 20; ++n) {
      Rational v = 0, p = 1;
      for (const auto& c : sym_in_number[k - 1]) {
        v += c * p;
        p *= n;
      }
      ok = ok && v == moments::sym_product_diagonal(k, n);
    }
  // (b^dag b)^l in terms of the symmetric products through the conversion map.
  const std::vector<std::vector<Rational>> number_in_sym = {
      {Rational(-1, 2), 1}, {0, -1, 1}, {Rational(1, 4), Rational(-1, 2), Rational(-3, 2), 1}, {0, 2, -2, -2, 1}};
  const auto zero = moments::ml_from_ak(seq(MomentKind::added_noise, std::vector<Rational>(4, 0)));
  for (int l = 1; l <= 4; ++l) ok = ok && zero.at(l) == number_in_sym[l - 1][0];
  for (int m = 1; m <= 4; ++m) {
    std::vector<Rational> e(4, 0);
    e[m - 1] = 1;
    const auto mm = moments::ml_from_ak(seq(MomentKind::added_noise, e));
    for (int l = 1; l <= 4; ++l) ok = ok && mm.at(l) - zero.at(l) == (m <= l ? number_in_sym[l - 1][m] : Rational(0));
  }
  return {ok, ok ? "Stirling inverse exact to order 12; k, l = 1..4 expansions exact" : "mismatch"};
}

Outcome c7() {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> lv(1, 6), w(0, 30);
  int violations = 0, equalities = 0, vacua = 0;
  for (int t = 0; t < 1000; ++t) {
    const int levels = lv(rng);
    std::vector<int> raw(levels);
    int total = 0;
    for (int& r : raw) total += (r = w(rng));
    if (total == 0) raw[0] = total = 1;
    std::vector<Rational> weights;
    for (int r : raw) weights.push_back(Rational(r, total));
    const bool vacuum = weights[0] == 1;
    vacua += vacuum;
    const auto a = moments::added_noise_numbers(AncillaState::diagonal_exact(weights), 4, 12);
    Rational fact = 1, pow2 = 1;
    for (int k = 1; k <= 4; ++k) {
      fact *= k;
      pow2 *= 2;
      const Rational floor = fact / pow2;
      if (a.at(k) < floor) ++violations;
      if (a.at(k) == floor && !vacuum) ++equalities;
      if (vacuum && a.at(k) != floor) ++violations;
    }
  }
  const auto vac = moments::added_noise_numbers(AncillaState::vacuum(), 4, 12);
  const bool vac_eq = vac.at(1) == Rational(1, 2) && vac.at(4) == Rational(3, 2);
  const bool ok = violations == 0 && equalities == 0 && vac_eq;
  return {ok, fmt("1000 ancillas (%.0f vacuum): %.0f violations", vacua, violations) +
                  fmt(", %.0f non-vacuum equalities", equalities, 0)};
}

Outcome c8() {
  double worst = 0.0;
  for (double nbar : {0.5, 1.0, 2.0}) {
    const auto a = moments::added_noise_numbers(AncillaState::thermal(nbar, 120), 4, 120);
    double fact = 1.0;
    for (int k = 1; k <= 4; ++k) {
      fact *= k;
      const double want = fact * std::pow(nbar + 0.5, k);
      worst = std::max(worst, std::abs(a.value(k) - want) / want);
    }
  }
  return {worst < 1e-9, fmt("max relative error %.3e (tol 1e-9)", worst)};
}

Outcome c9() {
  int bad_class = 0, bad_limits = 0;
  const double s5 = std::sqrt(5.0);
  for (int i = 0; i <= 48; ++i) {
    const Rational lam = lam_grid(i);
    const double l = static_cast<double>(lam);
    const auto v = gate::stieltjes_classify(moments::number_moments(gate::lambda_family(lam), 9), 4);
    if (gate::is_physical(v.status) != (lam >= 0 && lam <= Rational(1, 2))) ++bad_class;
    const auto lim = gate::closed_form_limits(moments::added_noise_numbers(gate::lambda_family(lam), 4, 10));
    if (lim[0].holds != (lam > -1)) ++bad_limits;
    if (lim[1].holds != (-(1 + s5) / 2 < l && l < (s5 - 1) / 2)) ++bad_limits;
    if (lim[2].holds != (lam > 0)) ++bad_limits;
    if (lim[3].holds != (lam * (Rational(1, 2) - lam) > 0)) ++bad_limits;
  }
  return {bad_class == 0 && bad_limits == 0,
          fmt("49 samples: %.0f classification mismatches, %.0f constraint mismatches", bad_class, bad_limits)};
}

Outcome c10() {
  const double want = -(1.0 + std::sqrt(3.0)) / 2.0;
  const double th = figures::negativity_threshold(2.0, -1.6, -1.2, 1e-12);
  const double e = std::abs(th - want);
  return {e < 1e-6, fmt("boundary at %.10f, error %.2e (tol 1e-6)", th, e)};
}

Outcome c11() {
  const double g = 1.5;
  const int dim = 100, K = 3;
  const auto sigma = AncillaState::thermal(0.5, 60);
  const auto A = moments::added_noise_numbers(sigma, K, 60);
  const FockOperator out = ampmap::parametric_apply(fock::coherent_state(cplx(0.4, -0.1), 30), AmplifierSpec(g, sigma), {dim, 0});
  const auto pred = moments::moment_io(moments::coherent_noise_moments(K), A, g, K);
  const cplx mean = (out.matrix() * fock::mode_ops(dim).a.matrix()).trace();
  const Eigen::MatrixXcd d = fock::displacement_matrix(-mean, dim).matrix();
  const Eigen::MatrixXcd centered = d * out.matrix() * d.adjoint();
  double worst = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double direct = (centered * moments::sym_product_operator(k, dim).matrix()).trace().real();
    worst = std::max(worst, std::abs(direct - pred.value(k)) / pred.value(k));
  }
  return {worst < 1e-6, fmt("max relative error %.3e over k = 1..3 (tol 1e-6)", worst)};
}

Outcome c12() {
  const double l = figures::center_max_transition(2.0, 0.15, 0.30, 1e-9);
  return {std::abs(l - 0.22) <= 0.005, fmt("transition at lambda = %.5f (target 0.22 +- 0.005)", l)};
}

}  // namespace

int main() {
  report(1, "ideal Q scaling", c1);
  report(2, "ideal output-noise floor g^2 - 1/2", c2);
  report(3, "Kraus route vs characteristic-function route", c3);
  report(4, "master equation vs parametric channel", c4);
  report(5, "measurement-based model added noise", c5);
  report(6, "Stirling identity and printed expansions", c6);
  report(7, "added-noise-number floor k!/2^k", c7);
  report(8, "thermal ancilla closed form", c8);
  report(9, "sigma(lambda) gate boundaries", c9);
  report(10, "P-function nonnegativity window", c10);
  report(11, "moment input-output relation", c11);
  report(12, "center maximum transition", c12);
  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
