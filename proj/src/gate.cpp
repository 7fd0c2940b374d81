#include "linamp/gate.hpp"

#include <cmath>

namespace linamp::gate {

using moments::MomentKind;
using moments::MomentSequence;

namespace {

double hadamard_bound(const RationalMatrix& m) {
  double b = 1.0;
  for (const auto& row : m) {
    double s = 0.0;
    for (const auto& x : row) {
      const double d = static_cast<double>(x);
      s += d * d;
    }
    b *= std::sqrt(s);
  }
  return b;
}

int sign_of(const Rational& det, const RationalMatrix& m, bool exact, double zero_tol) {
  if (!exact) {
    const double scale = zero_tol * static_cast<double>(m.size()) * hadamard_bound(m);
    if (std::abs(static_cast<double>(det)) <= scale) return 0;
  }
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

}  // namespace

std::string to_string(GateStatus s) {
  switch (s) {
    case GateStatus::physical_infinite_support: return "physical_infinite_support";
    case GateStatus::physical_finite_support: return "physical_finite_support";
    case GateStatus::unphysical: return "unphysical";
    case GateStatus::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string to_string(Which w) {
  switch (w) {
    case Which::q0: return "Q0";
    case Which::q1: return "Q1";
    case Which::eigenvalue: return "eigenvalue";
    case Which::trace: return "trace";
  }
  return "Q0";
}

bool is_physical(GateStatus s) {
  return s == GateStatus::physical_infinite_support || s == GateStatus::physical_finite_support;
}

HankelPair hankel_pair(const MomentSequence& M, int k) {
  if (M.kind != MomentKind::number) throw std::invalid_argument("Hankel matrices need number moments");
  if (k < 0) throw std::invalid_argument("Hankel order must be nonnegative");
  if (M.order() < 2 * k + 1)
    throw std::invalid_argument("insufficient moments: order " + std::to_string(k) + " needs M_1..M_" +
                                std::to_string(2 * k + 1));
  HankelPair h;
  h.k = k;
  h.Q0.assign(k + 1, std::vector<Rational>(k + 1));
  h.Q1.assign(k + 1, std::vector<Rational>(k + 1));
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j) {
      h.Q0[i][j] = M.at(i + j);
      h.Q1[i][j] = M.at(i + j + 1);
    }
  return h;
}

Rational determinant(RationalMatrix m) {
  const size_t n = m.size();
  Rational det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const Rational f = m[r][c] / m[c][c];
      for (size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return det;
}

GateVerdict stieltjes_classify(const MomentSequence& M, int K, double zero_tol) {
  GateVerdict v;
  v.horizon = K;
  v.exact = M.exact;
  v.zero_tol = zero_tol;
  bool seen_zero = false, decided = false;
  for (int k = 0; k <= K; ++k) {
    const HankelPair h = hankel_pair(M, k);
    for (Which w : {Which::q0, Which::q1}) {
      const RationalMatrix& q = w == Which::q0 ? h.Q0 : h.Q1;
      DeterminantRecord rec{k, w, determinant(q), 0};
      rec.sign = sign_of(rec.value, q, M.exact, zero_tol);
      v.determinants.push_back(rec);
      if (decided) continue;
      if (rec.sign < 0 || (seen_zero && rec.sign > 0)) {
        v.status = GateStatus::unphysical;
        v.first_violation = Violation{k, w, 2 * k + (w == Which::q1 ? 1 : 0)};
        decided = true;
      } else if (rec.sign == 0) {
        seen_zero = true;
      }
    }
  }
  if (!decided) {
    if (!seen_zero)
      v.status = GateStatus::physical_infinite_support;
    else
      v.status = v.determinants.back().sign == 0 &&
                         v.determinants[v.determinants.size() - 2].sign != 0
                     ? GateStatus::indeterminate
                     : GateStatus::physical_finite_support;
  }
  return v;
}

std::vector<LimitCheck> closed_form_limits(const MomentSequence& A) {
  if (A.kind != MomentKind::added_noise) throw std::invalid_argument("closed-form limits need added-noise numbers");
  if (A.order() < 4) throw std::invalid_argument("closed-form limits need A_1..A_4");
  const Rational a1 = A.at(1), a2 = A.at(2), a3 = A.at(3), a4 = A.at(4);
  const Rational half(1, 2), quarter(1, 4);
  std::vector<LimitCheck> out(4);
  auto settle = [](LimitCheck& c) {
    c.holds = c.margin > 0;
    c.boundary = c.margin == 0;
    if (c.boundary) c.note = "equality";
  };

  out[0].margin = a1 - half;
  settle(out[0]);

  out[1].margin = a2 - a1 * a1 - quarter;
  settle(out[1]);

  const Rational d3 = a1 - half;
  if (d3 == 0) {
    out[2].boundary = true;
    out[2].note = "boundary: see case (ii)";
  } else {
    const Rational num = a2 - a1;
    out[2].margin = d3 * (a3 - half * (3 * a2 + a1 - half)) - num * num;
    settle(out[2]);
  }

  const Rational d4 = a2 - a1 * a1 - quarter;
  if (d4 == 0) {
    out[3].boundary = true;
    out[3].note = "boundary: see case (ii)";
  } else {
    const Rational m2 = a2 - a1;
    const Rational frac = m2 * m2 * m2 + Rational(1, 16) * (4 * a3 - 6 * a2 - 2 * a1 + 1) *
                                             (8 * a1 * (a1 - a2) + 4 * a3 - 2 * a2 - 6 * a1 + 1);
    out[3].margin = d4 * (a4 - 2 * (a3 + a2 - a1)) - frac;
    settle(out[3]);
  }
  return out;
}

GateVerdict sigma_eigen_check(const fock::AncillaState& sigma, double tol) {
  GateVerdict v;
  v.exact = false;
  v.zero_tol = tol;
  std::vector<double> eig;
  double trace = 0.0;
  if (sigma.is_diagonal()) {
    eig = sigma.weights();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma.dense(sigma.levels()),
                                                       Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i) eig.push_back(es.eigenvalues()(i));
  }
  for (double e : eig) trace += e;
  v.eigenvalues = eig;
  v.status = GateStatus::physical_finite_support;
  for (size_t i = 0; i < eig.size(); ++i)
    if (eig[i] < -tol) {
      v.status = GateStatus::unphysical;
      v.first_violation = Violation{static_cast<int>(i), Which::eigenvalue, 0};
      return v;
    }
  if (std::abs(trace - 1.0) > tol) {
    v.status = GateStatus::unphysical;
    v.first_violation = Violation{0, Which::trace, 0};
  }
  return v;
}

fock::AncillaState lambda_family(const Rational& lambda) {
  return fock::AncillaState::diagonal_exact({Rational(1, 2) - lambda, lambda, Rational(1, 2)});
}

fock::AncillaState lambda_family(double lambda) { return lambda_family(Rational(lambda)); }

nlohmann::json to_json(const GateVerdict& v) {
  nlohmann::json j;
  j["status"] = to_string(v.status);
  j["horizon"] = v.horizon;
  j["exact"] = v.exact;
  j["zero_tol"] = v.zero_tol;
  if (v.first_violation)
    j["first_violation"] = {{"k", v.first_violation->k},
                            {"matrix", to_string(v.first_violation->which)},
                            {"constraint", v.first_violation->constraint}};
  else
    j["first_violation"] = nullptr;
  nlohmann::json dets = nlohmann::json::array();
  for (const auto& d : v.determinants)
    dets.push_back({{"k", d.k}, {"matrix", to_string(d.which)},
                    {"value", moments::to_decimal(d.value)}, {"sign", d.sign}});
  j["determinants"] = dets;
  if (!v.eigenvalues.empty()) j["eigenvalues"] = v.eigenvalues;
  return j;
}

nlohmann::json to_json(const std::vector<LimitCheck>& limits) {
  nlohmann::json arr = nlohmann::json::array();
  for (size_t i = 0; i < limits.size(); ++i) {
    nlohmann::json c{{"index", i + 1}, {"holds", limits[i].holds}, {"boundary", limits[i].boundary}};
    if (limits[i].note.rfind("boundary", 0) != 0) c["margin"] = moments::to_decimal(limits[i].margin);
    if (!limits[i].note.empty()) c["note"] = limits[i].note;
    arr.push_back(c);
  }
  return arr;
}

}  // namespace linamp::gate
