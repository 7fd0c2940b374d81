#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "linamp/fock.hpp"
#include "linamp/moments.hpp"

namespace linamp::gate {

using RationalMatrix = std::vector<std::vector<Rational>>;

struct HankelPair {
  int k = 0;
  RationalMatrix Q0;  // entries M_{i+j}
  RationalMatrix Q1;  // entries M_{i+j+1}
};

HankelPair hankel_pair(const moments::MomentSequence& M, int k);
Rational determinant(RationalMatrix m);

enum class GateStatus { physical_infinite_support, physical_finite_support, unphysical, indeterminate };
enum class Which { q0, q1, eigenvalue, trace };

std::string to_string(GateStatus s);
std::string to_string(Which w);

// Determinants are walked in the order Q0_0, Q1_0, Q0_1, Q1_1, ...; the
// constraint number of (k, Q0) is 2k and of (k, Q1) is 2k + 1.
struct DeterminantRecord {
  int k = 0;
  Which which = Which::q0;
  Rational value;
  int sign = 0;  // after the zero test
};

struct Violation {
  int k = 0;
  Which which = Which::q0;
  int constraint = 0;
};

struct GateVerdict {
  GateStatus status = GateStatus::indeterminate;
  std::optional<Violation> first_violation;
  std::vector<DeterminantRecord> determinants;
  std::vector<double> eigenvalues;  // only for sigma_eigen_check
  int horizon = 0;
  bool exact = true;
  double zero_tol = 0.0;
};

bool is_physical(GateStatus s);

// Exact moments are judged exactly. For inexact moments a determinant counts
// as zero when |det| <= zero_tol * n * (product of row norms).
GateVerdict stieltjes_classify(const moments::MomentSequence& M, int K, double zero_tol = 1e-9);

struct LimitCheck {
  bool holds = false;
  bool boundary = false;  // equality, or a vanishing guarded denominator
  Rational margin;        // cleared-denominator left side minus right side
  std::string note;
};

std::vector<LimitCheck> closed_form_limits(const moments::MomentSequence& A);

GateVerdict sigma_eigen_check(const fock::AncillaState& sigma, double tol);

// (1/2 - lambda)|0><0| + lambda|1><1| + 1/2|2><2|, with exact weights.
fock::AncillaState lambda_family(double lambda);
fock::AncillaState lambda_family(const Rational& lambda);

nlohmann::json to_json(const GateVerdict& v);
nlohmann::json to_json(const std::vector<LimitCheck>& limits);

}  // namespace linamp::gate
