#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "linamp/fock.hpp"

namespace linamp::moments {

using Integer = boost::multiprecision::cpp_int;

inline constexpr int kStirlingGuard = 64;

enum class StirlingKind { first_signed, second };

// Row k holds entries for l = 0..k.
class StirlingTable {
 public:
  StirlingTable(StirlingKind kind, int max_order);
  StirlingKind kind() const { return kind_; }
  int max_order() const { return static_cast<int>(rows_.size()) - 1; }
  // Zero outside the triangle.
  const Integer& operator()(int row, int col) const;

 private:
  StirlingKind kind_;
  std::vector<std::vector<Integer>> rows_;
};

// Signed first kind: (x)_k = x(x-1)...(x-k+1) = sum_l S_k^(l) x^l, l = 0..k.
std::vector<Integer> stirling_first(int k);
// Second kind from the alternating binomial sum, entries k = 0..l.
std::vector<Integer> stirling_second(int l);

// noise: symmetric moments <|Delta a|^{2k}> of a signal mode.
enum class MomentKind { added_noise, number, factorial, noise };

struct MomentSequence {
  MomentKind kind = MomentKind::number;
  std::vector<Rational> values;  // values[k-1] is the k-th moment; the zeroth is 1
  bool exact = true;             // false when the entries come from measured or rounded reals
  std::vector<std::string> warnings;

  int order() const { return static_cast<int>(values.size()); }
  Rational at(int k) const;
  double value(int k) const { return static_cast<double>(at(k)); }
};

std::string to_string(MomentKind kind);
MomentKind moment_kind_from_string(const std::string& s);

MomentSequence coherent_noise_moments(int K);
MomentSequence thermal_noise_moments(const Rational& nbar, int K);

// <n| |b|^{2k} |n>, exactly.
Rational sym_product_diagonal(int k, int n);
fock::FockOperator sym_product_operator(int k, int dim);

MomentSequence added_noise_numbers(const fock::AncillaState& sigma, int K, int dim);
MomentSequence number_moments(const fock::AncillaState& sigma, int K);
MomentSequence factorial_moments(const fock::AncillaState& sigma, int K);
MomentSequence factorial_from_number(const MomentSequence& M);

MomentSequence ml_from_ak(const MomentSequence& A);
MomentSequence ak_from_ml(const MomentSequence& M);

MomentSequence moment_io(const MomentSequence& input_moments, const MomentSequence& A, double g,
                         int K);

cplx mean_field(const fock::FockOperator& state);
// <|Delta a|^{2k}> of a state, computed after displacing it back by <a>.
double noise_moment(const fock::FockOperator& state, int k);

// Terminating decimal when the denominator allows it, "p/q" otherwise.
std::string to_decimal(const Rational& q);
Rational parse_rational(const std::string& s);

nlohmann::json to_json(const MomentSequence& m);
MomentSequence moment_sequence_from_json(const nlohmann::json& j);

}  // namespace linamp::moments
