#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace linamp {

using cplx = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

}  // namespace linamp

namespace linamp::fock {

// Operator on the truncated number basis |0>..|dim-1>. Two-mode operators use
// the tensor index n_a * dim_b + n_b.
class FockOperator {
 public:
  FockOperator() = default;
  explicit FockOperator(Eigen::MatrixXcd m);

  static FockOperator identity(int dim);
  static FockOperator zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }
  cplx trace() const { return m_.trace(); }

  // Copy into a larger (zero padded) or smaller (cropped) basis.
  FockOperator resized(int dim) const;

 private:
  Eigen::MatrixXcd m_;
};

struct TruncationCertificate {
  int dim = 0;
  double trace_defect = 0.0;    // |1 - tr(rho_out)|
  double top_population = 0.0;  // population of the top 10% of levels
  bool within(double tol) const { return trace_defect <= tol; }
};

class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, TruncationCertificate cert)
      : std::runtime_error(what), cert_(cert) {}
  const TruncationCertificate& certificate() const { return cert_; }

 private:
  TruncationCertificate cert_;
};

struct ChannelResult {
  FockOperator state;
  TruncationCertificate cert;
};

TruncationCertificate certify(const FockOperator& rho);

struct SqueezeParams {
  double r = 0.0;
  double g = 1.0;
  double c = 0.0;  // sqrt(g^2 - 1) = sinh r

  static SqueezeParams from_gain(double g);
  static SqueezeParams from_r(double r);
};

// Ancilla state sigma. Positivity is not assumed.
class AncillaState {
 public:
  static AncillaState diagonal(std::vector<double> weights);
  static AncillaState diagonal_exact(std::vector<Rational> weights);
  static AncillaState from_matrix(const Eigen::MatrixXcd& sigma);
  static AncillaState vacuum();
  static AncillaState number(int n);
  // Truncated to dim levels and renormalized; the discarded tail is kept.
  static AncillaState thermal(double nbar, int dim);

  bool is_diagonal() const { return !dense_.has_value(); }
  int levels() const { return static_cast<int>(weights_.size()); }
  // Diagonal entries; for a matrix state the real part of its diagonal.
  const std::vector<double>& weights() const { return weights_; }
  const std::optional<std::vector<Rational>>& exact_weights() const { return exact_; }
  double truncated_mass() const { return truncated_mass_; }
  Eigen::MatrixXcd dense(int dim) const;

 private:
  std::vector<double> weights_;
  std::optional<std::vector<Rational>> exact_;
  std::optional<Eigen::MatrixXcd> dense_;
  double truncated_mass_ = 0.0;
};

double laguerre(int n, double x);
// L_n^{(k)}(x) for n = 0..n_max.
std::vector<double> laguerre_row(int n_max, int k, double x);

struct ModeOps {
  FockOperator a, adag, num;
};
ModeOps mode_ops(int dim);

// exp(alpha a^dag - alpha^* a) of the truncated generator. If warnings is
// given, a message is appended when the untruncated columns of the
// lowest quarter of levels lose norm past the top level.
FockOperator displacement_matrix(cplx alpha, int dim,
                                 std::vector<std::string>* warnings = nullptr);
// Untruncated matrix elements <m|D(alpha)|n> for m, n < dim.
Eigen::MatrixXcd displacement_elements(cplx alpha, int dim);

Eigen::VectorXcd number_vector(int n, int dim);
Eigen::VectorXcd coherent_vector(cplx beta, int dim);
FockOperator number_state(int n, int dim);
FockOperator coherent_state(cplx beta, int dim);
FockOperator thermal_state(double nbar, int dim);

double trace_distance(const FockOperator& x, const FockOperator& y);

// tr_b(S rho (x) sigma S^dag) through the factored squeeze operator.
// dims = (dim_a, dim_b); zero entries select dim_a = rho.dim() and
// dim_b = dim_a + sigma.levels().
ChannelResult two_mode_squeeze_run(const FockOperator& rho, const AncillaState& sigma,
                                   const SqueezeParams& p, std::pair<int, int> dims = {0, 0});
// As above, throwing TruncationError when the trace defect exceeds tol.
FockOperator two_mode_squeeze_apply(const FockOperator& rho, const AncillaState& sigma,
                                    const SqueezeParams& p, std::pair<int, int> dims = {0, 0},
                                    double tol = 1e-6);

// <j, n| S |k, m>; zero unless j - n = k - m.
double squeeze_element(const SqueezeParams& p, int j, int n, int k, int m);

struct KrausSet {
  std::vector<FockOperator> elements;
  std::vector<int> signs;  // -1 where the ancilla weight is negative
  std::string label;
  bool completely_positive = true;
};

KrausSet squeeze_kraus_vacuum(const SqueezeParams& p, int n_max, int dim);
KrausSet squeeze_kraus_general(const SqueezeParams& p, const AncillaState& sigma, int n_max,
                               int dim);
FockOperator apply_kraus(const KrausSet& k, const FockOperator& rho);
// Largest column norm of sum sign E^dag E - 1 over the first `interior` columns.
double completeness_defect(const KrausSet& k, int interior);

// a_out = g a - sqrt(g^2-1) b^dag on the two-mode space dim_a x dim_b.
FockOperator amplified_mode_operator(const SqueezeParams& p, int dim_a, int dim_b);

}  // namespace linamp::fock
