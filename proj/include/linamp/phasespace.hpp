#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "linamp/fock.hpp"

namespace linamp::phase {

class SOrder {
 public:
  explicit SOrder(double s);
  double s() const { return s_; }
  bool operator==(const SOrder& o) const { return s_ == o.s_; }

 private:
  double s_;
};

inline const SOrder NORMAL{1.0};
inline const SOrder SYMMETRIC{0.0};
inline const SOrder ANTINORMAL{-1.0};

// Uniform sampling of [-B, B) x [-B, B) with coordinates -B + i h, h = 2B/steps.
// The measure is d^2beta = dRe dIm, so each sample carries weight h^2.
class PhaseGrid {
 public:
  PhaseGrid(double extent, int steps);
  double extent() const { return extent_; }
  int steps() const { return steps_; }
  double step() const { return 2.0 * extent_ / steps_; }
  double coord(int i) const { return -extent_ + i * step(); }
  double weight() const { return step() * step(); }
  cplx point(int i, int j) const { return {coord(i), coord(j)}; }
  std::vector<double> coords() const;

 private:
  double extent_;
  int steps_;
};

enum class PhaseKind { characteristic, quasidistribution };

struct PhaseFunction {
  PhaseGrid grid;
  PhaseKind kind;
  SOrder order;
  Eigen::MatrixXcd values;  // values(i, j) at grid.point(i, j)
  std::vector<std::string> flags;

  cplx at(int i, int j) const { return values(i, j); }
  // Bilinear interpolation; throws std::out_of_range outside the samples.
  cplx interpolate(cplx z) const;
  cplx integral() const { return values.sum() * grid.weight(); }
  bool flagged(const std::string& prefix) const;
};

inline const std::string kUnconvergedTail = "distributional: unconverged tail";
inline const std::string kSeriesTruncation = "series truncation";

// tr(rho D(beta)) e^{s|beta|^2/2}.
cplx char_fn(const fock::FockOperator& state, SOrder order, cplx beta);
PhaseFunction char_grid(const fock::FockOperator& state, SOrder order, const PhaseGrid& grid);

// Quasidistribution sampled on `grid`; the characteristic function is sampled
// internally on a grid widened until it decays below 1e-10.
PhaseFunction quasidist(const fock::FockOperator& state, SOrder order, const PhaseGrid& grid);

// W(alpha) = int d^2beta/pi^2 Phi(beta) D(beta, alpha) on the trapezoid rule.
PhaseFunction quasidist_from_char(const PhaseFunction& chr, const PhaseGrid& out);
// Phi(beta) = int d^2alpha W(alpha) D(alpha, beta).
PhaseFunction char_from_quasidist(const PhaseFunction& qd, const PhaseGrid& out);
// rho = int d^2beta/pi Phi^(0)(beta) D(-beta).
fock::FockOperator state_from_char(const PhaseFunction& chr, int dim);

// Phi_sigma^(s)(sqrt(g^2-1) beta^*).
cplx added_noise_char(const fock::AncillaState& sigma, double g, SOrder order, cplx beta);
// Pointwise series for diagonal sigma and s < 1.
double added_noise_value(const fock::AncillaState& sigma, double g, SOrder order, cplx alpha);
PhaseFunction added_noise_fn(const fock::AncillaState& sigma, double g, SOrder order,
                             const PhaseGrid& grid);

// Header comment lines, then alpha_re,alpha_im,value_re,value_im rows.
void write_csv(std::ostream& os, const PhaseFunction& f,
               const std::vector<std::string>& extra_header = {});
void write_csv_points(std::ostream& os, const std::vector<cplx>& points,
                      const std::vector<cplx>& values, const std::vector<std::string>& header);

}  // namespace linamp::phase
