#pragma once

#include <utility>

#include "linamp/fock.hpp"
#include "linamp/phasespace.hpp"

namespace linamp::ampmap {

struct AmplifierSpec {
  double g;
  double r;
  fock::AncillaState sigma;

  AmplifierSpec(double gain, fock::AncillaState s);
  static AmplifierSpec ideal(double gain);
  // Squeeze-parameter form; admits r so small that cosh r rounds to 1.
  static AmplifierSpec from_squeeze(double r, fock::AncillaState s);
  fock::SqueezeParams squeeze() const;
};

struct MasterEqParams {
  double gamma;
  double t;
  double gain() const;
};

struct MasterStats {
  int accepted = 0;
  int rejected = 0;
  fock::TruncationCertificate cert;
};

// A(D(beta)) = coeff D(beta_out).
struct DisplacementImage {
  double coeff;
  cplx beta_out;
};
DisplacementImage map_A_on_displacement(cplx beta, double g);
// Eigenvalue of B on D(beta).
cplx map_B_on_displacement(cplx beta, const AmplifierSpec& spec);
// Eigenvalue of B' (noise referred to the input), so that B A = A B'.
cplx map_B_referred_on_displacement(cplx beta, const AmplifierSpec& spec);

struct ChannelImage {
  cplx coeff;
  cplx beta_out;
};
ChannelImage map_E_on_displacement(cplx beta, const AmplifierSpec& spec);

// Output characteristic function on the grid of extent B_in / g, so that
// g beta lands on input samples.
phase::PhaseFunction char_io(const phase::PhaseFunction& input_char, const AmplifierSpec& spec,
                             phase::SOrder order);
// Output on an arbitrary grid, interpolating the input bilinearly.
phase::PhaseFunction char_io(const phase::PhaseFunction& input_char, const AmplifierSpec& spec,
                             phase::SOrder order, const phase::PhaseGrid& out);
// Output on the grid of the input.
phase::PhaseFunction quasidist_io(const phase::PhaseFunction& input_qd, const AmplifierSpec& spec,
                                  phase::SOrder order);

fock::ChannelResult parametric_run(const fock::FockOperator& rho, const AmplifierSpec& spec,
                                   std::pair<int, int> dims = {0, 0});
fock::FockOperator parametric_apply(const fock::FockOperator& rho, const AmplifierSpec& spec,
                                    std::pair<int, int> dims = {0, 0}, double tol = 1e-6);

fock::FockOperator master_evolve(const fock::FockOperator& rho, const MasterEqParams& p, int dim,
                                 MasterStats* stats = nullptr, double tol = 1e-6);

enum class MeasurementVariant { arthurs_kelly, ideal };
fock::FockOperator measurement_model_apply(const fock::FockOperator& rho, double g,
                                           MeasurementVariant variant, const phase::PhaseGrid& grid,
                                           int dim, double tol = 1e-6);

// s' = s - (1 + s)(1 - 1/g^2).
double ideal_ordering_shift(double s, double g);

// Output-mode moments from a_out = g a - sqrt(g^2-1) b^dag acting on the
// two-mode input rho (x) sigma, without forming the output state.
struct OutputModeMoments {
  cplx mean;
  double symmetric_variance;  // <a_out^dag a_out> - |<a_out>|^2 + 1/2
};
OutputModeMoments heisenberg_output_moments(const fock::FockOperator& rho, const AmplifierSpec& spec,
                                            int dim_b = 0);

}  // namespace linamp::ampmap
