#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linamp/fock.hpp"
#include "linamp/phasespace.hpp"

namespace linamp::figures {

// Output P function of a coherent input |beta> for one ancilla.
struct Panel {
  std::string label;
  std::optional<double> lambda;  // empty for the ideal amplifier
  phase::PhaseFunction p;
};
std::vector<Panel> fig5_panels(double g, cplx beta, const phase::PhaseGrid& grid);

// Real-axis cut through the output P function, alpha = g beta + t.
struct Curve {
  double lambda;
  std::vector<double> t;
  std::vector<double> values;  // scaled so the sampled maximum is 1
  double scale;                // sampled maximum before scaling
  bool center_is_max;          // on the sampled grid
  bool negative;               // any sampled value below zero
};
// Lambdas 0.5, 0.475, ..., -1.5. samples must be odd so t = 0 is sampled.
std::vector<Curve> fig6_curves(double g, double half_width, int samples);
std::vector<double> fig6_lambdas();

// P_out on the real axis at offset t for sigma(lambda).
double p_out_real_axis(double lambda, double g, double t);

struct Extremum {
  double t;
  double value;
};
// Global extremum of the added-noise function along the real axis on [0, t_max]:
// a coarse scan followed by Brent refinement.
Extremum real_axis_minimum(const fock::AncillaState& sigma, double g, double t_max);
Extremum real_axis_maximum(const fock::AncillaState& sigma, double g, double t_max);

// Whether t = 0 is the global maximum of the continuous curve.
bool center_is_global_max(double lambda, double g);
// Bisection for the lambda where the center stops being the global maximum.
double center_max_transition(double g, double lo, double hi, double tol);
// Bisection for the lambda below which the P function dips below zero.
double negativity_threshold(double g, double lo, double hi, double tol);

}  // namespace linamp::figures
