#include "linamp/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/tools/minima.hpp>

#include "linamp/gate.hpp"

namespace linamp::figures {

using fock::AncillaState;
using phase::ANTINORMAL;

namespace {

double t_range(double g) { return 8.0 * std::sqrt((g - 1.0) * (g + 1.0)); }

Extremum scan_refine(const AncillaState& sigma, double g, double t_max, double sgn) {
  auto f = [&](double t) { return sgn * phase::added_noise_value(sigma, g, ANTINORMAL, {t, 0.0}); };
  const int n = 800;
  const double h = t_max / n;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = f(i * h);
  Extremum e{0.0, v[0]};
  // Refine every local minimum of the scan: a narrow dip can sit above a flat tail.
  for (int i = 0; i <= n; ++i) {
    const bool left = i == 0 || v[i] <= v[i - 1];
    const bool right = i == n || v[i] <= v[i + 1];
    if (!left || !right) continue;
    if (v[i] < e.value) e = {i * h, v[i]};
    const double lo = std::max(0.0, (i - 1) * h), hi = std::min(t_max, (i + 1) * h);
    const auto r = boost::math::tools::brent_find_minima(f, lo, hi, 52);
    if (r.second < e.value) e = {r.first, r.second};
  }
  e.value *= sgn;
  return e;
}

}  // namespace

std::vector<Panel> fig5_panels(double g, cplx beta, const phase::PhaseGrid& grid) {
  std::vector<Panel> out;
  const std::vector<std::optional<double>> lams = {std::nullopt, 0.5, 0.0, -0.5, -1.0};
  const int n = grid.steps();
  for (const auto& lam : lams) {
    const AncillaState sigma = lam ? gate::lambda_family(*lam) : AncillaState::vacuum();
    Eigen::MatrixXcd v(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        v(i, j) = phase::added_noise_value(sigma, g, ANTINORMAL, grid.point(i, j) - g * beta);
    char label[32];
    if (lam)
      std::snprintf(label, sizeof label, "lambda_%+.3f", *lam);
    else
      std::snprintf(label, sizeof label, "ideal");
    out.push_back({label, lam,
                   {grid, phase::PhaseKind::quasidistribution, phase::NORMAL, std::move(v), {}}});
  }
  return out;
}

std::vector<double> fig6_lambdas() {
  std::vector<double> l;
  for (int i = 0; i <= 80; ++i) l.push_back(0.5 - 0.025 * i);
  return l;
}

double p_out_real_axis(double lambda, double g, double t) {
  return phase::added_noise_value(gate::lambda_family(lambda), g, ANTINORMAL, {t, 0.0});
}

std::vector<Curve> fig6_curves(double g, double half_width, int samples) {
  if (samples < 3 || samples % 2 == 0) throw std::invalid_argument("fig6 needs an odd sample count");
  std::vector<Curve> out;
  const int mid = samples / 2;
  for (double lam : fig6_lambdas()) {
    Curve c;
    c.lambda = lam;
    const AncillaState sigma = gate::lambda_family(lam);
    for (int i = 0; i < samples; ++i) {
      const double t = half_width * (i - mid) / mid;
      c.t.push_back(t);
      c.values.push_back(phase::added_noise_value(sigma, g, ANTINORMAL, {t, 0.0}));
    }
    c.scale = *std::max_element(c.values.begin(), c.values.end());
    c.center_is_max = c.values[mid] >= c.scale;
    c.negative = *std::min_element(c.values.begin(), c.values.end()) < 0.0;
    for (double& v : c.values) v /= c.scale;
    out.push_back(std::move(c));
  }
  return out;
}

Extremum real_axis_minimum(const AncillaState& sigma, double g, double t_max) {
  return scan_refine(sigma, g, t_max, 1.0);
}

Extremum real_axis_maximum(const AncillaState& sigma, double g, double t_max) {
  return scan_refine(sigma, g, t_max, -1.0);
}

bool center_is_global_max(double lambda, double g) {
  const AncillaState sigma = gate::lambda_family(lambda);
  const double center = phase::added_noise_value(sigma, g, ANTINORMAL, {0.0, 0.0});
  return real_axis_maximum(sigma, g, t_range(g)).value <= center;
}

double center_max_transition(double g, double lo, double hi, double tol) {
  const bool at_lo = center_is_global_max(lo, g);
  if (at_lo == center_is_global_max(hi, g)) throw std::invalid_argument("transition not bracketed");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (center_is_global_max(mid, g) == at_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double negativity_threshold(double g, double lo, double hi, double tol) {
  auto negative = [&](double lam) {
    return real_axis_minimum(gate::lambda_family(lam), g, t_range(g)).value < 0.0;
  };
  const bool at_lo = negative(lo);
  if (at_lo == negative(hi)) throw std::invalid_argument("sign change not bracketed");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (negative(mid) == at_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace linamp::figures
