#include "linamp/ampmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace linamp::ampmap {

using fock::AncillaState;
using fock::FockOperator;
using phase::PhaseFunction;
using phase::PhaseGrid;
using phase::PhaseKind;
using phase::SOrder;

namespace {

void require_char(const PhaseFunction& f) {
  if (f.kind != PhaseKind::characteristic) throw std::invalid_argument("expected a characteristic function");
}

// Lindblad generator of the phase-insensitive amplifier with a a^dag = n + 1,
// so population leaving the top level is lost rather than reflected.
Eigen::MatrixXcd amplifier_generator(const Eigen::MatrixXcd& rho, double gamma) {
  const int n = static_cast<int>(rho.rows());
  Eigen::MatrixXcd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx v = -0.5 * (i + j + 2) * rho(i, j);
      if (i > 0 && j > 0) v += std::sqrt(double(i) * double(j)) * rho(i - 1, j - 1);
      out(i, j) = gamma * v;
    }
  return out;
}

Eigen::MatrixXcd rk4_step(const Eigen::MatrixXcd& y, double h, double gamma) {
  const Eigen::MatrixXcd k1 = amplifier_generator(y, gamma);
  const Eigen::MatrixXcd k2 = amplifier_generator(y + 0.5 * h * k1, gamma);
  const Eigen::MatrixXcd k3 = amplifier_generator(y + 0.5 * h * k2, gamma);
  const Eigen::MatrixXcd k4 = amplifier_generator(y + h * k3, gamma);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

AmplifierSpec::AmplifierSpec(double gain, AncillaState s) : g(gain), r(0.0), sigma(std::move(s)) {
  if (!(gain > 1.0)) throw std::invalid_argument("amplifier gain must exceed 1");
  r = std::acosh(gain);
}

AmplifierSpec AmplifierSpec::ideal(double gain) { return AmplifierSpec(gain, AncillaState::vacuum()); }

AmplifierSpec AmplifierSpec::from_squeeze(double r, AncillaState s) {
  if (!(r > 0.0)) throw std::invalid_argument("squeeze parameter must be positive");
  AmplifierSpec spec(2.0, std::move(s));
  spec.r = r;
  spec.g = std::cosh(r);
  return spec;
}

fock::SqueezeParams AmplifierSpec::squeeze() const {
  return fock::SqueezeParams::from_r(r);
}

double MasterEqParams::gain() const { return std::exp(0.5 * gamma * t); }

DisplacementImage map_A_on_displacement(cplx beta, double g) {
  if (!(g > 1.0)) throw std::invalid_argument("gain must exceed 1");
  const double g2 = g * g;
  return {std::exp((g2 - 1.0) * std::norm(beta) / (2.0 * g2)) / g2, beta / g};
}

cplx map_B_on_displacement(cplx beta, const AmplifierSpec& spec) {
  return std::conj(phase::added_noise_char(spec.sigma, spec.g, phase::ANTINORMAL, beta));
}

cplx map_B_referred_on_displacement(cplx beta, const AmplifierSpec& spec) {
  return map_B_on_displacement(beta / spec.g, spec);
}

ChannelImage map_E_on_displacement(cplx beta, const AmplifierSpec& spec) {
  const DisplacementImage a = map_A_on_displacement(beta, spec.g);
  return {a.coeff * map_B_on_displacement(a.beta_out, spec), a.beta_out};
}

PhaseFunction char_io(const PhaseFunction& in, const AmplifierSpec& spec, SOrder order) {
  require_char(in);
  const PhaseGrid out(in.grid.extent() / spec.g, in.grid.steps());
  const int n = out.steps();
  const double ds = order.s() - in.order.s();
  const SOrder noise_order(-order.s());
  Eigen::MatrixXcd v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx beta = out.point(i, j);
      const double gb2 = std::norm(spec.g * beta);
      v(i, j) = phase::added_noise_char(spec.sigma, spec.g, noise_order, beta) *
                std::exp(0.5 * ds * gb2) * in.values(i, j);
    }
  return {out, PhaseKind::characteristic, order, std::move(v), in.flags};
}

PhaseFunction char_io(const PhaseFunction& in, const AmplifierSpec& spec, SOrder order,
                      const PhaseGrid& out) {
  require_char(in);
  if (spec.g * out.coord(0) < in.grid.coord(0) - 1e-12 ||
      spec.g * out.coord(out.steps() - 1) > in.grid.coord(in.grid.steps() - 1) + 1e-12)
    throw std::out_of_range("extent mismatch: g beta leaves the input grid");
  const int n = out.steps();
  const double ds = order.s() - in.order.s();
  const SOrder noise_order(-order.s());
  Eigen::MatrixXcd v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx beta = out.point(i, j);
      const cplx gb = spec.g * beta;
      v(i, j) = phase::added_noise_char(spec.sigma, spec.g, noise_order, beta) *
                std::exp(0.5 * ds * std::norm(gb)) * in.interpolate(gb);
    }
  return {out, PhaseKind::characteristic, order, std::move(v), in.flags};
}

PhaseFunction quasidist_io(const PhaseFunction& in, const AmplifierSpec& spec, SOrder order) {
  if (in.kind != PhaseKind::quasidistribution) throw std::invalid_argument("expected a quasidistribution");
  const int n = in.grid.steps();
  // Largest |g beta| the input samples resolve without aliasing.
  const double gamma_max = std::numbers::pi * n / (4.0 * in.grid.extent());
  const PhaseGrid gamma_grid(gamma_max, n);
  const PhaseFunction in_char = phase::char_from_quasidist(in, gamma_grid);
  const PhaseFunction out_char = char_io(in_char, spec, order);
  PhaseFunction out = phase::quasidist_from_char(out_char, in.grid);
  return out;
}

fock::ChannelResult parametric_run(const FockOperator& rho, const AmplifierSpec& spec,
                                   std::pair<int, int> dims) {
  return fock::two_mode_squeeze_run(rho, spec.sigma, spec.squeeze(), dims);
}

FockOperator parametric_apply(const FockOperator& rho, const AmplifierSpec& spec,
                              std::pair<int, int> dims, double tol) {
  return fock::two_mode_squeeze_apply(rho, spec.sigma, spec.squeeze(), dims, tol);
}

FockOperator master_evolve(const FockOperator& rho, const MasterEqParams& p, int dim,
                           MasterStats* stats, double tol) {
  if (!(p.gamma > 0.0) || !(p.t >= 0.0)) throw std::invalid_argument("master equation needs gamma > 0, t >= 0");
  if (rho.dim() > dim) throw std::invalid_argument("input state larger than truncation");
  Eigen::MatrixXcd y = rho.resized(dim).matrix();
  MasterStats st;
  const double step_tol = 1e-9;
  double t = 0.0;
  double h = std::min(p.t, 0.5 / (p.gamma * dim));
  while (t < p.t) {
    h = std::min(h, p.t - t);
    if (h < 1e-14 * std::max(1.0, p.t)) throw std::runtime_error("master equation step size underflow");
    const Eigen::MatrixXcd full = rk4_step(y, h, p.gamma);
    const Eigen::MatrixXcd half = rk4_step(rk4_step(y, 0.5 * h, p.gamma), 0.5 * h, p.gamma);
    const double err = (half - full).norm() / 15.0;
    if (err <= step_tol) {
      y = half + (half - full) / 15.0;
      t += h;
      ++st.accepted;
    } else {
      ++st.rejected;
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(step_tol / err, 0.2) : 2.0;
    h *= std::clamp(factor, 0.2, 2.0);
  }
  FockOperator out(0.5 * (y + y.adjoint()));
  st.cert = fock::certify(out);
  if (stats) *stats = st;
  if (!st.cert.within(tol))
    throw fock::TruncationError("master-equation state overflows the truncation; raise dim", st.cert);
  return out;
}

FockOperator measurement_model_apply(const FockOperator& rho, double g, MeasurementVariant variant,
                                     const PhaseGrid& grid, int dim, double tol) {
  if (variant == MeasurementVariant::ideal)
    return parametric_apply(rho, AmplifierSpec::ideal(g), {dim, 0}, tol);
  if (!(g > 1.0)) throw std::invalid_argument("gain must exceed 1");
  const int n = grid.steps();
  const int din = rho.dim();
  std::vector<cplx> points;
  std::vector<double> weights;
  double wmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx alpha = grid.point(i, j);
      const Eigen::VectorXcd c = fock::coherent_vector(alpha / g, din);
      const double q = (c.adjoint() * rho.matrix() * c)(0, 0).real() / std::numbers::pi;
      const double w = grid.weight() * q / (g * g);
      points.push_back(alpha);
      weights.push_back(w);
      wmax = std::max(wmax, w);
    }
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(1.0 - total) > tol)
    throw std::domain_error("measurement-model grid too small: normalization defect " +
                            std::to_string(std::abs(1.0 - total)));
  std::vector<int> keep;
  for (size_t k = 0; k < weights.size(); ++k)
    if (weights[k] > 1e-22 * wmax) keep.push_back(static_cast<int>(k));
  Eigen::MatrixXcd c(dim, keep.size());
  Eigen::VectorXd w(keep.size());
  for (size_t k = 0; k < keep.size(); ++k) {
    c.col(k) = fock::coherent_vector(points[keep[k]], dim);
    w(k) = weights[keep[k]];
  }
  Eigen::MatrixXcd out = c * w.asDiagonal() * c.adjoint();
  FockOperator state(std::move(out));
  const fock::TruncationCertificate cert = fock::certify(state);
  if (!cert.within(tol)) throw fock::TruncationError("measurement-model output overflows the truncation; raise dim", cert);
  return state;
}

double ideal_ordering_shift(double s, double g) { return s - (1.0 + s) * (1.0 - 1.0 / (g * g)); }

OutputModeMoments heisenberg_output_moments(const FockOperator& rho, const AmplifierSpec& spec,
                                            int dim_b) {
  const int da = rho.dim();
  const int db = dim_b > 0 ? dim_b : spec.sigma.levels() + 1;
  if (db <= spec.sigma.levels()) throw std::invalid_argument("ancilla truncation must exceed sigma support");
  const double g = spec.g, c = std::sqrt((g - 1.0) * (g + 1.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> er(rho.matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(spec.sigma.dense(db));
  cplx mean = 0.0;
  double nout = 0.0;
  for (int i = 0; i < da; ++i) {
    const double pi = er.eigenvalues()(i);
    if (std::abs(pi) < 1e-18) continue;
    for (int j = 0; j < db; ++j) {
      const double wj = es.eigenvalues()(j);
      if (std::abs(wj) < 1e-18) continue;
      const Eigen::MatrixXcd x = er.eigenvectors().col(i) * es.eigenvectors().col(j).transpose();
      Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(da, db);
      for (int a = 0; a + 1 < da; ++a) y.row(a) += g * std::sqrt(double(a + 1)) * x.row(a + 1);
      for (int b = 1; b < db; ++b) y.col(b) -= c * std::sqrt(double(b)) * x.col(b - 1);
      mean += pi * wj * x.cwiseProduct(y.conjugate()).sum();
      nout += pi * wj * y.squaredNorm();
    }
  }
  mean = std::conj(mean);
  return {mean, nout - std::norm(mean) + 0.5};
}

}  // namespace linamp::ampmap
