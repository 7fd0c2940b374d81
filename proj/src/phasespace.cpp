#include "linamp/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace linamp::phase {

using fock::AncillaState;
using fock::FockOperator;

namespace {

constexpr double kPi = std::numbers::pi;

// Index of the last basis state carrying non-negligible weight, plus one.
int support(const Eigen::MatrixXcd& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  int k = static_cast<int>(m.rows());
  while (k > 1) {
    const int i = k - 1;
    const double r = std::max(m.row(i).cwiseAbs().maxCoeff(), m.col(i).cwiseAbs().maxCoeff());
    if (r > 1e-17 * scale) break;
    --k;
  }
  return std::max(k, 2);
}

cplx char_fn_trimmed(const Eigen::MatrixXcd& rho, double s, cplx beta) {
  const int k = static_cast<int>(rho.rows());
  const Eigen::MatrixXcd d = fock::displacement_elements(beta, k);
  return rho.transpose().cwiseProduct(d).sum() * std::exp(0.5 * s * std::norm(beta));
}

double boundary_max(const Eigen::MatrixXcd& v) {
  const int n = static_cast<int>(v.rows());
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    m = std::max({m, std::abs(v(i, 0)), std::abs(v(i, n - 1)), std::abs(v(0, i)),
                  std::abs(v(n - 1, i))});
  }
  return m;
}

// out(a, b) = scale sum_{c,d} in(c, d) exp(sign 2i (qI_b pR_c - qR_a pI_d)).
Eigen::MatrixXcd fourier(const Eigen::MatrixXcd& in, const std::vector<double>& p,
                         const std::vector<double>& q, double sign, double scale) {
  const int np = static_cast<int>(p.size()), nq = static_cast<int>(q.size());
  Eigen::MatrixXcd a(nq, np), b(nq, np);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < np; ++j) {
      const double ph = 2.0 * q[i] * p[j];
      a(i, j) = std::polar(1.0, -sign * ph);
      b(i, j) = std::polar(1.0, sign * ph);
    }
  return scale * (a * in.transpose() * b.transpose());
}

// Samples Phi^(s) on grid using Phi(-beta) = Phi(beta)^*.
Eigen::MatrixXcd sample_char(const Eigen::MatrixXcd& rho, double s, const PhaseGrid& grid) {
  const int n = grid.steps();
  Eigen::MatrixXcd v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i > 0 && j > 0 && (i > n - i || (i == n - i && j > n - j))) {
        v(i, j) = std::conj(v(n - i, n - j));
        continue;
      }
      v(i, j) = char_fn_trimmed(rho, s, grid.point(i, j));
    }
  return v;
}

bool is_minus_one(double s) { return s == -1.0; }

// Sum_n lambda_n t^n L_n(-u/t) through the recurrence that stays regular at t = 0.
double scaled_laguerre_sum(const std::vector<double>& lam, double t, double u) {
  double p0 = 1.0, p1 = t + u, sum = lam[0];
  if (lam.size() > 1) sum += lam[1] * p1;
  for (size_t n = 1; n + 1 < lam.size(); ++n) {
    const double p2 = (((2.0 * n + 1.0) * t + u) * p1 - n * t * t * p0) / (n + 1.0);
    p0 = p1;
    p1 = p2;
    sum += lam[n + 1] * p1;
  }
  return sum;
}

std::vector<std::string> series_flags(const AncillaState& sigma) {
  std::vector<std::string> flags;
  const int top = std::max(1, (sigma.levels() + 9) / 10);
  double tail = sigma.truncated_mass();
  if (sigma.levels() >= 10)
    for (int i = sigma.levels() - top; i < sigma.levels(); ++i)
      tail += std::abs(sigma.weights()[i]);
  if (tail > 1e-10) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s: tail weight %.3e", kSeriesTruncation.c_str(), tail);
    flags.emplace_back(buf);
  }
  return flags;
}

}  // namespace

SOrder::SOrder(double s) : s_(s) {
  if (!(s >= -1.0 && s <= 1.0)) throw std::invalid_argument("ordering parameter must lie in [-1, 1]");
}

PhaseGrid::PhaseGrid(double extent, int steps) : extent_(extent), steps_(steps) {
  if (!(extent > 0.0)) throw std::invalid_argument("grid extent must be positive");
  if (steps < 2 || steps % 2) throw std::invalid_argument("grid steps must be even and >= 2");
}

std::vector<double> PhaseGrid::coords() const {
  std::vector<double> c(steps_);
  for (int i = 0; i < steps_; ++i) c[i] = coord(i);
  return c;
}

cplx PhaseFunction::interpolate(cplx z) const {
  const double h = grid.step();
  const int n = grid.steps();
  const double fx = (z.real() + grid.extent()) / h, fy = (z.imag() + grid.extent()) / h;
  const double eps = 1e-9;
  if (fx < -eps || fy < -eps || fx > n - 1 + eps || fy > n - 1 + eps)
    throw std::out_of_range("interpolation point outside the sampled grid");
  int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n - 2);
  int j = std::clamp(static_cast<int>(std::floor(fy)), 0, n - 2);
  const double tx = std::clamp(fx - i, 0.0, 1.0), ty = std::clamp(fy - j, 0.0, 1.0);
  return (1 - tx) * (1 - ty) * values(i, j) + tx * (1 - ty) * values(i + 1, j) +
         (1 - tx) * ty * values(i, j + 1) + tx * ty * values(i + 1, j + 1);
}

bool PhaseFunction::flagged(const std::string& prefix) const {
  return std::any_of(flags.begin(), flags.end(),
                     [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
}

cplx char_fn(const FockOperator& state, SOrder order, cplx beta) {
  const int k = support(state.matrix());
  return char_fn_trimmed(state.matrix().topLeftCorner(k, k), order.s(), beta);
}

PhaseFunction char_grid(const FockOperator& state, SOrder order, const PhaseGrid& grid) {
  const int k = support(state.matrix());
  const Eigen::MatrixXcd rho = state.matrix().topLeftCorner(k, k);
  return {grid, PhaseKind::characteristic, order, sample_char(rho, order.s(), grid), {}};
}

PhaseFunction quasidist(const FockOperator& state, SOrder order, const PhaseGrid& grid) {
  const int k = support(state.matrix());
  const Eigen::MatrixXcd rho = state.matrix().topLeftCorner(k, k);
  double extent = 6.0;
  int steps = 256;
  const double h = 2.0 * extent / steps;
  // Widen until the s-ordered samples decay; for s = 1 they may never do, so
  // the symmetric function sets the extent instead.
  Eigen::MatrixXcd v;
  for (;;) {
    const PhaseGrid bgrid(extent, steps);
    v = sample_char(rho, 0.0, bgrid);
    const bool decayed = boundary_max(v) < 1e-10;
    if (order.s() != 0.0)
      for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) v(i, j) *= std::exp(0.5 * order.s() * std::norm(bgrid.point(i, j)));
    if ((order.s() < 1.0 ? boundary_max(v) < 1e-10 : decayed) || steps >= 1024) break;
    extent += 64 * h;
    steps += 128;
  }
  const PhaseGrid bgrid(extent, steps);
  PhaseFunction chr{bgrid, PhaseKind::characteristic, order, std::move(v), {}};
  return quasidist_from_char(chr, grid);
}

PhaseFunction quasidist_from_char(const PhaseFunction& chr, const PhaseGrid& out) {
  if (chr.kind != PhaseKind::characteristic)
    throw std::invalid_argument("expected a characteristic function");
  PhaseFunction qd{out, PhaseKind::quasidistribution, chr.order,
                   fourier(chr.values, chr.grid.coords(), out.coords(), 1.0,
                           chr.grid.weight() / (kPi * kPi)),
                   chr.flags};
  if (boundary_max(chr.values) > 1e-6 && !qd.flagged(kUnconvergedTail))
    qd.flags.push_back(kUnconvergedTail);
  return qd;
}

PhaseFunction char_from_quasidist(const PhaseFunction& qd, const PhaseGrid& out) {
  if (qd.kind != PhaseKind::quasidistribution)
    throw std::invalid_argument("expected a quasidistribution");
  return {out, PhaseKind::characteristic, qd.order,
          fourier(qd.values, qd.grid.coords(), out.coords(), 1.0, qd.grid.weight()), qd.flags};
}

FockOperator state_from_char(const PhaseFunction& chr, int dim) {
  if (chr.kind != PhaseKind::characteristic)
    throw std::invalid_argument("expected a characteristic function");
  const PhaseGrid& grid = chr.grid;
  const int n = grid.steps();
  const double s = chr.order.s();
  Eigen::MatrixXcd phi(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      phi(i, j) = chr.values(i, j) * std::exp(-0.5 * s * std::norm(grid.point(i, j)));
  const double cut = 1e-17 * phi.cwiseAbs().maxCoeff();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd self = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool paired = i > 0 && j > 0;
      if (paired && (i > n - i || (i == n - i && j > n - j))) continue;
      if (std::abs(phi(i, j)) < cut) continue;
      const Eigen::MatrixXcd term = phi(i, j) * fock::displacement_elements(-grid.point(i, j), dim);
      if (paired && !(i == n - i && j == n - j))
        rho += term;
      else
        self += term;
    }
  const double w = grid.weight() / kPi;
  Eigen::MatrixXcd out = w * (rho + rho.adjoint() + 0.5 * (self + self.adjoint()));
  return FockOperator(std::move(out));
}

cplx added_noise_char(const AncillaState& sigma, double g, SOrder order, cplx beta) {
  if (g == 1.0) return 1.0;
  if (!(g > 1.0)) throw std::invalid_argument("gain must exceed 1");
  const cplx gamma = std::sqrt((g - 1.0) * (g + 1.0)) * std::conj(beta);
  const double y = std::norm(gamma);
  if (sigma.is_diagonal()) {
    const std::vector<double> l = fock::laguerre_row(sigma.levels() - 1, 0, y);
    double sum = 0.0;
    for (int n = 0; n < sigma.levels(); ++n) sum += sigma.weights()[n] * l[n];
    return sum * std::exp(0.5 * (order.s() - 1.0) * y);
  }
  const Eigen::MatrixXcd m = sigma.dense(sigma.levels());
  return char_fn_trimmed(m, order.s(), gamma);
}

double added_noise_value(const AncillaState& sigma, double g, SOrder order, cplx alpha) {
  if (!sigma.is_diagonal()) throw std::invalid_argument("series form needs a diagonal ancilla");
  if (!(g > 1.0)) throw std::invalid_argument("gain must exceed 1");
  const double s = order.s();
  if (s == 1.0) throw std::domain_error("normally ordered added-noise function is distributional");
  const double g2m1 = (g - 1.0) * (g + 1.0);
  const double y = std::norm(alpha) / g2m1;
  const double t = is_minus_one(s) ? 0.0 : (s + 1.0) / (s - 1.0);
  const double u = 4.0 * y / ((1.0 - s) * (1.0 - s));
  return 2.0 / (kPi * (1.0 - s) * g2m1) * std::exp(-2.0 * y / (1.0 - s)) *
         scaled_laguerre_sum(sigma.weights(), t, u);
}

PhaseFunction added_noise_fn(const AncillaState& sigma, double g, SOrder order,
                             const PhaseGrid& grid) {
  const int n = grid.steps();
  if (sigma.is_diagonal() && order.s() < 1.0) {
    Eigen::MatrixXcd v(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(i, j) = added_noise_value(sigma, g, order, grid.point(i, j));
    return {grid, PhaseKind::quasidistribution, order, std::move(v), series_flags(sigma)};
  }
  // Numerical transform of the characteristic form.
  const double c = std::sqrt((g - 1.0) * (g + 1.0));
  const double decay = order.s() < 1.0 ? (1.0 - order.s()) : 0.0;
  const double extent = decay > 0.0 ? std::min(std::sqrt(50.0 / decay) / c, 12.0) : 7.0 / c;
  const double h = std::min(kPi / (2.5 * grid.extent()), extent / 64.0);
  int steps = 2 * static_cast<int>(std::ceil(extent / h));
  steps = std::min(steps, 1024);
  const PhaseGrid bgrid(extent, steps);
  Eigen::MatrixXcd v(steps, steps);
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) v(i, j) = added_noise_char(sigma, g, order, bgrid.point(i, j));
  PhaseFunction chr{bgrid, PhaseKind::characteristic, order, std::move(v), {}};
  PhaseFunction out = quasidist_from_char(chr, grid);
  if (sigma.is_diagonal())
    for (auto& f : series_flags(sigma)) out.flags.push_back(f);
  return out;
}

namespace {

void put(std::ostream& os, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  os << buf;
}

}  // namespace

void write_csv(std::ostream& os, const PhaseFunction& f, const std::vector<std::string>& extra) {
  os << "# kind=" << (f.kind == PhaseKind::characteristic ? "characteristic" : "quasidistribution")
     << "\n# s=";
  put(os, f.order.s());
  os << "\n# extent=";
  put(os, f.grid.extent());
  os << "\n# steps=" << f.grid.steps() << "\n# measure=dRe*dIm\n";
  for (const auto& fl : f.flags) os << "# flag=" << fl << "\n";
  for (const auto& e : extra) os << "# " << e << "\n";
  os << "alpha_re,alpha_im,value_re,value_im\n";
  for (int i = 0; i < f.grid.steps(); ++i)
    for (int j = 0; j < f.grid.steps(); ++j) {
      put(os, f.grid.coord(i));
      os << ',';
      put(os, f.grid.coord(j));
      os << ',';
      put(os, f.values(i, j).real());
      os << ',';
      put(os, f.values(i, j).imag());
      os << '\n';
    }
}

void write_csv_points(std::ostream& os, const std::vector<cplx>& points,
                      const std::vector<cplx>& values, const std::vector<std::string>& header) {
  for (const auto& e : header) os << "# " << e << "\n";
  os << "alpha_re,alpha_im,value_re,value_im\n";
  for (size_t i = 0; i < points.size(); ++i) {
    put(os, points[i].real());
    os << ',';
    put(os, points[i].imag());
    os << ',';
    put(os, values[i].real());
    os << ',';
    put(os, values[i].imag());
    os << '\n';
  }
}

}  // namespace linamp::phase
