#include "linamp/fock.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace linamp::fock {

namespace {

void require_dim(int dim) {
  if (dim < 2) throw std::invalid_argument("truncation dimension must be at least 2");
}

// g^{-(i+j+1)/2} on a da x db block.
Eigen::MatrixXd gain_scaling(double g, int da, int db) {
  Eigen::MatrixXd s(da, db);
  const double lg = std::log(g);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) s(i, j) = std::exp(-0.5 * (i + j + 1) * lg);
  return s;
}

// sqrt((i+1)(j+1)) on a (da-1) x (db-1) block.
Eigen::MatrixXd ladder_weights(int da, int db) {
  Eigen::MatrixXd w(da - 1, db - 1);
  for (int i = 0; i < da - 1; ++i)
    for (int j = 0; j < db - 1; ++j) w(i, j) = std::sqrt(double(i + 1) * double(j + 1));
  return w;
}

// Applies the factored squeeze operator to a two-mode amplitude block in place.
void squeeze_block(Eigen::MatrixXcd& x, const SqueezeParams& p, const Eigen::MatrixXd& scale,
                   const Eigen::MatrixXd& w) {
  const int da = static_cast<int>(x.rows()), db = static_cast<int>(x.cols());
  x = x.cwiseProduct(scale);
  if (p.c == 0.0) {
    x = x.cwiseProduct(scale);
    return;
  }
  const int max_terms = std::min(da, db);

  // exp(c a b): lowers both indices, so the series ends inside the block.
  Eigen::MatrixXcd sum = x, term = x, next(da, db);
  double prev = term.norm();
  for (int k = 1; k < max_terms; ++k) {
    next.setZero();
    next.topLeftCorner(da - 1, db - 1) =
        (p.c / k) * w.cwiseProduct(term.bottomRightCorner(da - 1, db - 1));
    term.swap(next);
    const double tn = term.norm();
    sum += term;
    if (tn == 0.0 || (tn < prev && tn < 1e-20 * sum.norm())) break;
    prev = tn;
  }

  // exp(-c a^dag b^dag): components pushed out of the block are dropped;
  // they never feed back into it.
  x = sum;
  term = sum;
  prev = term.norm();
  for (int k = 1; k < max_terms; ++k) {
    next.setZero();
    next.bottomRightCorner(da - 1, db - 1) =
        (-p.c / k) * w.cwiseProduct(term.topLeftCorner(da - 1, db - 1));
    term.swap(next);
    const double tn = term.norm();
    x += term;
    if (tn == 0.0 || (tn < prev && tn < 1e-20 * x.norm())) break;
    prev = tn;
  }
  x = x.cwiseProduct(scale);
}

}  // namespace

FockOperator::FockOperator(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("operator matrix must be square");
  require_dim(static_cast<int>(m_.rows()));
}

FockOperator FockOperator::identity(int dim) {
  require_dim(dim);
  return FockOperator(Eigen::MatrixXcd::Identity(dim, dim));
}

FockOperator FockOperator::zero(int dim) {
  require_dim(dim);
  return FockOperator(Eigen::MatrixXcd::Zero(dim, dim));
}

FockOperator FockOperator::resized(int dim) const {
  require_dim(dim);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  const int k = std::min(dim, this->dim());
  out.topLeftCorner(k, k) = m_.topLeftCorner(k, k);
  return FockOperator(std::move(out));
}

TruncationCertificate certify(const FockOperator& rho) {
  TruncationCertificate c;
  c.dim = rho.dim();
  c.trace_defect = std::abs(1.0 - rho.trace().real());
  const int top = std::max(1, (c.dim + 9) / 10);
  for (int i = c.dim - top; i < c.dim; ++i) c.top_population += rho(i, i).real();
  return c;
}

SqueezeParams SqueezeParams::from_gain(double g) {
  if (!(g >= 1.0)) throw std::invalid_argument("gain must satisfy g >= 1");
  SqueezeParams p;
  p.g = g;
  p.r = std::acosh(g);
  p.c = std::sqrt((g - 1.0) * (g + 1.0));
  return p;
}

SqueezeParams SqueezeParams::from_r(double r) {
  SqueezeParams p;
  p.r = r;
  p.g = std::cosh(r);
  p.c = std::abs(std::sinh(r));
  return p;
}

AncillaState AncillaState::diagonal(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("ancilla weights must be non-empty");
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("ancilla weights must sum to 1");
  AncillaState s;
  s.weights_ = std::move(weights);
  return s;
}

AncillaState AncillaState::diagonal_exact(std::vector<Rational> weights) {
  if (weights.empty()) throw std::invalid_argument("ancilla weights must be non-empty");
  Rational sum = 0;
  for (const auto& w : weights) sum += w;
  if (sum != 1) throw std::invalid_argument("ancilla weights must sum to exactly 1");
  AncillaState s;
  for (const auto& w : weights) s.weights_.push_back(static_cast<double>(w));
  s.exact_ = std::move(weights);
  return s;
}

AncillaState AncillaState::from_matrix(const Eigen::MatrixXcd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw std::invalid_argument("ancilla matrix must be square");
  if ((sigma - sigma.adjoint()).norm() > 1e-12)
    throw std::invalid_argument("ancilla matrix must be Hermitian");
  if (std::abs(sigma.trace() - cplx(1.0)) > 1e-9)
    throw std::invalid_argument("ancilla matrix must have unit trace");
  std::vector<double> w(sigma.rows());
  for (int i = 0; i < sigma.rows(); ++i) w[i] = sigma(i, i).real();
  Eigen::MatrixXcd off = sigma;
  off.diagonal().setZero();
  AncillaState s;
  s.weights_ = std::move(w);
  if (off.cwiseAbs().maxCoeff() != 0.0) s.dense_ = sigma;
  return s;
}

AncillaState AncillaState::vacuum() { return diagonal_exact({Rational(1)}); }

AncillaState AncillaState::number(int n) {
  if (n < 0) throw std::invalid_argument("number state index must be nonnegative");
  std::vector<Rational> w(n + 1, Rational(0));
  w[n] = 1;
  return diagonal_exact(std::move(w));
}

AncillaState AncillaState::thermal(double nbar, int dim) {
  if (nbar < 0.0) throw std::invalid_argument("thermal occupation must be nonnegative");
  if (dim < 1) throw std::invalid_argument("thermal truncation must be positive");
  if (nbar == 0.0) return vacuum();
  const double q = nbar / (1.0 + nbar);
  std::vector<double> w(dim);
  double sum = 0.0;
  for (int n = 0; n < dim; ++n) sum += (w[n] = (1.0 - q) * std::pow(q, n));
  for (double& x : w) x /= sum;
  AncillaState s;
  s.weights_ = std::move(w);
  s.truncated_mass_ = std::pow(q, dim);
  return s;
}

Eigen::MatrixXcd AncillaState::dense(int dim) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  if (dense_) {
    const int k = std::min<int>(dim, static_cast<int>(dense_->rows()));
    out.topLeftCorner(k, k) = dense_->topLeftCorner(k, k);
  } else {
    for (int i = 0; i < std::min(dim, levels()); ++i) out(i, i) = weights_[i];
  }
  return out;
}

double laguerre(int n, double x) {
  if (n == 0) return 1.0;
  double l0 = 1.0, l1 = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2 * k + 1 - x) * l1 - k * l0) / (k + 1);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

std::vector<double> laguerre_row(int n_max, int k, double x) {
  std::vector<double> l(n_max + 1);
  l[0] = 1.0;
  if (n_max >= 1) l[1] = 1.0 + k - x;
  for (int n = 1; n < n_max; ++n)
    l[n + 1] = ((2 * n + 1 + k - x) * l[n] - (n + k) * l[n - 1]) / (n + 1);
  return l;
}

ModeOps mode_ops(int dim) {
  require_dim(dim);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) num(n, n) = n;
  Eigen::MatrixXcd adag = a.adjoint();
  return {FockOperator(a), FockOperator(adag), FockOperator(num)};
}

FockOperator displacement_matrix(cplx alpha, int dim, std::vector<std::string>* warnings) {
  const ModeOps ops = mode_ops(dim);
  const Eigen::MatrixXcd gen = alpha * ops.adag.matrix() - std::conj(alpha) * ops.a.matrix();
  Eigen::MatrixXcd d = gen.exp();
  if (warnings) {
    // The exponential of the truncated generator is exactly unitary, so the
    // defect is measured on the untruncated elements: how much of each
    // column in the lowest quarter leaks past the top level.
    const int interior = std::max(1, dim / 4);
    const Eigen::MatrixXcd exact = displacement_elements(alpha, dim);
    double worst = 0.0;
    for (int c = 0; c < interior; ++c) worst = std::max(worst, 1.0 - exact.col(c).squaredNorm());
    if (worst > 1e-10)
      warnings->push_back("displacement unitarity defect " + std::to_string(worst) +
                          " on the lowest quarter of levels; raise dim");
  }
  return FockOperator(std::move(d));
}

Eigen::MatrixXcd displacement_elements(cplx alpha, int dim) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim, dim);
  const double r = std::abs(alpha);
  if (r == 0.0) {
    d.setIdentity();
    return d;
  }
  const double x = r * r;
  const cplx ph = alpha / r;
  double base = std::exp(-0.5 * x);
  cplx phk = 1.0;
  for (int k = 0; k < dim; ++k) {
    if (k > 0) {
      base *= r / std::sqrt(double(k));
      phk *= ph;
    }
    const std::vector<double> l = laguerre_row(dim - 1 - k, k, x);
    const cplx lower = phk;
    const cplx upper = (k % 2 ? -1.0 : 1.0) * std::conj(phk);
    double pref = base;
    for (int n = 0; n + k < dim; ++n) {
      if (n > 0) pref *= std::sqrt(double(n) / double(n + k));
      const double v = pref * l[n];
      d(n + k, n) = v * lower;
      if (k > 0) d(n, n + k) = v * upper;
    }
  }
  return d;
}

Eigen::VectorXcd number_vector(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) throw std::out_of_range("number state outside truncation");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(n) = 1.0;
  return v;
}

Eigen::VectorXcd coherent_vector(cplx beta, int dim) {
  require_dim(dim);
  Eigen::VectorXcd v(dim);
  v(0) = std::exp(-0.5 * std::norm(beta));
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * beta / std::sqrt(double(n));
  return v;
}

FockOperator number_state(int n, int dim) {
  const Eigen::VectorXcd v = number_vector(n, dim);
  return FockOperator(v * v.adjoint());
}

FockOperator coherent_state(cplx beta, int dim) {
  Eigen::VectorXcd v = coherent_vector(beta, dim);
  v /= v.norm();
  return FockOperator(v * v.adjoint());
}

FockOperator thermal_state(double nbar, int dim) {
  require_dim(dim);
  const AncillaState s = AncillaState::thermal(nbar, dim);
  return FockOperator(s.dense(dim));
}

double trace_distance(const FockOperator& x, const FockOperator& y) {
  const int dim = std::max(x.dim(), y.dim());
  const Eigen::MatrixXcd diff = x.resized(dim).matrix() - y.resized(dim).matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

ChannelResult two_mode_squeeze_run(const FockOperator& rho, const AncillaState& sigma,
                                   const SqueezeParams& p, std::pair<int, int> dims) {
  const int da = dims.first > 0 ? dims.first : rho.dim();
  if (rho.dim() > da) throw std::invalid_argument("input state larger than output truncation");
  const int ls = sigma.levels();
  const int db = dims.second > 0 ? dims.second : da + ls;
  if (db < ls) throw std::invalid_argument("ancilla truncation smaller than sigma support");
  require_dim(da);
  require_dim(db);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> er(rho.matrix());
  std::vector<std::pair<double, Eigen::VectorXcd>> sig;
  if (sigma.is_diagonal()) {
    double wmax = 0.0;
    for (double w : sigma.weights()) wmax = std::max(wmax, std::abs(w));
    for (int m = 0; m < ls; ++m) {
      const double w = sigma.weights()[m];
      if (w == 0.0 || std::abs(w) < 1e-20 * wmax) continue;
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(db);
      v(m) = 1.0;
      sig.emplace_back(w, std::move(v));
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma.dense(ls));
    for (int i = 0; i < ls; ++i) {
      const double w = es.eigenvalues()(i);
      if (std::abs(w) < 1e-18) continue;
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(db);
      v.head(ls) = es.eigenvectors().col(i);
      sig.emplace_back(w, std::move(v));
    }
  }

  const Eigen::MatrixXd scale = gain_scaling(p.g, da, db);
  const Eigen::MatrixXd w = ladder_weights(da, db);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(da, da);
  for (int i = 0; i < rho.dim(); ++i) {
    const double pw = er.eigenvalues()(i);
    if (std::abs(pw) < 1e-18) continue;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(da);
    psi.head(rho.dim()) = er.eigenvectors().col(i);
    for (const auto& [sw, v] : sig) {
      Eigen::MatrixXcd x = psi * v.transpose();
      squeeze_block(x, p, scale, w);
      out.noalias() += (pw * sw) * (x * x.adjoint());
    }
  }
  out = 0.5 * (out + out.adjoint()).eval();
  FockOperator state(std::move(out));
  const TruncationCertificate cert = certify(state);
  return {std::move(state), cert};
}

FockOperator two_mode_squeeze_apply(const FockOperator& rho, const AncillaState& sigma,
                                    const SqueezeParams& p, std::pair<int, int> dims, double tol) {
  ChannelResult res = two_mode_squeeze_run(rho, sigma, p, dims);
  if (!res.cert.within(tol))
    throw TruncationError("amplified state overflows the truncation (trace defect " +
                              std::to_string(res.cert.trace_defect) + "); raise dim",
                          res.cert);
  return std::move(res.state);
}

double squeeze_element(const SqueezeParams& p, int j, int n, int k, int m) {
  if (j < 0 || n < 0 || k < 0 || m < 0 || j - n != k - m) return 0.0;
  const double lg = std::log(p.g);
  const double outer = -0.5 * (j + n + k + m + 2) * lg;
  if (p.c == 0.0) return n == m ? std::exp(outer) : 0.0;
  const double lc = std::log(p.c);
  const double half = 0.5 * (std::lgamma(k + 1.0) + std::lgamma(m + 1.0) +
                             std::lgamma(j + 1.0) + std::lgamma(n + 1.0));
  double sum = 0.0;
  for (int pp = 0; pp <= std::min(k, m); ++pp) {
    const int q = n - m + pp;
    if (q < 0) continue;
    const double lt = (pp + q) * lc - std::lgamma(pp + 1.0) - std::lgamma(q + 1.0) + half -
                      std::lgamma(k - pp + 1.0) - std::lgamma(m - pp + 1.0) + outer;
    sum += (q % 2 ? -1.0 : 1.0) * std::exp(lt);
  }
  return sum;
}

KrausSet squeeze_kraus_vacuum(const SqueezeParams& p, int n_max, int dim) {
  require_dim(dim);
  KrausSet ks;
  ks.label = "number-basis vacuum";
  const double lg = std::log(p.g);
  for (int n = 0; n <= n_max; ++n) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
    if (n == 0 || p.c > 0.0) {
      const double lc = p.c > 0.0 ? std::log(p.c) : 0.0;
      for (int k = 0; k + n < dim; ++k) {
        const double lt = n * lc - 0.5 * std::lgamma(n + 1.0) - (k + n + 1) * lg +
                          0.5 * (std::lgamma(k + n + 1.0) - std::lgamma(k + 1.0));
        e(k + n, k) = (n % 2 ? -1.0 : 1.0) * std::exp(lt);
      }
    }
    ks.elements.emplace_back(std::move(e));
    ks.signs.push_back(1);
  }
  return ks;
}

KrausSet squeeze_kraus_general(const SqueezeParams& p, const AncillaState& sigma, int n_max,
                               int dim) {
  if (!sigma.is_diagonal())
    throw std::invalid_argument("number-basis Kraus set needs a diagonal ancilla");
  require_dim(dim);
  KrausSet ks;
  ks.label = "number-basis";
  for (int m = 0; m < sigma.levels(); ++m) {
    const double lam = sigma.weights()[m];
    if (lam == 0.0) continue;
    if (lam < 0.0) ks.completely_positive = false;
    const double amp = std::sqrt(std::abs(lam));
    for (int n = 0; n <= n_max; ++n) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
      for (int k = 0; k < dim; ++k) {
        const int j = k - m + n;
        if (j < 0 || j >= dim) continue;
        e(j, k) = amp * squeeze_element(p, j, n, k, m);
      }
      ks.elements.emplace_back(std::move(e));
      ks.signs.push_back(lam < 0.0 ? -1 : 1);
    }
  }
  return ks;
}

FockOperator apply_kraus(const KrausSet& k, const FockOperator& rho) {
  if (k.elements.empty()) throw std::invalid_argument("empty Kraus set");
  const int dim = k.elements.front().dim();
  if (rho.dim() > dim) throw std::invalid_argument("input state larger than Kraus truncation");
  const Eigen::MatrixXcd r = rho.resized(dim).matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (size_t i = 0; i < k.elements.size(); ++i) {
    const Eigen::MatrixXcd& e = k.elements[i].matrix();
    out.noalias() += double(k.signs[i]) * (e * r * e.adjoint());
  }
  return FockOperator(std::move(out));
}

double completeness_defect(const KrausSet& k, int interior) {
  if (k.elements.empty()) throw std::invalid_argument("empty Kraus set");
  const int dim = k.elements.front().dim();
  Eigen::MatrixXcd sum = -Eigen::MatrixXcd::Identity(dim, dim);
  for (size_t i = 0; i < k.elements.size(); ++i) {
    const Eigen::MatrixXcd& e = k.elements[i].matrix();
    sum.noalias() += double(k.signs[i]) * (e.adjoint() * e);
  }
  double worst = 0.0;
  for (int c = 0; c < std::min(interior, dim); ++c) worst = std::max(worst, sum.col(c).norm());
  return worst;
}

FockOperator amplified_mode_operator(const SqueezeParams& p, int dim_a, int dim_b) {
  require_dim(dim_a);
  require_dim(dim_b);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_a * dim_b, dim_a * dim_b);
  for (int na = 0; na < dim_a; ++na)
    for (int nb = 0; nb < dim_b; ++nb) {
      const int col = na * dim_b + nb;
      if (na > 0) out((na - 1) * dim_b + nb, col) += p.g * std::sqrt(double(na));
      if (nb + 1 < dim_b) out(na * dim_b + nb + 1, col) -= p.c * std::sqrt(double(nb + 1));
    }
  return FockOperator(std::move(out));
}

}  // namespace linamp::fock
