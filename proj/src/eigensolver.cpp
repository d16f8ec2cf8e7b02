#include "netcong/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "netcong/error.hpp"
#include "netcong/kernels.hpp"

namespace netcong {
namespace {

// Householder reduction of the symmetric matrix held in v to tridiagonal
// form (d diagonal, e subdiagonal); v receives the orthogonal transform.
void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows;
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);
  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0, h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL iterations on the tridiagonal (d, e), accumulating into v.
void tridiagonal_ql(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  double f = 0.0, tst1 = 0.0;
  constexpr double eps = 0x1p-52;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 200) raise(ErrorKind::numeric, "tridiagonal QL did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;
        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (std::size_t k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::size_t argmax_abs_column(const Matrix& u, std::size_t col) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < u.rows; ++i)
    if (std::abs(u(i, col)) > std::abs(u(best, col))) best = i;
  return best;
}

class KrylovBasis {
 public:
  KrylovBasis(const Matrix& m) : m_(m) {}

  std::size_t size() const { return q_.size(); }
  const std::vector<double>& q(std::size_t i) const { return q_[i]; }
  const std::vector<double>& mq(std::size_t i) const { return mq_[i]; }
  const Matrix& projected() const { return h_; }

  /// Orthonormalizes the candidates against the basis and appends the ones
  /// that survive; returns how many were added.
  std::size_t extend(std::vector<std::vector<double>> cands) {
    const std::size_t n = m_.rows;
    std::vector<std::vector<double>> accepted;
    for (auto& c : cands) {
      if (q_.size() + accepted.size() >= n) break;
      const double before = norm(c);
      if (before == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : q_) orthogonalize(c, q);
        for (const auto& q : accepted) orthogonalize(c, q);
      }
      const double after = norm(c);
      if (after <= 1e-10 * before) continue;
      for (auto& x : c) x /= after;
      accepted.push_back(std::move(c));
    }
    if (accepted.empty()) return 0;

    Matrix block(n, accepted.size());
    for (std::size_t j = 0; j < accepted.size(); ++j)
      for (std::size_t i = 0; i < n; ++i) block(i, j) = accepted[j][i];
    Matrix product(n, accepted.size());
    kernels::gemm_acc(m_, block, product);

    const std::size_t old = q_.size();
    for (std::size_t j = 0; j < accepted.size(); ++j) {
      std::vector<double> mq(n);
      for (std::size_t i = 0; i < n; ++i) mq[i] = product(i, j);
      q_.push_back(std::move(accepted[j]));
      mq_.push_back(std::move(mq));
    }
    Matrix h(q_.size(), q_.size());
    for (std::size_t i = 0; i < old; ++i)
      for (std::size_t j = 0; j < old; ++j) h(i, j) = h_(i, j);
    for (std::size_t j = old; j < q_.size(); ++j)
      for (std::size_t i = 0; i <= j; ++i) {
        const double v = 0.5 * (dot(q_[i], mq_[j]) + dot(q_[j], mq_[i]));
        h(i, j) = v;
        h(j, i) = v;
      }
    h_ = std::move(h);
    return q_.size() - old;
  }

 private:
  static void orthogonalize(std::vector<double>& c, const std::vector<double>& q) {
    const double coef = dot(q, c);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= coef * q[i];
  }

  const Matrix& m_;
  std::vector<std::vector<double>> q_;
  std::vector<std::vector<double>> mq_;
  Matrix h_;
};

std::vector<std::vector<double>> random_block(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<std::vector<double>> out(count, std::vector<double>(n));
  for (auto& v : out)
    for (auto& x : v) x = dist(rng);
  return out;
}

}  // namespace

EigenPairs dense_symmetric_eigen(const Matrix& a) {
  if (a.rows != a.cols) raise(ErrorKind::invalid_input, "eigendecomposition needs a square matrix");
  const std::size_t n = a.rows;
  EigenPairs out;
  if (n == 0) return out;
  Matrix v = a;
  std::vector<double> d(n), e(n);
  tridiagonalize(v, d, e);
  tridiagonal_ql(v, d, e);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

void fix_signs(Matrix& u) {
  for (std::size_t j = 0; j < u.cols; ++j) {
    for (std::size_t i = 0; i < u.rows; ++i) {
      const double x = u(i, j);
      if (std::abs(x) <= 1e-12) continue;
      if (x < 0)
        for (std::size_t r = 0; r < u.rows; ++r) u(r, j) = -u(r, j);
      break;
    }
  }
}

EigenPairs topk_eigh(const Matrix& m, std::size_t k, const EigenOptions& opts) {
  if (m.rows != m.cols) raise(ErrorKind::invalid_input, "topk_eigh needs a square matrix");
  const std::size_t n = m.rows;
  if (k == 0 || k > n)
    raise(ErrorKind::invalid_input, "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  double frob = 0.0, asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      frob += m(i, j) * m(i, j);
      asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
    }
  frob = std::sqrt(frob);
  if (asym > 1e-12 * frob) raise(ErrorKind::invalid_input, "matrix is not symmetric");

  const std::size_t block = std::min(n, opts.block ? opts.block : std::max<std::size_t>(k + 2, 4));
  const std::size_t max_iter = opts.max_iterations_per_k * k;
  std::mt19937_64 rng(opts.seed);
  KrylovBasis basis(m);
  basis.extend(random_block(n, block, rng));

  std::size_t next_check = 0, iter = 0;
  std::size_t last_block_begin = 0;
  double last_residual = 0.0;
  while (true) {
    ++iter;
    const std::size_t dim = basis.size();
    if (dim >= k && (dim == n || dim >= next_check)) {
      const auto ritz = dense_symmetric_eigen(basis.projected());
      const double anorm = std::max({std::abs(ritz.values.front()), std::abs(ritz.values.back()),
                                     std::numeric_limits<double>::min()});
      EigenPairs out;
      out.values.assign(ritz.values.begin(), ritz.values.begin() + static_cast<std::ptrdiff_t>(k));
      out.vectors = Matrix(n, k);
      double worst = 0.0;
      std::vector<double> mu(n);
      for (std::size_t j = 0; j < k; ++j) {
        std::fill(mu.begin(), mu.end(), 0.0);
        for (std::size_t b = 0; b < dim; ++b) {
          const double s = ritz.vectors(b, j);
          const auto& q = basis.q(b);
          const auto& mq = basis.mq(b);
          for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, j) += s * q[i];
            mu[i] += s * mq[i];
          }
        }
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double r = mu[i] - out.values[j] * out.vectors(i, j);
          r2 += r * r;
        }
        worst = std::max(worst, std::sqrt(r2));
      }
      last_residual = worst;
      if (worst <= opts.tol * anorm || dim == n) {
        out.max_residual = worst;
        out.iterations = iter;
        fix_signs(out.vectors);
        // Deterministic order inside clusters of numerically equal values.
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), std::size_t{0});
        const double tie = 1e-10 * anorm;
        for (std::size_t s = 0; s < k;) {
          std::size_t e = s + 1;
          while (e < k && out.values[e - 1] - out.values[e] <= tie) ++e;
          std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(s),
                           order.begin() + static_cast<std::ptrdiff_t>(e),
                           [&](std::size_t a, std::size_t b) {
                             return argmax_abs_column(out.vectors, a) < argmax_abs_column(out.vectors, b);
                           });
          s = e;
        }
        EigenPairs sorted;
        sorted.max_residual = out.max_residual;
        sorted.iterations = out.iterations;
        sorted.vectors = Matrix(n, k);
        for (std::size_t j = 0; j < k; ++j) {
          sorted.values.push_back(out.values[order[j]]);
          for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = out.vectors(i, order[j]);
        }
        return sorted;
      }
      next_check = std::max(dim + block, dim + dim / 8);
    }
    if (iter > max_iter)
      raise(ErrorKind::numeric, "topk_eigh: no convergence after " + std::to_string(max_iter) +
                                    " iterations, residual " + std::to_string(last_residual));

    std::vector<std::vector<double>> cands;
    for (std::size_t i = last_block_begin; i < dim; ++i) cands.push_back(basis.mq(i));
    last_block_begin = dim;
    if (basis.extend(std::move(cands)) == 0) basis.extend(random_block(n, block, rng));
    // Nothing survived orthogonalization: the basis spans the space up to
    // rounding, so check convergence on the next round.
    if (basis.size() == dim) next_check = dim;
  }
}

}  // namespace netcong
