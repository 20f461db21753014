#pragma once

// Independent reference implementations for the test suites. Everything here
// goes through explicit dense matricization, never through the library's
// kernels, Pi construction or permutation code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cpapr/dense_matrix.hpp"
#include "cpapr/sparse_tensor.hpp"

namespace oracle {

using cpapr::DenseMatrix;
using cpapr::Index;
using cpapr::SparseTensor;

struct Dense {
  std::vector<std::vector<double>> m;  // rows x cols
  std::size_t rows = 0, cols = 0;

  Dense(std::size_t r, std::size_t c) : m(r, std::vector<double>(c, 0.0)), rows(r), cols(c) {}
};

// Column index of a coordinate in the mode-n unfolding: mixed radix over the
// other modes, lowest mode fastest.
inline std::size_t unfold_column(const std::vector<std::size_t>& dims,
                                 const std::vector<std::size_t>& coord, std::size_t n) {
  std::size_t col = 0, stride = 1;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    if (m == n) continue;
    col += coord[m] * stride;
    stride *= dims[m];
  }
  return col;
}

inline std::size_t unfold_cols(const std::vector<std::size_t>& dims, std::size_t n) {
  std::size_t J = 1;
  for (std::size_t m = 0; m < dims.size(); ++m)
    if (m != n) J *= dims[m];
  return J;
}

// X_(n), I_n x J_n; duplicate coordinates add up.
inline Dense matricize(const SparseTensor& t, std::size_t n) {
  Dense X(t.dim(n), unfold_cols(t.dims(), n));
  std::vector<std::size_t> c(t.order());
  for (std::size_t j = 0; j < t.nnz(); ++j) {
    for (std::size_t m = 0; m < t.order(); ++m) c[m] = t.coord(j, m);
    X.m[c[n]][unfold_column(t.dims(), c, n)] += t.value(j);
  }
  return X;
}

// Full Khatri-Rao product of every factor except n, J_n x R.
inline Dense khatri_rao(const std::vector<std::size_t>& dims,
                        const std::vector<DenseMatrix>& factors, std::size_t n) {
  const std::size_t R = factors.front().cols();
  const std::size_t J = unfold_cols(dims, n);
  Dense K(J, R);
  std::vector<std::size_t> c(dims.size(), 0);
  for (std::size_t col = 0; col < J; ++col) {
    std::size_t rest = col;
    for (std::size_t m = 0; m < dims.size(); ++m) {
      if (m == n) continue;
      c[m] = rest % dims[m];
      rest /= dims[m];
    }
    for (std::size_t r = 0; r < R; ++r) {
      double p = 1.0;
      for (std::size_t m = 0; m < dims.size(); ++m)
        if (m != n) p *= factors[m](c[m], r);
      K.m[col][r] = p;
    }
  }
  return K;
}

// Phi = (X_(n) ./ max(B Pi, eps)) Pi^T with Pi = KR^T (R x J_n). Only cells
// where X_(n) is nonzero contribute, which is what 0 / max(., eps) gives.
inline DenseMatrix dense_phi(const SparseTensor& t, const std::vector<DenseMatrix>& factors,
                             const DenseMatrix& B, std::size_t n, double eps) {
  const Dense X = matricize(t, n);
  const Dense K = khatri_rao(t.dims(), factors, n);
  const std::size_t R = B.cols();
  DenseMatrix phi(t.dim(n), R, 0.0);
  for (std::size_t i = 0; i < X.rows; ++i) {
    for (std::size_t col = 0; col < X.cols; ++col) {
      double bp = 0.0;
      for (std::size_t r = 0; r < R; ++r) bp += B(i, r) * K.m[col][r];
      const double ratio = X.m[i][col] / std::max(bp, eps);
      for (std::size_t r = 0; r < R; ++r) phi(i, r) += ratio * K.m[col][r];
    }
  }
  return phi;
}

// X_(n) times the Khatri-Rao product of the other factors.
inline DenseMatrix dense_mttkrp(const SparseTensor& t, const std::vector<DenseMatrix>& factors,
                                std::size_t n) {
  const Dense X = matricize(t, n);
  const Dense K = khatri_rao(t.dims(), factors, n);
  const std::size_t R = factors.front().cols();
  DenseMatrix out(t.dim(n), R, 0.0);
  for (std::size_t i = 0; i < X.rows; ++i)
    for (std::size_t col = 0; col < X.cols; ++col)
      for (std::size_t r = 0; r < R; ++r) out(i, r) += X.m[i][col] * K.m[col][r];
  return out;
}

// Full dense tensor value of a Kruskal model at a coordinate.
inline double model_value(const std::vector<double>& lambda,
                          const std::vector<DenseMatrix>& factors,
                          const std::vector<std::size_t>& coord) {
  double s = 0.0;
  for (std::size_t r = 0; r < lambda.size(); ++r) {
    double p = lambda[r];
    for (std::size_t m = 0; m < factors.size(); ++m) p *= factors[m](coord[m], r);
    s += p;
  }
  return s;
}

inline bool close_rel(double a, double b, double rel) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel * scale;
}

// Largest relative entrywise difference; shape mismatch gives +inf.
inline double max_rel_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) return INFINITY;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double x = a.data()[k], y = b.data()[k];
    const double scale = std::max(std::abs(x), std::abs(y));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(x - y) / scale);
  }
  return worst;
}

struct RandomSpec {
  std::size_t min_order = 2, max_order = 4;
  std::size_t max_dim = 8;
  std::size_t min_nnz = 1, max_nnz = 200;
  bool integer_values = true;
};

inline SparseTensor random_tensor(std::mt19937_64& rng, const RandomSpec& spec = {}) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t N = pick(spec.min_order, spec.max_order);
  std::vector<std::size_t> dims(N);
  for (auto& d : dims) d = pick(1, spec.max_dim);
  const std::size_t nnz = pick(spec.min_nnz, spec.max_nnz);
  std::vector<std::vector<Index>> idx(N, std::vector<Index>(nnz));
  std::vector<double> vals(nnz);
  for (std::size_t j = 0; j < nnz; ++j) {
    for (std::size_t m = 0; m < N; ++m) idx[m][j] = static_cast<Index>(pick(0, dims[m] - 1));
    vals[j] = spec.integer_values
                  ? static_cast<double>(pick(1, 10))
                  : std::uniform_real_distribution<double>(0.01, 10.0)(rng);
  }
  return SparseTensor(dims, std::move(idx), std::move(vals));
}

inline DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                 double lo = 0.05, double hi = 2.0) {
  DenseMatrix M(rows, cols);
  std::uniform_real_distribution<double> u(lo, hi);
  for (std::size_t k = 0; k < M.size(); ++k) M.data()[k] = u(rng);
  return M;
}

// Nonzeros of the separable tensor lambda * a o b o c ... over its full grid.
inline SparseTensor rank_one_tensor(const std::vector<std::vector<double>>& vecs, double lambda) {
  std::vector<std::size_t> dims;
  for (const auto& v : vecs) dims.push_back(v.size());
  const std::size_t N = dims.size();
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<std::vector<Index>> idx(N);
  std::vector<double> vals;
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rest = lin;
    double v = lambda;
    std::vector<Index> c(N);
    for (std::size_t m = 0; m < N; ++m) {
      c[m] = static_cast<Index>(rest % dims[m]);
      rest /= dims[m];
      v *= vecs[m][c[m]];
    }
    if (v == 0.0) continue;
    for (std::size_t m = 0; m < N; ++m) idx[m].push_back(c[m]);
    vals.push_back(v);
  }
  return SparseTensor(dims, std::move(idx), std::move(vals));
}

}  // namespace oracle
