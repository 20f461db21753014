#include "cpapr/kruskal_model.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <omp.h>

#include "cpapr/error.hpp"

namespace cpapr {

double KruskalModel::value_at(const SparseTensor& tensor, std::size_t j) const {
  double total = 0.0;
  for (std::size_t r = 0; r < rank(); ++r) {
    double term = weights[r];
    for (std::size_t m = 0; m < order(); ++m) term *= factors[m](tensor.coord(j, m), r);
    total += term;
  }
  return total;
}

KruskalModel init_model(const std::vector<std::size_t>& dims, std::size_t rank,
                        std::uint64_t seed) {
  if (rank == 0) throw ContractError("rank must be at least 1");
  if (dims.empty()) throw ContractError("model needs at least one mode");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  KruskalModel model;
  model.weights.assign(rank, 1.0);
  for (std::size_t dim : dims) {
    if (dim == 0) throw ContractError("model dims must be positive");
    DenseMatrix factor(dim, rank);
    // uniform() is in [0, 1); reflect it into (0, 1].
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t r = 0; r < rank; ++r) factor(i, r) = 1.0 - uniform(rng);
    model.factors.push_back(std::move(factor));
  }
  return model;
}

void check_compatible(const KruskalModel& model, const SparseTensor& tensor) {
  if (model.order() != tensor.order())
    throw ContractError("model order " + std::to_string(model.order()) +
                        " does not match tensor order " + std::to_string(tensor.order()));
  for (std::size_t m = 0; m < model.order(); ++m) {
    if (model.factors[m].rows() != tensor.dim(m) || model.factors[m].cols() != model.rank())
      throw ContractError("factor " + std::to_string(m) + " shape does not match tensor dims");
  }
}

PiMatrix compute_pi(const KruskalModel& model, const SparseTensor& tensor, std::size_t mode,
                    int threads) {
  if (mode >= tensor.order()) throw ContractError("mode out of range");
  check_compatible(model, tensor);
  const std::size_t rank = model.rank();
  const std::size_t nnz = tensor.nnz();
  const std::size_t order = tensor.order();
  PiMatrix pi{mode, DenseMatrix(nnz, rank, 1.0)};
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::size_t j = 0; j < nnz; ++j) {
    double* out = pi.entries.data() + j * rank;
    for (std::size_t m = 0; m < order; ++m) {
      if (m == mode) continue;
      const double* a = model.factors[m].data() + tensor.coord(j, m) * rank;
      for (std::size_t r = 0; r < rank; ++r) out[r] *= a[r];
    }
  }
  return pi;
}

NormalizedFactor normalize(const DenseMatrix& B) {
  NormalizedFactor out{std::vector<double>(B.cols(), 0.0), B, false};
  for (std::size_t i = 0; i < B.rows(); ++i)
    for (std::size_t r = 0; r < B.cols(); ++r) out.lambda[r] += B(i, r);
  for (std::size_t r = 0; r < B.cols(); ++r) {
    if (out.lambda[r] == 0.0) {
      out.zero_column = true;
      continue;
    }
    for (std::size_t i = 0; i < B.rows(); ++i) out.factor(i, r) = B(i, r) / out.lambda[r];
  }
  return out;
}

void normalize_all(KruskalModel& model) {
  for (auto& factor : model.factors) {
    auto n = normalize(factor);
    for (std::size_t r = 0; r < model.rank(); ++r) model.weights[r] *= n.lambda[r];
    factor = std::move(n.factor);
  }
}

void save_model(const std::string& prefix, const KruskalModel& model) {
  char buf[64];
  {
    std::ofstream out(prefix + ".lambda");
    if (!out) throw InputError("cannot write '" + prefix + ".lambda'");
    for (std::size_t r = 0; r < model.rank(); ++r) {
      std::snprintf(buf, sizeof(buf), "%.17g", model.weights[r]);
      out << (r ? " " : "") << buf;
    }
    out << '\n';
  }
  for (std::size_t n = 0; n < model.order(); ++n) {
    const auto& f = model.factors[n];
    std::ofstream out(prefix + ".factor" + std::to_string(n) + ".tns");
    if (!out) throw InputError("cannot write factor file for mode " + std::to_string(n));
    out << "# factor matrix " << n << ": row column value\n" << f.rows() << ' ' << f.cols() << '\n';
    for (std::size_t i = 0; i < f.rows(); ++i) {
      for (std::size_t r = 0; r < f.cols(); ++r) {
        std::snprintf(buf, sizeof(buf), "%.17g", f(i, r));
        out << i + 1 << ' ' << r + 1 << ' ' << buf << '\n';
      }
    }
  }
}

KruskalModel load_model(const std::string& prefix, std::size_t order) {
  KruskalModel model;
  {
    std::ifstream in(prefix + ".lambda");
    if (!in) throw InputError("cannot open '" + prefix + ".lambda'");
    double w;
    while (in >> w) model.weights.push_back(w);
    if (model.weights.empty()) throw InputError("empty lambda file");
  }
  for (std::size_t n = 0; n < order; ++n) {
    SparseTensor entries = read_tns(prefix + ".factor" + std::to_string(n) + ".tns");
    if (entries.order() != 2 || entries.dim(1) != model.rank())
      throw InputError("factor " + std::to_string(n) + " has wrong shape");
    DenseMatrix f(entries.dim(0), entries.dim(1));
    for (std::size_t j = 0; j < entries.nnz(); ++j)
      f(entries.coord(j, 0), entries.coord(j, 1)) = entries.value(j);
    model.factors.push_back(std::move(f));
  }
  return model;
}

}  // namespace cpapr
