#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cpapr/error.hpp"
#include "cpapr/kruskal_model.hpp"
#include "cpapr/mttkrp.hpp"
#include "cpapr/stream_bench.hpp"
#include "oracles.hpp"

using namespace cpapr;

TEST(StreamKernelInfo, TableValues) {
  EXPECT_EQ(info(StreamKernel::Copy).bytes_per_iter, 16);
  EXPECT_EQ(info(StreamKernel::Copy).flops_per_iter, 0);
  EXPECT_EQ(info(StreamKernel::Scale).bytes_per_iter, 16);
  EXPECT_EQ(info(StreamKernel::Scale).flops_per_iter, 1);
  EXPECT_EQ(info(StreamKernel::Add).bytes_per_iter, 24);
  EXPECT_EQ(info(StreamKernel::Add).flops_per_iter, 1);
  EXPECT_EQ(info(StreamKernel::Triad).bytes_per_iter, 24);
  EXPECT_EQ(info(StreamKernel::Triad).flops_per_iter, 2);

  EXPECT_EQ(info(StreamKernel::Copy).intensity(), Rational(0));
  EXPECT_EQ(info(StreamKernel::Scale).intensity(), Rational(1, 16));
  EXPECT_EQ(info(StreamKernel::Add).intensity(), Rational(1, 24));
  EXPECT_EQ(info(StreamKernel::Triad).intensity(), Rational(1, 12));
  EXPECT_EQ(info(StreamKernel::Copy).printed_intensity(), "0");
  EXPECT_EQ(info(StreamKernel::Scale).printed_intensity(), "0.0625");
  EXPECT_EQ(info(StreamKernel::Add).printed_intensity(), "0.042");
  EXPECT_EQ(info(StreamKernel::Triad).printed_intensity(), "0.083");

  for (auto k : kAllStreamKernels) EXPECT_EQ(parse_stream_kernel(info(k).name), k);
  EXPECT_THROW(parse_stream_kernel("fma"), ContractError);
}

TEST(StreamKernels, Bodies) {
  std::vector<double> a(100, 0.0), b(100), c(100);
  for (int i = 0; i < 100; ++i) {
    b[i] = i;
    c[i] = 2 * i + 1;
  }
  stream_copy(a, b);
  EXPECT_EQ(a, b);
  stream_triad(a, b, c, 0.0);
  EXPECT_EQ(a, b);  // s = 0 degenerates to copy
  stream_scale(a, b, 3.0);
  EXPECT_EQ(a[7], 21.0);
  stream_add(a, b, c);
  EXPECT_EQ(a[7], 22.0);
  stream_triad(a, b, c, 2.0, 3);
  EXPECT_EQ(a[7], 37.0);
}

TEST(RunStream, ValidatesAndReports) {
  StreamOptions o;
  o.length = 100000;
  o.reps = 3;
  auto results = run_stream(o);
  ASSERT_EQ(results.size(), 4u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.validated) << r.kernel;
    EXPECT_GT(r.best_gbs, 0.0);
    EXPECT_GE(r.best_gbs, r.mean_gbs * (1 - 1e-12));
  }
  EXPECT_EQ(results[3].bytes, 24.0 * 100000);

  o.kernels = {StreamKernel::Triad};
  o.scalar = 0.5;
  EXPECT_TRUE(run_stream(o).front().validated);

  attach_peak(results, {"m", 1, 1, 1, 1, 10.0});
  EXPECT_NEAR(*results[0].percent_of_peak, results[0].best_gbs * 10.0, 1e-9);
  std::ostringstream csv;
  write_bandwidth_csv(csv, results);
  EXPECT_NE(csv.str().find("\nadd,100000,24,1,0.042,"), std::string::npos);

  StreamOptions bad;
  bad.reps = 1;
  EXPECT_THROW(run_stream(bad), ContractError);
  bad.reps = 2;
  bad.length = 0;
  EXPECT_THROW(run_stream(bad), ContractError);
}

TEST(Mttkrp, AllOnesFactorsSumRowValues) {
  const SparseTensor t({2, 3, 2}, {{0, 1, 0, 1}, {0, 2, 1, 0}, {1, 1, 0, 0}}, {1, 2, 3, 4});
  std::vector<DenseMatrix> f{DenseMatrix(2, 2, 1.0), DenseMatrix(3, 2, 1.0), DenseMatrix(2, 2, 1.0)};
  const auto out = mttkrp(t, f, 0);
  EXPECT_EQ(out(0, 0), 4.0);
  EXPECT_EQ(out(1, 1), 6.0);
}

TEST(Mttkrp, HandTrace) {
  const SparseTensor t({1, 2, 3}, {{0}, {1}, {2}}, {2.0});
  std::vector<DenseMatrix> f{DenseMatrix(1, 1, 1.0), DenseMatrix(2, 1, 1.0), DenseMatrix(3, 1, 1.0)};
  f[1](1, 0) = 3.0;
  f[2](2, 0) = 5.0;
  EXPECT_EQ(mttkrp(t, f, 0)(0, 0), 30.0);
}

TEST(Mttkrp, MatrixCaseIsSpMM) {
  const SparseTensor t({4, 5}, {{0, 0, 1, 3, 3, 2}, {0, 4, 2, 1, 1, 3}}, {1, 2, 3, 4, 5, 6});
  std::mt19937_64 rng(61);
  std::vector<DenseMatrix> f{oracle::random_matrix(rng, 4, 3), oracle::random_matrix(rng, 5, 3)};
  const auto out = mttkrp(t, f, 0, {{PhiVariant::ChunkedSorted, 2}, {1, 1, 1}, 1});
  DenseMatrix expect(4, 3);
  for (std::size_t j = 0; j < t.nnz(); ++j)
    for (std::size_t r = 0; r < 3; ++r) expect(t.coord(j, 0), r) += t.value(j) * f[1](t.coord(j, 1), r);
  EXPECT_LE(oracle::max_rel_diff(out, expect), 1e-14);
}

TEST(Mttkrp, MatchesDenseOracleAndPolicyInvariant) {
  std::mt19937_64 rng(62);
  const PolicyParams policies[] = {{1, 1, 1}, {3, 2, 5}, {8, 4, 16}};
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = oracle::random_tensor(rng, {3, 4, 8, 1, 200, false});
    const std::size_t R = 1 + trial % 5;
    const auto m = init_model(t.dims(), R, trial);
    for (std::size_t n = 0; n < t.order(); ++n) {
      const auto expect = oracle::dense_mttkrp(t, m.factors, n);
      for (const auto& p : policies)
        for (auto v : {PhiVariant::AtomicPerNonzero, PhiVariant::ChunkedSorted}) {
          const auto got = mttkrp(t, m.factors, n, {{v, std::nullopt}, p, 3});
          ASSERT_LE(oracle::max_rel_diff(got, expect), 1e-10);
        }
    }
  }
}

TEST(Mttkrp, ShapeErrors) {
  const SparseTensor t({2, 2}, {{0}, {1}}, {1});
  EXPECT_THROW(mttkrp(t, {DenseMatrix(2, 1), DenseMatrix(3, 1)}, 0), ContractError);
  EXPECT_THROW(mttkrp(t, {DenseMatrix(2, 1), DenseMatrix(2, 2)}, 0), ContractError);
  EXPECT_THROW(mttkrp(t, {DenseMatrix(2, 1)}, 0), ContractError);
  EXPECT_THROW(mttkrp(t, {DenseMatrix(2, 1), DenseMatrix(2, 1)}, 2), ContractError);
}

TEST(MttkrpBandwidth, ByteModelAndReport) {
  EXPECT_EQ(mttkrp_bytes(1, 3, 1), 40.0);
  std::mt19937_64 rng(63);
  const auto t = oracle::random_tensor(rng, {3, 3, 8, 200, 200, true});
  MttkrpBenchOptions o;
  o.rank = 4;
  o.reps = 2;
  const auto a = mttkrp_bandwidth(t, o);
  o.reps = 4;
  auto b = mttkrp_bandwidth(t, o);
  EXPECT_EQ(a.bytes, b.bytes);
  EXPECT_TRUE(b.validated);
  EXPECT_GT(b.best_gbs, 0.0);
  std::vector<BandwidthResult> rs{b};
  attach_peak(rs, {"m", 1, 1, 1, 1, 1e6});
  EXPECT_GT(*rs[0].percent_of_peak, 0.0);
  o.reps = 1;
  EXPECT_THROW(mttkrp_bandwidth(t, o), ContractError);
}
