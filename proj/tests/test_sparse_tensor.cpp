#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "cpapr/error.hpp"
#include "cpapr/sparse_tensor.hpp"
#include "oracles.hpp"

using namespace cpapr;

TEST(ParseTns, SingleNonzero) {
  const auto t = parse_tns("1 1 1 5.0\n");
  EXPECT_EQ(t.order(), 3u);
  EXPECT_EQ(t.dims(), (std::vector<std::size_t>{1, 1, 1}));
  ASSERT_EQ(t.nnz(), 1u);
  EXPECT_EQ(t.value(0), 5.0);
}

TEST(ParseTns, TwoWayConvertsToZeroBased) {
  const auto t = parse_tns("2 1 3\n1 2 4\n");
  EXPECT_EQ(t.dims(), (std::vector<std::size_t>{2, 2}));
  ASSERT_EQ(t.nnz(), 2u);
  EXPECT_EQ(t.coord(0, 0), 1u);
  EXPECT_EQ(t.coord(0, 1), 0u);
  EXPECT_EQ(t.coord(1, 0), 0u);
  EXPECT_EQ(t.coord(1, 1), 1u);
  EXPECT_EQ(t.value(0), 3.0);
  EXPECT_EQ(t.value(1), 4.0);
}

TEST(ParseTns, CommentsBlankLinesAndHeader) {
  const auto t = parse_tns("# comment\n\n4 5 6\n1 2 3 1.5\n# mid\n2 2 2 0.25\n");
  EXPECT_EQ(t.dims(), (std::vector<std::size_t>{4, 5, 6}));
  EXPECT_EQ(t.nnz(), 2u);
}

TEST(ParseTns, ValuesPreservedExactly) {
  const auto t = parse_tns("1 1 0.1\n1 2 12345678.901234567\n");
  EXPECT_EQ(t.value(0), 0.1);
  EXPECT_EQ(t.value(1), 12345678.901234567);
}

TEST(ParseTns, DuplicatesKept) {
  const auto t = parse_tns("1 1 1\n1 1 2\n");
  EXPECT_EQ(t.nnz(), 2u);
}

TEST(ParseTns, Errors) {
  EXPECT_THROW(parse_tns("1 1 -2\n"), InputError);
  try {
    parse_tns("1 1 -2\n");
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("negative count value"), std::string::npos);
  }
  EXPECT_THROW(parse_tns(""), InputError);
  EXPECT_THROW(parse_tns("# only a comment\n"), InputError);
  EXPECT_THROW(parse_tns("1 1 1 2\n1 1 3\n"), InputError);  // column count changes
  EXPECT_THROW(parse_tns("1 x 2\n"), InputError);
  EXPECT_THROW(parse_tns("1 1 abc\n"), InputError);
  EXPECT_THROW(parse_tns("0 1 2\n"), InputError);  // 1-based
  EXPECT_THROW(parse_tns("2 2\n3 1 1\n"), InputError);  // header smaller than data
  EXPECT_THROW(read_tns("/nonexistent/file.tns"), InputError);
}

TEST(ParseTns, RoundTrip) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    oracle::RandomSpec spec;
    spec.min_order = 1;
    spec.integer_values = trial % 2 == 0;
    const auto t = oracle::random_tensor(rng, spec);
    std::stringstream ss;
    write_tns(ss, t);
    EXPECT_EQ(parse_tns(ss), t);
  }
}

TEST(SparseTensorCtor, RejectsViolations) {
  EXPECT_THROW(SparseTensor({}, {}, {}), ContractError);
  EXPECT_THROW(SparseTensor({0}, {{}}, {}), ContractError);
  EXPECT_THROW(SparseTensor({2}, {{2}}, {1.0}), ContractError);
  EXPECT_THROW(SparseTensor({2}, {{1}}, {-1.0}), ContractError);
  EXPECT_THROW(SparseTensor({2}, {{1, 0}}, {1.0}), ContractError);
  EXPECT_NO_THROW(SparseTensor({2, 3}, {{}, {}}, {}));
}

TEST(BuildPermutation, Examples) {
  const SparseTensor sorted({3, 1}, {{0, 1, 2}, {0, 0, 0}}, {1, 1, 1});
  EXPECT_EQ(build_permutation(sorted, 0).order, (std::vector<std::size_t>{0, 1, 2}));

  const SparseTensor a({3, 1}, {{2, 0, 1}, {0, 0, 0}}, {1, 1, 1});
  EXPECT_EQ(build_permutation(a, 0).order, (std::vector<std::size_t>{1, 2, 0}));

  const SparseTensor ties({2, 1}, {{1, 1, 0}, {0, 0, 0}}, {1, 1, 1});
  EXPECT_EQ(build_permutation(ties, 0).order, (std::vector<std::size_t>{2, 0, 1}));

  EXPECT_THROW(build_permutation(ties, 2), ContractError);
}

TEST(BuildPermutation, SortedBijectionOnRandomTensors) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = oracle::random_tensor(rng);
    for (const auto& p : build_permutations(t)) {
      std::set<std::size_t> seen(p.order.begin(), p.order.end());
      ASSERT_EQ(seen.size(), t.nnz());
      ASSERT_EQ(*seen.rbegin(), t.nnz() - 1);
      for (std::size_t k = 1; k < p.order.size(); ++k) {
        const auto prev = t.coord(p.order[k - 1], p.mode), cur = t.coord(p.order[k], p.mode);
        ASSERT_LE(prev, cur);
        if (prev == cur) ASSERT_LT(p.order[k - 1], p.order[k]);  // stable
      }
    }
  }
}

TEST(RowSegments, Examples) {
  const SparseTensor one({5}, {{4}}, {1});
  EXPECT_EQ(row_segments(build_permutation(one, 0), one),
            (std::vector<RowSegment>{{4, 0, 1}}));

  const SparseTensor t({2}, {{1, 0, 0}}, {1, 1, 1});
  EXPECT_EQ(row_segments(build_permutation(t, 0), t),
            (std::vector<RowSegment>{{0, 0, 2}, {1, 2, 3}}));

  const SparseTensor same({5, 3}, {{4, 4, 4, 4}, {0, 1, 2, 0}}, {1, 1, 1, 1});
  EXPECT_EQ(row_segments(build_permutation(same, 0), same),
            (std::vector<RowSegment>{{4, 0, 4}}));
}

TEST(RowSegments, PartitionProperty) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = oracle::random_tensor(rng);
    for (const auto& p : build_permutations(t)) {
      const auto segs = row_segments(p, t);
      std::size_t expect_start = 0;
      for (std::size_t s = 0; s < segs.size(); ++s) {
        ASSERT_EQ(segs[s].start, expect_start);
        ASSERT_LT(segs[s].start, segs[s].end);
        if (s > 0) ASSERT_LT(segs[s - 1].row, segs[s].row);
        for (std::size_t k = segs[s].start; k < segs[s].end; ++k)
          ASSERT_EQ(t.coord(p.order[k], p.mode), segs[s].row);
        expect_start = segs[s].end;
      }
      ASSERT_EQ(expect_start, t.nnz());
    }
  }
}
