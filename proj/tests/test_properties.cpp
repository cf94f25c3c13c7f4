#include <gtest/gtest.h>

#include <random>

#include "properties.hpp"

// Generators stay inside their advertised ranges; the invariant suites
// themselves run from the per-module test files.

TEST(Generators, RowsDescendWithinRange) {
  props::Rng rng(7);
  for (int k = 0; k < 500; ++k) {
    const auto rows = props::random_rows(rng);
    ASSERT_GE(rows.size(), 2u);
    ASSERT_LE(rows.size(), 9u);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      EXPECT_GE(rows[j].i, 0.2);
      EXPECT_LE(rows[j].i, 1.5);
      EXPECT_GE(rows[j].a, -90.0);
      EXPECT_LE(rows[j].a, 0.0);
      if (j) EXPECT_LT(rows[j].v, rows[j - 1].v);
    }
  }
}

TEST(Generators, SingleCasesAreSolvableNetworks) {
  props::Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const props::SingleCase s = props::random_single(rng, k % 2 == 0);
    EXPECT_NO_THROW(s.network.validate());
    EXPECT_GT(std::abs(s.z_th), 0.0);
    EXPECT_GE(s.unit_mva, 20.0);
    EXPECT_LE(s.unit_mva, 400.0);
  }
}

TEST(Generators, MeshesValidate) {
  props::Rng rng(9);
  for (int k = 0; k < 200; ++k) {
    const props::MeshCase m = props::random_mesh(rng, 3);
    EXPECT_GE(m.network.buses.size(), 3u);
    EXPECT_LE(m.network.buses.size(), 7u);
    EXPECT_LE(m.network.ibrs.size(), 3u);
    EXPECT_NO_THROW(m.network.validate());
  }
}

TEST(Generators, SameSeedSameCases) {
  props::Rng a(10), b(10);
  for (int k = 0; k < 20; ++k) {
    const auto x = props::random_single(a, false), y = props::random_single(b, false);
    EXPECT_EQ(x.z_th, y.z_th);
    EXPECT_EQ(x.v_th, y.v_th);
  }
}
