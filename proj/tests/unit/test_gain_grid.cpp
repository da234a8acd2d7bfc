#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hwnroute/error.hpp"
#include "hwnroute/gain_grid.hpp"

namespace hwnroute {
namespace {

GainGrid parse(const std::string& text) {
  std::istringstream in(text);
  return load_gain_grid(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

TEST(GainGrid, MinimalGrid) {
  const GainGrid g = parse("nodes=2 resources=1\n0 1 0 0.5 -0.25\n");
  EXPECT_EQ(g.node_count(), 2);
  EXPECT_EQ(g.resource_count(), 1);
  EXPECT_EQ(g.at(0, 1, 0), std::complex<double>(0.5, -0.25));
  EXPECT_EQ(g.at(1, 0, 0), g.at(0, 1, 0));
  EXPECT_TRUE(g.complete());
}

TEST(GainGrid, EntryMayBeGivenInEitherDirection) {
  const GainGrid g = parse("nodes=2 resources=1\n1 0 0 2 0\n");
  EXPECT_EQ(g.at(0, 1, 0), std::complex<double>(2, 0));
}

TEST(GainGrid, MissingEntryIsIncomplete) {
  EXPECT_NE(error_of("nodes=3 resources=1\n0 1 0 1 0\n0 2 0 1 0\n").find("incomplete grid"), std::string::npos);
}

TEST(GainGrid, DuplicateEntryReportsLine) {
  const std::string e = error_of("nodes=2 resources=1\n0 1 0 1 0\n1 0 0 1 0\n");
  EXPECT_NE(e.find("duplicate entry"), std::string::npos);
  EXPECT_NE(e.find("line 3"), std::string::npos);
}

TEST(GainGrid, MalformedHeader) {
  EXPECT_NE(error_of("nodes=2\n0 1 0 1 0\n").find("malformed header"), std::string::npos);
  EXPECT_NE(error_of("nodes=x resources=1\n").find("malformed header"), std::string::npos);
  EXPECT_NE(error_of("").find("malformed header"), std::string::npos);
  EXPECT_NE(error_of("nodes=1 resources=1\n").find("malformed header"), std::string::npos);
}

TEST(GainGrid, MalformedEntries) {
  EXPECT_NE(error_of("nodes=2 resources=1\n0 1 0 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("nodes=2 resources=1\n0 1 0 abc 0\n").find("malformed entry"), std::string::npos);
  EXPECT_NE(error_of("nodes=2 resources=1\n0 2 0 1 0\n").find("out of range"), std::string::npos);
  EXPECT_NE(error_of("nodes=2 resources=1\n1 1 0 1 0\n").find("self link"), std::string::npos);
}

TEST(GainGrid, SkipsBlankLines) {
  const GainGrid g = parse("\nnodes=2 resources=2\n\n0 1 0 1 0\n\n0 1 1 0 1\n");
  EXPECT_EQ(g.at(1, 0, 1), std::complex<double>(0, 1));
}

TEST(GainGrid, CanonicalRoundTripIsByteIdentical) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 1e-4);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const int r = 1 + static_cast<int>(rng() % 4);
    GainGrid g(n, r);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int c = 0; c < r; ++c) {
          const double re = nd(rng);
          const double im = nd(rng);
          g.set(i, j, c, {re, im});
        }
      }
    }
    std::ostringstream first;
    write_gain_grid(first, g);
    const GainGrid back = parse(first.str());
    EXPECT_EQ(back, g);
    std::ostringstream second;
    write_gain_grid(second, back);
    EXPECT_EQ(first.str(), second.str());
  }
}

}  // namespace
}  // namespace hwnroute
