#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wienergauge/geometry.hpp"

using namespace wienergauge;

TEST(Format, RoundTripsSeventeenDigits) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    double back = 0.0;
    ASSERT_TRUE(parse_real(format_real(v), back));
    EXPECT_EQ(back, v);
  }
  double x = 0.0;
  EXPECT_TRUE(parse_real("+0.7853981634", x));
  EXPECT_DOUBLE_EQ(x, 0.7853981634);
  EXPECT_FALSE(parse_real("1.5x", x));
  EXPECT_FALSE(parse_real("", x));
}

TEST(Grid, IndexRoundTrip) {
  const Grid g = make_grid(3, {0.0, 0.0, 0.0}, 1.0, 0.25);
  EXPECT_EQ(g.counts[0], 9);
  EXPECT_EQ(g.size(), 729u);
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, std::size_t{728}}) EXPECT_EQ(g.index(g.unravel(i)), i);
  EXPECT_DOUBLE_EQ(g.point(728)[2], 1.0);
  EXPECT_TRUE(g.on_box_boundary(0));
  EXPECT_FALSE(g.on_box_boundary(g.index({4, 4, 4})));
  EXPECT_NEAR(g.inscribed_radius({0.0, 0.0, 0.0}), 1.0, 1e-15);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(make_grid(2, {0.0, 0.0, 0.0}, 0.1, 0.1), PreconditionError);
  EXPECT_THROW(make_grid(3, {0.0, 0.0, 0.0}, 1.0, 1e-3), BudgetError);
  EXPECT_THROW(make_grid(4, {0.0, 0.0, 0.0}, 1.0, 0.1), PreconditionError);
}

TEST(Grid, RefineHalvesSpacing) {
  const Grid g = make_grid(2, {0.0, 0.0, 0.0}, 1.0, 0.25);
  const Grid f = refine(g);
  EXPECT_DOUBLE_EQ(f.h, 0.125);
  EXPECT_EQ(f.counts[0], 17);
  EXPECT_DOUBLE_EQ(f.origin[0], g.origin[0]);
}

TEST(Grid, BinaryRoundTrip) {
  const Grid g = make_grid(2, {0.5, -0.5, 0.0}, 1.0, 0.5);
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = std::sin(static_cast<double>(i));
  std::stringstream ss;
  write_binary(ss, f);
  EXPECT_EQ(ss.str().size(), 8u * (1 + 2 + 2 + 1 + f.size()));
  const GridFunction back = read_binary(ss);
  EXPECT_EQ(back.grid.counts[1], g.counts[1]);
  EXPECT_EQ(back.grid.origin[0], g.origin[0]);
  EXPECT_EQ(back.values, f.values);
}

TEST(Grid, CsvHeader) {
  std::stringstream ss;
  write_csv(ss, GridFunction(make_grid(2, {0.0, 0.0, 0.0}, 1.0, 0.5)));
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "x1,x2,value");
}

TEST(Gallery, NamesAndDefaults) {
  for (const auto& n : gallery_names()) {
    const DomainSpec d = gallery(n);
    EXPECT_TRUE(d.dim == 2 || d.dim == 3) << n;
    EXPECT_TRUE(is_boundary_point(d, BoundaryPoint{{0.0, 0.0, 0.0}, d.dim}, 0.01) || n == "full_ball") << n;
  }
  EXPECT_EQ(gallery("cone").dim, 3);
  EXPECT_EQ(gallery("spine").dim, 3);
  EXPECT_EQ(gallery("slit").dim, 2);
  EXPECT_THROW(gallery("moebius"), PreconditionError);
  EXPECT_THROW(gallery("cone:abc"), PreconditionError);
}

TEST(Gallery, HalfSpaceAndCone) {
  const DomainSpec hs = gallery("half_space");
  EXPECT_TRUE(hs.in_complement({0.3, 0.0, 0.0}));
  EXPECT_TRUE(hs.in_complement({0.3, -0.1, 0.0}));
  EXPECT_FALSE(hs.in_complement({0.3, 0.1, 0.0}));
  const DomainSpec cone = gallery("cone:0.7853981634");
  EXPECT_TRUE(cone.in_complement({0.0, 0.0, -1.0}));
  EXPECT_FALSE(cone.in_complement({0.0, 0.0, 1.0}));
  EXPECT_FALSE(cone.in_complement({1.0, 0.0, -0.5}));
}

TEST(Rasterize, HalfSpaceNodeCount) {
  const Grid g = make_grid(2, {0.0, 0.0, 0.0}, 1.0, 0.25);
  const NodeSet k = rasterize_obstacle(gallery("half_space"), BoundaryPoint{{0.0, 0.0, 0.0}, 2}, 0.5, g);
  // Lower half-disc of radius 0.5 on a 0.25 lattice, including the axis.
  EXPECT_EQ(k.size(), 9u);
  EXPECT_TRUE(std::is_sorted(k.begin(), k.end()));
  EXPECT_THROW(rasterize_obstacle(gallery("half_space"), BoundaryPoint{{0.0, 0.0, 0.0}, 2}, 1.5, g),
               PreconditionError);
}

TEST(Cutoff, ShapeAndGuards) {
  const Grid g = make_grid(2, {0.0, 0.0, 0.0}, 1.0, 0.125);
  const CutoffSpec c{{0.0, 0.0, 0.0}, 0.25};
  const GridFunction f = standard_cutoff(c, g);
  EXPECT_DOUBLE_EQ(cutoff_value(c, {0.1, 0.0, 0.0}, 2), 1.0);
  EXPECT_DOUBLE_EQ(cutoff_value(c, {0.375, 0.0, 0.0}, 2), 0.5);
  EXPECT_DOUBLE_EQ(cutoff_value(c, {0.6, 0.0, 0.0}, 2), 0.0);
  EXPECT_DOUBLE_EQ(f.values[g.index({8, 8, 0})], 1.0);
  EXPECT_THROW(standard_cutoff(CutoffSpec{{0.0, 0.0, 0.0}, 0.1}, g), PreconditionError);
  EXPECT_THROW(standard_cutoff(CutoffSpec{{0.9, 0.0, 0.0}, 0.25}, g), PreconditionError);
}
