#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pointctl/errors.hpp"
#include "pointctl/mesh.hpp"

using namespace pointctl;

namespace {

double norm(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

// Cells as sorted coordinate tuples (rounded), independent of numbering.
std::vector<std::vector<std::array<double, 3>>> canonical_cells(const Mesh& mesh) {
  std::vector<std::vector<std::array<double, 3>>> out;
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    std::vector<std::array<double, 3>> cell;
    for (int v : mesh.cell(c)) {
      std::array<double, 3> x = mesh.vertex(v);
      for (double& xi : x) xi = std::round(xi * 1e9) / 1e9;
      cell.push_back(x);
    }
    std::sort(cell.begin(), cell.end());
    out.push_back(cell);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void expect_valid(const Mesh& mesh) {
  EXPECT_TRUE(is_conforming(mesh));
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) EXPECT_GT(mesh.signed_volume(c), 0.0);
  EXPECT_LE(shape_regularity(mesh), 10.0);
}

}  // namespace

TEST(Square, CountsAndSize) {
  const Mesh one = build_unit_square(1);
  EXPECT_EQ(one.num_cells(), 2u);
  EXPECT_EQ(one.num_vertices(), 4u);

  const Mesh four = build_unit_square(4);
  EXPECT_EQ(four.num_cells(), 32u);
  EXPECT_EQ(four.num_vertices(), 25u);
  EXPECT_EQ(four.num_vertices() - four.num_boundary_vertices(), 9u);
  EXPECT_NEAR(mesh_size(four), std::sqrt(2.0) / 4.0, 1e-15);
  EXPECT_NEAR(mesh_size(four), 0.353553, 1e-6);
  EXPECT_EQ(build_unit_square(8).num_vertices(), 81u);
  EXPECT_NEAR(mesh_volume(four), 1.0, 1e-13);
  expect_valid(four);
}

TEST(Square, RefinementMatchesDirectConstruction) {
  EXPECT_EQ(canonical_cells(refine_uniform(build_unit_square(1))), canonical_cells(build_unit_square(2)));
  EXPECT_EQ(canonical_cells(refine_uniform(build_unit_square(3))), canonical_cells(build_unit_square(6)));
}

TEST(Square, ReferenceTriangleDiameter) {
  const Mesh tri(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2, 0}});
  EXPECT_NEAR(mesh_size(tri), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(tri.num_boundary_vertices(), 3u);
}

TEST(Disk, VertexCountsAndBoundary) {
  const std::size_t expected[] = {25, 81, 289, 1089};
  for (int level = 0; level < 4; ++level) {
    const Mesh mesh = build_unit_disk(level);
    EXPECT_EQ(mesh.num_vertices(), expected[level]);
    expect_valid(mesh);
    bool has_origin = false;
    for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v) {
      if (mesh.is_boundary_vertex(v)) EXPECT_NEAR(norm(mesh.vertex(v)), 1.0, 1e-12);
      if (norm(mesh.vertex(v)) == 0.0) has_origin = true;
    }
    EXPECT_TRUE(has_origin);
  }
}

TEST(Disk, MeshSizeHalvesAndSkinShrinks) {
  std::vector<double> sizes;
  std::vector<double> skin;
  for (int level = 0; level < 5; ++level) {
    const Mesh mesh = build_unit_disk(level);
    sizes.push_back(mesh_size(mesh));
    skin.push_back(std::numbers::pi - mesh_volume(mesh));
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    // Boundary cells straighten under refinement, so the ratio only tends to 2.
    EXPECT_NEAR(sizes[i - 1] / sizes[i], 2.0, 0.15);
    EXPECT_GT(skin[i], 0.0);
  }
  // |Omega \ Omega_h| <= C h^2 with C fitted on level 1.
  const double c = skin[1] / (sizes[1] * sizes[1]);
  for (std::size_t i = 1; i < sizes.size(); ++i) EXPECT_LE(skin[i], 1.05 * c * sizes[i] * sizes[i]);
}

TEST(Ball, VertexCountsOrientationConformity) {
  const std::size_t expected[] = {27, 125, 729, 4913};
  for (int level = 0; level < 4; ++level) {
    const Mesh mesh = build_unit_ball(level);
    EXPECT_EQ(mesh.num_vertices(), expected[level]);
    for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v) {
      if (mesh.is_boundary_vertex(v)) EXPECT_NEAR(norm(mesh.vertex(v)), 1.0, 1e-12);
    }
    if (level <= 2) expect_valid(mesh);
  }
}

TEST(Refinement, ChildVolumesAndParents) {
  const Mesh coarse = build_unit_square(3);
  const Mesh fine = refine_uniform(coarse);
  ASSERT_EQ(fine.parents().size(), fine.num_cells());
  std::vector<double> sums(coarse.num_cells(), 0.0);
  for (int c = 0; c < static_cast<int>(fine.num_cells()); ++c) sums[fine.parents()[c]] += fine.volume(c);
  for (int c = 0; c < static_cast<int>(coarse.num_cells()); ++c) EXPECT_NEAR(sums[c], coarse.volume(c), 1e-12);

  const Mesh ball = build_unit_ball(1);
  const Mesh ball_fine = refine_uniform(ball);
  EXPECT_EQ(ball_fine.num_cells(), 8 * ball.num_cells());
  // Existing vertices keep their coordinates.
  for (int v = 0; v < static_cast<int>(ball.num_vertices()); ++v) {
    EXPECT_EQ(ball_fine.vertex(v), ball.vertex(v));
  }
}

TEST(Refinement, DiskBoundaryStaysOnCircle) {
  const Mesh fine = refine_uniform(build_unit_disk(2));
  for (int v = 0; v < static_cast<int>(fine.num_vertices()); ++v) {
    if (fine.is_boundary_vertex(v)) EXPECT_NEAR(norm(fine.vertex(v)), 1.0, 1e-12);
  }
}

TEST(Locate, CentroidEdgeMidpointAndRandom) {
  const Mesh mesh = build_unit_square(4);
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    const auto loc = locate_point(mesh, mesh.centroid(c));
    EXPECT_EQ(loc.cell_index, c);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(loc.barycentric[i], 1.0 / 3.0, 1e-12);
  }
  // Midpoint of the diagonal of the first square is shared by cells 0 and 1.
  const auto shared = locate_point(mesh, {0.125, 0.125, 0.0});
  EXPECT_EQ(shared.cell_index, 0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int k = 0; k < 200; ++k) {
    const Point x{u(rng), u(rng), 0.0};
    const auto loc = locate_point(mesh, x, k % 7);
    double sum = 0.0;
    Point back{};
    const auto v = mesh.cell(loc.cell_index);
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(loc.barycentric[i], -1e-12);
      sum += loc.barycentric[i];
      for (int d = 0; d < 3; ++d) back[d] += loc.barycentric[i] * mesh.vertex(v[i])[d];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(back[d], x[d], 1e-12);
  }
}

TEST(Locate, BallRandomPoints) {
  const Mesh mesh = build_unit_ball(2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 100; ++k) {
    const Point x{u(rng), u(rng), u(rng)};
    const auto loc = locate_point(mesh, x);
    const Point back = mesh.map_to_physical(loc.cell_index, loc.barycentric);
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(back[d], x[d], 1e-12);
  }
}

TEST(Locate, OutsideThrows) {
  const Mesh mesh = build_unit_square(2);
  EXPECT_THROW(locate_point(mesh, {1.5, 0.5, 0.0}), PointOutsideMesh);
  // On the circle but between boundary vertices: outside the polygon.
  const Mesh disk = build_unit_disk(0);
  EXPECT_THROW(locate_point(disk, {std::cos(0.3), std::sin(0.3), 0.0}), PointOutsideMesh);
}

TEST(Mesh, RejectsNonConformingInput) {
  // Hanging node: the big triangle's edge is split by a vertex of the small ones.
  const Mesh hanging(2, {{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {1, 1, 0}, {2, 2, 0}, {2, 1, 0}},
                     {{0, 1, 2, 0}, {1, 5, 3, 0}, {5, 4, 3, 0}, {3, 4, 2, 0}});
  EXPECT_FALSE(is_conforming(hanging));
}
