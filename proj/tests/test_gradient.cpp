#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "fd_check.hpp"
#include "fixtures.hpp"
#include "patrol/gradient.hpp"

using namespace patrol;

TEST_CASE("ramp penalty shape") {
  CHECK(phi(6.0, 6.0, 0.3) == 1.0);
  CHECK(phi(5.1, 6.0, 0.3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(phi(4.2, 6.0, 0.3) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(phi(3.0, 6.0, 0.3) == 0.0);
  CHECK(phi(1.0, 6.0, 0.3) == 0.0);
  // rises past the reference instead of clamping
  CHECK(phi(7.8, 6.0, 0.3) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("loss of the corridor strategy by hand") {
  PatrollingGraph g = fx::path3();
  RegularStrategy s = fx::return_with_memory(g);
  auto dec = bottom_sccs(support_graph(s));
  DamageMatrix dm = damage_matrix(s, g, dec, Exec::serial);
  LossBreakdown bd = loss(s, dm, 0.3, 0.2);
  CHECK(bd.hard_max == 6.0);
  // damages 6,5,1,5,4 against t1 and 4,2,6,2,6 against t2; the band starts
  // at 4.2, so the active ramps are 1, 4/9, 4/9, 1, 1
  double soft = 3.0 + 2.0 * (4.0 / 9) * (4.0 / 9);
  CHECK(bd.soft == doctest::Approx(soft).epsilon(1e-12));
  CHECK(bd.entropy == doctest::Approx(std::log(2.0) / 4).epsilon(1e-12));
  CHECK(bd.total == doctest::Approx(soft + 0.2 * std::log(2.0) / 4).epsilon(1e-12));
}

TEST_CASE("adjoint loss matches the direct loss") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 15; ++i) {
    PatrollingGraph g = fx::random_strongly_connected(rng, 7);
    auto shape = build_shape(g, fx::random_memory(rng, g));
    CoefficientMatrix theta = random_init(shape, rng);
    auto [bd, grad] = loss_grad(theta, g, 0.3, 0.2, Exec::serial);

    RegularStrategy s = softmax(theta);
    auto dec = bottom_sccs(support_graph(s));
    REQUIRE(dec.bottom_ids.size() == 1);
    LossBreakdown direct = loss(s, damage_matrix(s, g, dec, Exec::serial), 0.3, 0.2);
    CHECK(bd.hard_max == doctest::Approx(direct.hard_max).epsilon(1e-13));
    CHECK(bd.soft == doctest::Approx(direct.soft).epsilon(1e-12));
    CHECK(bd.total == doctest::Approx(direct.total).epsilon(1e-12));
  }
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(123);
  int checked = 0, skipped = 0;
  for (int i = 0; i < 8; ++i) {
    PatrollingGraph g = fx::random_strongly_connected(rng, 8);
    auto shape = build_shape(g, fx::random_memory(rng, g));
    CoefficientMatrix theta = random_init(shape, rng);
    auto rep = fd::check_gradient(g, theta, 0.3, 0.2);
    CHECK(rep.max_rel_err <= 1e-4);
    checked += rep.checked;
    skipped += rep.skipped;
  }
  CHECK(checked > 0);
  CHECK(skipped < checked);
}

TEST_CASE("gradient matches central differences without entropy") {
  std::mt19937_64 rng(321);
  for (int i = 0; i < 4; ++i) {
    PatrollingGraph g = fx::random_strongly_connected(rng, 6);
    auto shape = build_shape(g, fx::random_memory(rng, g));
    CoefficientMatrix theta = random_init(shape, rng);
    auto rep = fd::check_gradient(g, theta, 0.5, 0.0);
    CHECK(rep.max_rel_err <= 1e-4);
  }
}

TEST_CASE("gradient rows sum to zero") {
  // softmax rows are scale-invariant, so the chained gradient must have zero
  // row sums
  std::mt19937_64 rng(44);
  for (int i = 0; i < 10; ++i) {
    PatrollingGraph g = fx::random_strongly_connected(rng, 7);
    auto shape = build_shape(g, fx::random_memory(rng, g));
    CoefficientMatrix theta = random_init(shape, rng);
    auto [bd, grad] = loss_grad(theta, g, 0.3, 0.2, Exec::serial);
    double scale = 1.0;
    for (double v : grad.value) scale = std::max(scale, std::abs(v));
    for (int r = 0; r < shape->aug_count; ++r) {
      double sum = 0.0;
      for (int k = shape->row_offset[r]; k < shape->row_offset[r + 1]; ++k) sum += grad.value[k];
      CHECK(std::abs(sum) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("rows owned by the dominating target get no soft gradient") {
  // t1 is 100x more expensive, so every active-band damage belongs to t1,
  // and t1's own rows cannot influence the time to reach t1
  PatrollingGraph g = fx::twin_targets();
  g.costs = {100.0, 1.0};
  auto shape = build_shape(g, {1, 1});
  std::mt19937_64 rng(5);
  CoefficientMatrix theta = random_init(shape, rng);
  auto [bd, grad] = loss_grad(theta, g, 0.3, 0.0, Exec::serial);
  REQUIRE(bd.hard_max >= 100.0);
  for (int k = shape->row_offset[0]; k < shape->row_offset[1]; ++k)
    CHECK(std::abs(grad.value[k]) <= 1e-14);
  // t2's rows do carry gradient
  double t2mag = 0.0;
  for (int k = shape->row_offset[1]; k < shape->row_offset[2]; ++k)
    t2mag += std::abs(grad.value[k]);
  CHECK(t2mag > 1e-6);
}

TEST_CASE("serial and parallel gradients agree bitwise") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 10; ++i) {
    PatrollingGraph g = fx::random_strongly_connected(rng, 8);
    auto shape = build_shape(g, fx::random_memory(rng, g));
    CoefficientMatrix theta = random_init(shape, rng);
    auto [bs, gs] = loss_grad(theta, g, 0.3, 0.2, Exec::serial);
    auto [bp, gp] = loss_grad(theta, g, 0.3, 0.2, Exec::parallel);
    CHECK(bs.total == bp.total);
    CHECK(bs.soft == bp.soft);
    CHECK(bs.hard_max == bp.hard_max);
    CHECK(gs.value == gp.value);
  }
}
