#include <catch2/catch_amalgamated.hpp>

#include "multichain/projection.hpp"
#include "multichain/rng.hpp"

using namespace multichain;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("worked projections") {
  const FlooredSimplexPoint e = euclid_project_floor(vec({1.0, 0.0}), 0.2);
  CHECK(e.p(0) == 0.8);
  CHECK(e.p(1) == 0.2);
  const FlooredSimplexPoint k = kl_project_floor(vec({0.9, 0.1}), 0.2);
  CHECK(k.p(0) == 0.8);
  CHECK(k.p(1) == 0.2);
}

TEST_CASE("zero floor leaves simplex points fixed") {
  const Vector w = vec({0.3, 0.45, 0.25});
  const FlooredSimplexPoint e = euclid_project_floor(w, 0.0);
  CHECK(inf_norm(Vector(e.p - w)) <= 1e-12);
  const FlooredSimplexPoint k = kl_project_floor(w, 0.0);
  CHECK(inf_norm(Vector(k.p - w)) <= 1e-12);
}

TEST_CASE("alpha at 1/d pins the single feasible point") {
  const FlooredSimplexPoint e =
      euclid_project_floor(vec({5.0, -3.0, 0.1, 9.0}), 0.25);
  for (int i = 0; i < 4; ++i) CHECK(e.p(i) == 0.25);
  const FlooredSimplexPoint k =
      kl_project_floor(vec({0.7, 0.1, 0.1, 0.1}), 0.25);
  for (int i = 0; i < 4; ++i) CHECK(k.p(i) == 0.25);
}

TEST_CASE("infeasible floor is rejected") {
  CHECK_THROWS_AS(euclid_project_floor(vec({0.5, 0.5}), 0.6),
                  std::invalid_argument);
  CHECK_THROWS_AS(kl_project_floor(vec({0.5, 0.5}), -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(kl_project_floor(vec({1.0, 0.0}), 0.1),
                  std::invalid_argument);  // zero weight
}

TEST_CASE("divergences") {
  const Vector a = vec({0.7, 0.3});
  CHECK(divergence(DivergenceKind::euclidean, a, a) == 0.0);
  CHECK(divergence(DivergenceKind::kl, a, a) == 0.0);
  CHECK(divergence(DivergenceKind::euclidean, vec({1.0, 0.0}), a) ==
        Catch::Approx(0.5 * (0.09 + 0.09)));
  // 0 log 0 = 0: a zero in the first argument is fine
  CHECK(divergence(DivergenceKind::kl, vec({1.0, 0.0}), a) ==
        Catch::Approx(std::log(1.0 / 0.7)));
  CHECK_THROWS_AS(divergence(DivergenceKind::kl, a, vec({1.0, 0.0})),
                  std::invalid_argument);
}

TEST_CASE("mirror steps") {
  SECTION("euclidean unclipped") {
    const FlooredSimplexPoint s = mirror_step(vec({0.5, 0.5}), vec({1.0, 0.0}),
                                              0.1, DivergenceKind::euclidean,
                                              0.0);
    CHECK(s.p(0) == Catch::Approx(0.55).margin(1e-12));
    CHECK(s.p(1) == Catch::Approx(0.45).margin(1e-12));
  }
  SECTION("huge step saturates at the clipped vertex") {
    for (DivergenceKind kind :
         {DivergenceKind::euclidean, DivergenceKind::kl}) {
      const FlooredSimplexPoint s =
          mirror_step(vec({0.5, 0.5}), vec({1.0, 0.0}), 1e3, kind, 0.1);
      CHECK(s.p(0) == Catch::Approx(0.9).margin(1e-12));
      CHECK(s.p(1) == Catch::Approx(0.1).margin(1e-12));
    }
  }
  SECTION("zero gradient is a fixed point") {
    const Vector cur = vec({0.6, 0.25, 0.15});
    for (DivergenceKind kind :
         {DivergenceKind::euclidean, DivergenceKind::kl}) {
      const FlooredSimplexPoint s =
          mirror_step(cur, Vector::Zero(3), 0.7, kind, 0.1);
      CHECK(inf_norm(Vector(s.p - cur)) <= 1e-12);
    }
  }
  SECTION("current row outside the floored simplex is rejected") {
    CHECK_THROWS_AS(mirror_step(vec({0.95, 0.05}), vec({0.0, 0.0}), 1.0,
                                DivergenceKind::kl, 0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("projection outputs are feasible on adversarial magnitudes") {
  KeyedRng rng{99, 0xB16u};
  for (int i = 0; i < 200; ++i) {
    const int d = 2 + rng.next_below(6);
    const double alpha = 0.9 * rng.next_u01() / d;
    Vector q(d);
    const double scale = std::pow(10.0, rng.next_in(0.0, 10.0));
    for (int x = 0; x < d; ++x) q(x) = rng.next_in(-scale, scale);
    const FlooredSimplexPoint e = euclid_project_floor(q, alpha);
    CHECK(std::abs(e.p.sum() - 1.0) <= 1e-12);
    CHECK(e.p.minCoeff() >= alpha);
  }
}
