#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "simplexdir/dirext.hpp"
#include "simplexdir/rng.hpp"

using namespace simplexdir;

namespace {

SimplexPoint random_point(Rng& rng) {
  Eigen::Vector3d e;
  for (int i = 0; i < 3; ++i) e[i] = rng.exponential();
  return SimplexPoint(e / e.sum(), 1e-9);
}

}  // namespace

TEST_CASE("rotation matrix frame") {
  SUBCASE("pole convention") {
    const RotationMatrix op = rotation_matrix(SimplexPoint(0.0, 0.0, 1.0));
    CHECK(op.pole_convention);
    CHECK((op.o - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("orthogonality and the sqrt mapping") {
    Rng rng(101);
    for (int rep = 0; rep < 10000; ++rep) {
      const SimplexPoint x = random_point(rng);
      const RotationMatrix op = rotation_matrix(x);
      const Eigen::Matrix3d gram = op.o.transpose() * op.o;
      CHECK((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::Vector3d mapped = op.o * Eigen::Vector3d(0, 0, 1);
      CHECK((mapped - x.coords().cwiseSqrt()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("columns at the barycenter") {
    const RotationMatrix op = rotation_matrix(SimplexPoint(1.0 / 3, 1.0 / 3, 1.0 / 3));
    for (int i = 0; i < 3; ++i) {
      CHECK(op.o.col(i).norm() == doctest::Approx(1.0).epsilon(1e-14));
      for (int j = i + 1; j < 3; ++j)
        CHECK(std::abs(op.o.col(i).dot(op.o.col(j))) < 1e-14);
    }
  }
}

TEST_CASE("direction extraction") {
  SUBCASE("zero movement errors") {
    const SimplexPoint x(0.2, 0.5, 0.3);
    CHECK_THROWS_AS(extract_direction(x, x), std::domain_error);
  }
  SUBCASE("small movement in the frame's first axis has direction zero") {
    const SimplexPoint x1(0.3, 0.4, 0.3);
    const SimplexPoint x2 = apply_direction(x1, 0.0, 0.05);
    const auto obs = extract_direction(x1, x2);
    CHECK(circular_distance(obs.direction, 0.0) < 1e-9);
    CHECK(obs.magnitude == doctest::Approx(0.05).epsilon(1e-9));
  }
  SUBCASE("inverse construction round trip") {
    Rng rng(102);
    for (int rep = 0; rep < 2000; ++rep) {
      // interior start, modest magnitude keeps the movement in the orthant
      Eigen::Vector3d e;
      for (int i = 0; i < 3; ++i) e[i] = 0.5 + rng.uniform();
      const SimplexPoint x1(e / e.sum(), 1e-9);
      const double dir = rng.uniform(0.0, kTwoPi);
      const double mag = rng.uniform(1e-3, 0.15);  // direction is ill-conditioned as mag -> 0
      SimplexPoint x2;
      try {
        x2 = apply_direction(x1, dir, mag);
      } catch (const std::domain_error&) {
        continue;  // movement left the orthant; skip
      }
      const auto obs = extract_direction(x1, x2);
      CHECK(circular_distance(obs.direction, dir) < 1e-10);
      CHECK(std::abs(obs.magnitude - mag) < 1e-10);
    }
  }
  SUBCASE("directions cover the full circle") {
    Rng rng(103);
    std::vector<int> octant(8, 0);
    for (int rep = 0; rep < 4000; ++rep) {
      const SimplexPoint a = random_point(rng);
      const SimplexPoint b = random_point(rng);
      try {
        const auto obs = extract_direction(a, b);
        CHECK(obs.direction >= 0.0);
        CHECK(obs.direction < kTwoPi);
        CHECK(obs.magnitude >= 0.0);
        ++octant[std::min(7, static_cast<int>(obs.direction / kTwoPi * 8))];
      } catch (const std::domain_error&) {
      }
    }
    for (int b = 0; b < 8; ++b) CHECK(octant[b] > 0);
  }
}

TEST_CASE("deduplication") {
  const SimplexPoint x1(0.2, 0.5, 0.3), x2(0.4, 0.1, 0.5);
  DirectionObservation a{x1, 1.0, 0.1}, b{x2, 2.0, 0.2};
  SUBCASE("no duplicates is the identity") {
    const auto [kept, removed] = dedup({a, b}, 0.0);
    CHECK(kept.size() == 2);
    CHECK(removed == 0);
  }
  SUBCASE("exact repeats collapse") {
    const auto [kept, removed] = dedup({a, a}, 0.0);
    CHECK(kept.size() == 1);
    CHECK(removed == 1);
  }
  SUBCASE("one observation per location survives") {
    DirectionObservation c{x1, 2.5, 0.3}, d{x1, 4.0, 0.4};
    const auto [kept, removed] = dedup({a, c, d}, 0.0);
    CHECK(kept.size() == 1);
    CHECK(removed == 2);
    CHECK(kept[0].direction == 1.0);  // first occurrence kept
  }
  SUBCASE("idempotent") {
    DirectionObservation c{x1, 2.5, 0.3};
    const auto [once, r1] = dedup({a, b, c}, 0.0);
    const auto [twice, r2] = dedup(once, 0.0);
    CHECK(r2 == 0);
    CHECK(twice.size() == once.size());
  }
}

TEST_CASE("dataset loading") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path();
  SUBCASE("header-only file is empty") {
    const std::string p = (dir / "sdx_empty.csv").string();
    std::ofstream(p) << "x1,x2,x3,y\n";
    const Dataset d = load_dataset(p);
    CHECK(d.n() == 0);
    fs::remove(p);
  }
  SUBCASE("negative proportion is rejected with the line number") {
    const std::string p = (dir / "sdx_neg.csv").string();
    std::ofstream(p) << "x1,x2,x3,y\n0.5,0.5,0.0,1.0\n-0.1,0.6,0.5,2.0\n";
    try {
      load_dataset(p);
      FAIL("expected a parse error");
    } catch (const std::domain_error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    fs::remove(p);
  }
  SUBCASE("out-of-range direction is rejected") {
    const std::string p = (dir / "sdx_range.csv").string();
    std::ofstream(p) << "x1,x2,x3,y\n0.5,0.5,0.0,6.9\n";
    CHECK_THROWS_AS(load_dataset(p), std::domain_error);
    fs::remove(p);
  }
  SUBCASE("written fixtures parse back bit-exactly") {
    Dataset d;
    Rng rng(104);
    for (int i = 0; i < 3; ++i) d.locations.push_back(random_point(rng));
    d.directions = Eigen::Vector3d(0.1234567890123456, 3.9, 6.28);
    const std::string p = (dir / "sdx_fix.csv").string();
    write_dataset(p, d);
    const Dataset back = load_dataset(p);
    REQUIRE(back.n() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(back.directions[i] == d.directions[i]);
      CHECK((back.locations[i].coords() - d.locations[i].coords()).cwiseAbs().maxCoeff() == 0.0);
    }
    fs::remove(p);
  }
}
