// Copyright 2026 The asann Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <doctest.h>

#include "asann/error.h"
#include "asann/solver.h"
#include "oracles.h"

namespace asann {
namespace {

ProjectionMatrix Ones12() {
  RowMatrix a(1, 2);
  a << 1.0, 1.0;
  return ProjectionMatrix(a, MatrixKind::kRandomGaussian, 0);
}

Vector Vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double CertificateTol(const ProjectionMatrix& a, const Vector& y) {
  return 1e-8 * std::max(1.0, (a.entries().transpose() * y).cwiseAbs().maxCoeff());
}

TEST_CASE("two equal columns: symmetric saturated solution") {
  const auto a = Ones12();
  const auto s = Solve(a, Vec({1.0}), 1.0);
  CHECK(s.x(0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(s.x(1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(s.linf == doctest::Approx(0.25));
  CHECK(s.h_start == doctest::Approx(2.0));
  CHECK(s.saturated == std::vector<int>{0, 1});

  const auto rep = CheckOptimality(a, Vec({1.0}), 1.0, s.x, 1e-8);
  CHECK(rep.pass);
  CHECK(rep.subgradient(0) == doctest::Approx(0.5));
  CHECK(rep.subgradient(1) == doctest::Approx(0.5));
  CHECK(rep.subgradient_l1 == doctest::Approx(1.0));
}

TEST_CASE("zero input gives zero code and empty trace") {
  const auto a = MakeUniformFrame(4, 8, 1);
  for (double h : {1e-6, 1.0, 10.0}) {
    const auto s = Solve(a, Vector::Zero(4), h);
    CHECK(s.x.isZero(0.0));
    CHECK(s.linf == 0.0);
    CHECK(s.saturated.empty());
    CHECK(s.breakpoints.empty());
  }
}

TEST_CASE("penalty above the path start returns zero") {
  const auto a = Ones12();
  const auto s = Solve(a, Vec({1.0}), 2.5);
  CHECK(s.x.isZero(0.0));
  CHECK(s.saturated.empty());
  CHECK(CheckOptimality(a, Vec({1.0}), 2.5, s.x, 1e-12).pass);
}

TEST_CASE("square orthogonal matrix converges to A^T y") {
  const auto a = MakeUniformFrame(6, 6, 11);
  const Vector y = testing::RandomVector(6, 5);
  const double h1 = (a.entries().transpose() * y).lpNorm<1>();
  const auto s = Solve(a, y, 1e-12 * h1);
  const Vector expected = a.entries().transpose() * y;
  CHECK((s.x - expected).cwiseAbs().maxCoeff() <= 1e-6);
}

// Reference minimizers computed with an interior-point conic solver
// (cvxpy/Clarabel) and frozen here.
TEST_CASE("matches conic-solver reference minimizers") {
  RowMatrix a1(2, 3);
  a1 << 1, 0, 1, 0, 1, 1;
  const ProjectionMatrix p1(a1, MatrixKind::kRandomGaussian, 0);
  const Vector y1 = Vec({1.0, 0.5});
  struct Case {
    double h;
    Vector x;
    double objective;
  };
  for (const Case& c : {Case{0.5, Vec({0.375, 0.125, 0.375}), 0.21875},
                        Case{0.1, Vec({0.475, 0.025, 0.475}), 0.04875},
                        Case{1e-3, Vec({0.49975, 0.00025, 0.49975}),
                             0.000499875}}) {
    const auto s = Solve(p1, y1, c.h);
    CHECK((s.x - c.x).cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(Objective(p1, y1, c.h, s.x) == doctest::Approx(c.objective).epsilon(1e-7));
  }

  RowMatrix a2(2, 4);
  a2 << 2, -1, 0.5, 1, 0.5, 1, -1, 2;
  const ProjectionMatrix p2(a2, MatrixKind::kRandomGaussian, 0);
  const Vector y2 = Vec({0.3, -1.2});
  auto s = Solve(p2, y2, 1.0);
  CHECK((s.x - Vec({0.05803489, -0.2466483, 0.2466483, -0.2466483}))
            .cwiseAbs()
            .maxCoeff() <= 1e-6);
  CHECK(Objective(p2, y2, 1.0, s.x) ==
        doctest::Approx(0.2778696052420082).epsilon(1e-7));
  s = Solve(p2, y2, 0.2);
  CHECK((s.x - Vec({0.0697888, -0.29660239, 0.29660239, -0.29660239}))
            .cwiseAbs()
            .maxCoeff() <= 1e-6);
}

TEST_CASE("solver beats subgradient oracle on random d=4, m=8 instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = MakeRandomGaussian(4, 8, 100 + seed);
    const Vector y = testing::RandomVector(4, 200 + seed);
    const auto s = Solve(a, y, 1.0);
    const double oracle = testing::SubgradientOracle(a.entries(), y, 1.0, 50000);
    const double solver = testing::ObjectiveByLoops(a.entries(), y, 1.0, s.x);
    CHECK(solver <= oracle + 1e-6);
  }
}

TEST_CASE("certificate and anti-sparsity on random frames") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int d = 2 + static_cast<int>(seed % 7);
    const int m = d + static_cast<int>((seed * 7) % (3 * d + 1));
    const auto a = MakeUniformFrame(d, m, seed);
    const Vector y = testing::RandomVector(d, 1000 + seed);
    const double h1 = (a.entries().transpose() * y).lpNorm<1>();
    for (double h : {1.0, 0.1 * h1, 1e-6 * h1}) {
      const auto s = Solve(a, y, h);
      const auto rep = CheckOptimality(a, y, h, s.x, CertificateTol(a, y));
      CHECK_MESSAGE(rep.pass, "seed=", seed, " h=", h,
                    " worst=", rep.worst_violation);
      for (int i = 0; i < m; ++i) CHECK(std::abs(s.x(i)) <= s.linf);
      if (h <= 1e-6 * h1) {
        CHECK(static_cast<int>(s.saturated.size()) >= m - d + 1);
      }
    }
  }
}

TEST_CASE("breakpoint trace is monotone and starts at |A^T y|_1") {
  const auto a = MakeUniformFrame(8, 24, 3);
  const Vector y = testing::RandomVector(8, 4);
  const double h1 = (a.entries().transpose() * y).lpNorm<1>();
  const auto trace = SolvePath(a, y, 1e-9 * h1);
  REQUIRE(trace.size() >= 2);
  CHECK(trace.front().event == PathEvent::kPathStart);
  CHECK(trace.front().h == doctest::Approx(h1));
  CHECK(trace.front().saturated_after.size() == 24);
  for (std::size_t k = 1; k < trace.size(); ++k) {
    CHECK(trace[k].h < trace[k - 1].h);
    CHECK(trace[k].linf >= trace[k - 1].linf);
    CHECK(trace[k].saturated_after.size() + trace[k].free_after.size() == 24);
  }
  CHECK(Solve(a, y, 1e-9 * h1).breakpoints.size() == trace.size());
}

TEST_CASE("two equal columns never release a component") {
  const auto trace = SolvePath(Ones12(), Vec({1.0}), 1e-12);
  REQUIRE(trace.size() == 1);
  CHECK(trace[0].h == doctest::Approx(2.0));
  CHECK(trace[0].saturated_after == std::vector<int>{0, 1});
  const auto s = Solve(Ones12(), Vec({1.0}), 1e-12);
  CHECK(s.linf == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("path is continuous across breakpoints") {
  const auto a = MakeRandomGaussian(5, 12, 8);
  const Vector y = testing::RandomVector(5, 9);
  const double h1 = (a.entries().transpose() * y).lpNorm<1>();
  const auto trace = SolvePath(a, y, 1e-6 * h1);
  REQUIRE(trace.size() > 3);
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double h = trace[k].h;
    const auto above = Solve(a, y, h * (1 + 1e-10));
    const auto below = Solve(a, y, h * (1 - 1e-10));
    CHECK((above.x - below.x).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("joint scaling of y and h scales the solution") {
  const auto a = MakeUniformFrame(6, 18, 21);
  const Vector y = testing::RandomVector(6, 22);
  for (double c : {0.01, 3.0, 250.0}) {
    const auto base = Solve(a, y, 0.3);
    const auto scaled = Solve(a, c * y, c * 0.3);
    CHECK((scaled.x - c * base.x).cwiseAbs().maxCoeff() <=
          1e-8 * c * base.linf);
  }
}

TEST_CASE("check_optimality arithmetic") {
  const auto a = Ones12();
  auto rep = CheckOptimality(a, Vec({1.0}), 1.0, Vec({0.25, 0.25}), 1e-8);
  CHECK(rep.pass);
  CHECK(rep.objective == doctest::Approx(0.375));

  rep = CheckOptimality(a, Vec({1.0}), 1.0, Vec({0.3, 0.3}), 1e-8);
  CHECK_FALSE(rep.pass);
  CHECK(rep.subgradient(0) == doctest::Approx(0.4));
  CHECK(rep.subgradient_l1 == doctest::Approx(0.8));

  const auto frame = MakeUniformFrame(3, 5, 2);
  rep = CheckOptimality(frame, Vector::Zero(3), 0.7, Vector::Zero(5), 1e-12);
  CHECK(rep.pass);
  CHECK(rep.subgradient.isZero(0.0));
}

TEST_CASE("reconstruct") {
  const auto a = Ones12();
  CHECK(Reconstruct(a, Vector::Zero(2)).isZero(0.0));
  CHECK(Reconstruct(a, Vec({0.25, 0.25}))(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(Reconstruct(a, Vector::Zero(3)), InvalidArgument);

  const auto frame = MakeUniformFrame(8, 32, 5);
  const Vector y = testing::RandomVector(8, 6);
  const double h1 = (frame.entries().transpose() * y).lpNorm<1>();
  const auto s = Solve(frame, y, 1e-10 * h1);
  CHECK((Reconstruct(frame, s.x) - y).norm() <= 1e-6 * y.norm());
}

TEST_CASE("invalid inputs") {
  const auto a = MakeUniformFrame(3, 6, 1);
  CHECK_THROWS_AS(Solve(a, Vector::Zero(4), 1.0), InvalidArgument);
  CHECK_THROWS_AS(Solve(a, Vector::Ones(3), 0.0), InvalidArgument);
  CHECK_THROWS_AS(Solve(a, Vector::Ones(3), -1.0), InvalidArgument);
  Vector bad = Vector::Ones(3);
  bad(1) = std::nan("");
  CHECK_THROWS_AS(Solve(a, bad, 1.0), InvalidArgument);
}

TEST_CASE("duplicated columns report a degenerate partition") {
  RowMatrix a(2, 4);
  a << 1, 1, 0, 0.3, 0, 0, 1, -0.2;
  const ProjectionMatrix p(a, MatrixKind::kRandomGaussian, 0);
  Vector y(2);
  y << 1.0, 0.01;
  // Columns 0 and 1 are identical, so releasing both would make the free
  // columns rank deficient.
  try {
    const auto s = Solve(p, y, 1e-9);
    CHECK(CheckOptimality(p, y, 1e-9, s.x, 1e-6).pass);
  } catch (const DegenerateInstanceError& e) {
    CHECK(std::string(e.what()).find("free={") != std::string::npos);
  }
}

}  // namespace
}  // namespace asann
