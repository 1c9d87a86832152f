/*
 * Copyright 2026 The rdtrans Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rdtrans/rd_model.h"

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rdtrans/error.h"
#include "test_support.h"

namespace rdtrans {
namespace {

using testing::kTier1080;
using testing::kTier720;
using testing::PublishedCubic;
using testing::Rng;

CubicRD Published(int cluster, int tier) {
  return CubicRD(PublishedCubic(cluster, tier), {0.2, 6.0});
}

std::vector<double> DefaultGrid() {
  std::vector<double> g;
  for (int i = 0; i < 10; ++i) g.push_back(0.2 + (6.0 - 0.2) * i / 9.0);
  return g;
}

std::vector<RDPoint> Sample(const Cubic& c, const std::vector<double>& at) {
  std::vector<RDPoint> pts;
  for (double r : at) pts.push_back({r, testing::Direct(c, r)});
  return pts;
}

TEST_CASE("CubicRD validates its range and coefficients") {
  CHECK_THROWS_AS(CubicRD({1, 2, 3, 4}, {0.0, 6.0}), Error);
  CHECK_THROWS_AS(CubicRD({1, 2, 3, 4}, {6.0, 0.2}), Error);
  CHECK_THROWS_AS(
      CubicRD({1, std::numeric_limits<double>::quiet_NaN(), 3, 4}, {0.2, 6.0}),
      Error);
  const CubicRD ok({1, 2, 3, 4}, {0.2, 6.0});
  CHECK(ok.IsExtrapolation(8.0));
  CHECK_FALSE(ok.IsExtrapolation(3.0));
}

TEST_CASE("EvalCubic") {
  const CubicRD c6 = Published(6, kTier1080);
  CHECK(EvalCubic(c6, 0.0) == 33.335);
  CHECK(std::fabs(EvalCubic(c6, 0.429) - 40.0) < 0.01);
  CHECK(std::fabs(EvalCubic(Published(4, kTier1080), 1.950) - 40.0) < 0.01);
  CHECK_THROWS_AS(EvalCubic(c6, std::numeric_limits<double>::infinity()),
                  Error);
  CHECK_THROWS_AS(EvalCubic(c6, std::nan("")), Error);
  CHECK_THROWS_AS(EvalCubic(c6, -1.0), Error);
}

TEST_CASE("EvalDerivative matches published-row checks") {
  CHECK(std::fabs(EvalDerivative(Published(5, kTier1080), 3.423) - 0.10) <
        0.01);
  // Vertex of the derivative parabola for cluster 1, 1080p.
  const CubicRD c1 = Published(1, kTier1080);
  const double vertex = -c1.c2() / (3.0 * c1.c3());
  CHECK(vertex == doctest::Approx(4.117794486).epsilon(1e-9));
  CHECK(EvalDerivative(c1, vertex) == doctest::Approx(0.8614636591).epsilon(1e-9));
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(EvalDerivative(c1, rng.Uniform(0.0, 12.0)) >= 0.86146);
  }
  CHECK_THROWS_AS(EvalDerivative(c1, std::nan("")), Error);
}

TEST_CASE("derivative agrees with central finite differences") {
  Rng rng(99);
  for (int cluster = 1; cluster <= 6; ++cluster) {
    for (int tier = 0; tier < 4; ++tier) {
      const CubicRD model = Published(cluster, tier);
      for (int i = 0; i < 100; ++i) {
        const double r = rng.Uniform(0.2, 12.0);
        const double fd = testing::CentralDifference(model.coeffs(), r, 1e-5);
        const double d = EvalDerivative(model, r);
        CHECK(std::fabs(d - fd) <= 1e-6 * std::max(1.0, std::fabs(fd)));
      }
    }
  }
}

TEST_CASE("FitPolynomial interpolates degree+1 points exactly") {
  const Cubic truth = PublishedCubic(6, kTier1080);
  const CubicRD fit = FitPolynomial(Sample(truth, {0.5, 1.7, 3.1, 5.2}), 3);
  for (int i = 0; i < 4; ++i) {
    CHECK(fit.coeffs()[i] == doctest::Approx(truth[i]).epsilon(1e-9));
  }
  CHECK(fit.valid_range().lo == 0.5);
  CHECK(fit.valid_range().hi == 5.2);
}

TEST_CASE("FitPolynomial on collinear data zeroes the higher terms") {
  std::vector<RDPoint> pts;
  for (double r : {0.3, 1.0, 2.0, 3.5, 5.0}) pts.push_back({r, 2.0 * r + 1.0});
  const CubicRD fit = FitPolynomial(pts, 3);
  CHECK(fit.c0() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.c1() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::fabs(fit.c2()) < 1e-9);
  CHECK(std::fabs(fit.c3()) < 1e-9);
}

TEST_CASE("FitPolynomial recovers a cubic from ten grid samples") {
  for (int cluster = 1; cluster <= 6; ++cluster) {
    const Cubic truth = PublishedCubic(cluster, kTier720);
    const CubicRD fit = FitPolynomial(Sample(truth, DefaultGrid()), 3);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::fabs(fit.coeffs()[i] - truth[i]) < 1e-8);
    }
  }
}

TEST_CASE("FitPolynomial errors") {
  CHECK_THROWS_AS(FitPolynomial(Sample({1, 1, 0, 0}, {1.0, 2.0, 3.0}), 3),
                  Error);
  try {
    FitPolynomial(Sample({1, 1, 0, 0}, {1.0, 1.0, 2.0, 2.0}), 2);
    FAIL("expected degenerate input");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateInput);
  }
  CHECK_THROWS_AS(FitPolynomial(Sample({1, 1, 0, 0}, {1, 2, 3, 4}), 4), Error);
  try {
    // Distinct in double precision but numerically singular once scaled.
    FitPolynomial(Sample({1, 1, 1, 1}, {1.0, 1.0 + 1e-15, 1.0 + 2e-15,
                                        1.0 + 3e-15}),
                  3);
    FAIL("expected conditioning error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConditioning);
    CHECK(std::string(e.what()).find("condition") != std::string::npos);
  }
}

TEST_CASE("FitPolynomial properties on random data") {
  Rng rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RDPoint> pts;
    for (double r : DefaultGrid()) {
      pts.push_back({r, 30.0 + 5.0 * std::log(r) + rng.Uniform(-0.5, 0.5)});
    }
    // Constant offset moves only c0.
    const double shift = rng.Uniform(-10.0, 10.0);
    std::vector<RDPoint> shifted = pts;
    for (RDPoint& p : shifted) p.psnr += shift;
    const CubicRD a = FitPolynomial(pts, 3);
    const CubicRD b = FitPolynomial(shifted, 3);
    CHECK(b.c0() - a.c0() == doctest::Approx(shift).epsilon(1e-9));
    for (int i = 1; i < 4; ++i) {
      CHECK(std::fabs(b.coeffs()[i] - a.coeffs()[i]) < 1e-9);
    }
    // MSE is non-increasing in degree.
    double previous = std::numeric_limits<double>::infinity();
    for (int degree = 1; degree <= 3; ++degree) {
      const double mse = MeanSquaredError(FitPolynomial(pts, degree), pts);
      CHECK(mse <= previous + 1e-12);
      previous = mse;
    }
    // Refitting the model's own samples reproduces it.
    std::vector<double> grid = DefaultGrid();
    const CubicRD again = FitPolynomial(Sample(a.coeffs(), grid), 3);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::fabs(again.coeffs()[i] - a.coeffs()[i]) < 1e-8);
    }
  }
}

TEST_CASE("FitLog") {
  std::vector<RDPoint> pts;
  for (double r : {0.5, 1.0, 2.0, 4.0}) pts.push_back({r, 5.0 * std::log(2.0 * r)});
  const LogFit fit = FitLog(pts);
  CHECK(fit.a == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(fit.b == doctest::Approx(2.0).epsilon(1e-8));

  std::vector<RDPoint> flat;
  for (double r : {0.5, 1.0, 2.0, 4.0}) flat.push_back({r, 30.0});
  const LogFit flat_fit = FitLog(flat);
  CHECK(std::fabs(flat_fit.a) < 1e-9);
  for (const RDPoint& p : flat) {
    CHECK(flat_fit.Eval(p.bitrate) == doctest::Approx(30.0));
  }
  const FitReport report = CompareFits(flat);
  REQUIRE(report.Mse(FitFamily::kLogarithmic).has_value());
  CHECK(*report.Mse(FitFamily::kLogarithmic) < 1e-20);

  try {
    FitLog(std::vector<RDPoint>{{0.0, 1.0}, {1.0, 2.0}});
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDomain);
  }
}

TEST_CASE("logarithmic family fits a published cubic worse than a cubic") {
  const auto pts = Sample(PublishedCubic(5, kTier1080), DefaultGrid());
  const FitReport report = CompareFits(pts);
  CHECK(*report.Mse(FitFamily::kLogarithmic) > *report.Mse(FitFamily::kCubic));
  CHECK(report.chosen == FitFamily::kCubic);
  CHECK(*report.Mse(FitFamily::kCubic) < 1e-16);
}

TEST_CASE("CompareFits tie-break and nesting") {
  std::vector<RDPoint> line;
  for (double r : DefaultGrid()) line.push_back({r, 3.0 * r + 20.0});
  CHECK(CompareFits(line).chosen == FitFamily::kLinear);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RDPoint> pts;
    for (double r : DefaultGrid()) pts.push_back({r, rng.Uniform(20.0, 50.0)});
    const FitReport report = CompareFits(pts);
    CHECK(*report.Mse(FitFamily::kCubic) <=
          *report.Mse(FitFamily::kQuadratic) + 1e-12);
    CHECK(*report.Mse(FitFamily::kQuadratic) <=
          *report.Mse(FitFamily::kLinear) + 1e-12);
  }
  CHECK_THROWS_AS(CompareFits(std::vector<RDPoint>{{1, 1}, {2, 2}, {3, 3}}),
                  Error);
}

TEST_CASE("CompareFits reports a family that cannot be fit as absent") {
  // Non-positive bitrate is outside the log family's domain, and the
  // polynomial families reject it as well.
  std::vector<RDPoint> pts{{0.0, 20}, {1.0, 25}, {2.0, 28}, {3.0, 30}};
  const FitReport report = CompareFits(pts);
  CHECK_FALSE(report.Mse(FitFamily::kLogarithmic).has_value());
  CHECK_FALSE(report.Mse(FitFamily::kCubic).has_value());
}

}  // namespace
}  // namespace rdtrans
