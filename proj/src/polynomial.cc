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

#include "rdtrans/polynomial.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rdtrans {

namespace {

// Pairs whose relative separation is below this are one root.
constexpr double kMergeTolerance = 1e-7;
// A complex pair with |imag| below this (relative) is a double real root.
constexpr double kNearRealTolerance = 1e-7;

struct Candidate {
  double value;
  int multiplicity;
};

double EvalDerivative(const Cubic& c, double x) {
  return c[1] + x * (2.0 * c[2] + x * 3.0 * c[3]);
}

// Newton polishing on |c|. Keeps the best iterate so a flat or diverging
// step can never make the root worse.
double Polish(const Cubic& c, double x) {
  double best = x;
  double best_abs = std::fabs(EvalPolynomial(c, x));
  for (int i = 0; i < 8 && best_abs > 0.0; ++i) {
    const double d = EvalDerivative(c, x);
    if (d == 0.0) break;
    x -= EvalPolynomial(c, x) / d;
    const double f = std::fabs(EvalPolynomial(c, x));
    if (!std::isfinite(x) || f >= best_abs) break;
    best = x;
    best_abs = f;
  }
  return best;
}

void SolveQuadratic(double a, double b, double c,
                    std::vector<Candidate>* out) {
  if (a == 0.0) {
    if (b != 0.0) out->push_back({-c / b, 1});
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  const double scale = std::max({b * b, std::fabs(4.0 * a * c), 1e-300});
  if (disc < -kNearRealTolerance * scale) return;
  if (disc <= kNearRealTolerance * scale) {
    out->push_back({-b / (2.0 * a), 2});
    return;
  }
  // Citardauq form avoids cancellation in the smaller root.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  out->push_back({q / a, 1});
  if (q != 0.0) out->push_back({c / q, 1});
}

void SolveMonicCubic(double b, double c, double d,
                     std::vector<Candidate>* out) {
  const double q = (b * b - 3.0 * c) / 9.0;
  const double r = (2.0 * b * b * b - 9.0 * b * c + 27.0 * d) / 54.0;
  const double shift = b / 3.0;
  const double q3 = q * q * q;
  if (r * r < q3) {
    const double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
    const double m = -2.0 * std::sqrt(q);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    out->push_back({m * std::cos(theta / 3.0) - shift, 1});
    out->push_back({m * std::cos((theta + kTwoPi) / 3.0) - shift, 1});
    out->push_back({m * std::cos((theta - kTwoPi) / 3.0) - shift, 1});
    return;
  }
  const double a_term =
      -std::copysign(std::cbrt(std::fabs(r) + std::sqrt(r * r - q3)), r);
  const double b_term = a_term == 0.0 ? 0.0 : q / a_term;
  out->push_back({a_term + b_term - shift, 1});
  const double re = -0.5 * (a_term + b_term) - shift;
  const double im = 0.5 * std::sqrt(3.0) * std::fabs(a_term - b_term);
  if (im <= kNearRealTolerance * std::max(1.0, std::fabs(re))) {
    out->push_back({re, 2});
  }
}

}  // namespace

double EvalPolynomial(const Cubic& c, double x) {
  return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
}

std::vector<RealRoot> SolveCubicReal(const Cubic& c) {
  std::vector<Candidate> candidates;
  if (c[3] != 0.0) {
    SolveMonicCubic(c[2] / c[3], c[1] / c[3], c[0] / c[3], &candidates);
  } else {
    SolveQuadratic(c[2], c[1], c[0], &candidates);
  }
  for (Candidate& cand : candidates) {
    if (cand.multiplicity == 1) cand.value = Polish(c, cand.value);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.value < b.value;
            });
  std::vector<RealRoot> roots;
  for (const Candidate& cand : candidates) {
    if (!roots.empty()) {
      RealRoot& last = roots.back();
      const double scale = std::max(1.0, std::fabs(cand.value));
      if (std::fabs(cand.value - last.value) <= kMergeTolerance * scale) {
        const int total = last.multiplicity + cand.multiplicity;
        last.value = (last.value * last.multiplicity +
                      cand.value * cand.multiplicity) / total;
        last.multiplicity = total;
        continue;
      }
    }
    roots.push_back({cand.value, cand.multiplicity});
  }
  return roots;
}

}  // namespace rdtrans
