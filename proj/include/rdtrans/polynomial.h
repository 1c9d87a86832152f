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

#ifndef RDTRANS_POLYNOMIAL_H_
#define RDTRANS_POLYNOMIAL_H_

#include <array>
#include <vector>

namespace rdtrans {

// A real root of a polynomial of degree <= 3. |multiplicity| is the number
// of (numerically) coincident roots merged into this one; an even value means
// the polynomial touches zero without changing sign.
struct RealRoot {
  double value = 0.0;
  int multiplicity = 1;

  bool tangential() const { return multiplicity % 2 == 0; }
};

// Coefficients in ascending power order: p(x) = c[0] + c[1] x + c[2] x^2 +
// c[3] x^3.
using Cubic = std::array<double, 4>;

double EvalPolynomial(const Cubic& c, double x);

// All real roots of |c|, ascending, solved in closed form and polished with
// Newton's method. A zero polynomial has no roots reported; callers that
// need to distinguish it must test the coefficients themselves.
std::vector<RealRoot> SolveCubicReal(const Cubic& c);

}  // namespace rdtrans

#endif  // RDTRANS_POLYNOMIAL_H_
