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

#ifndef RDTRANS_RD_MODEL_H_
#define RDTRANS_RD_MODEL_H_

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "rdtrans/polynomial.h"

namespace rdtrans {

// A closed bitrate interval in Mbps.
struct BitrateRange {
  double lo = 0.0;
  double hi = 0.0;

  bool Contains(double r) const { return r >= lo && r <= hi; }
  double width() const { return hi - lo; }
};

// One (bitrate Mbps, PSNR dB) observation.
struct RDPoint {
  double bitrate = 0.0;
  double psnr = 0.0;
};

// Q(R) = c0 + c1 R + c2 R^2 + c3 R^3, with R in Mbps and Q in dB PSNR.
// |valid_range| is the bitrate span the fit was trained on; evaluation
// outside it is allowed and reported by IsExtrapolation().
class CubicRD {
 public:
  // Throws kInput unless all coefficients are finite and
  // 0 < range.lo < range.hi.
  CubicRD(const Cubic& coeffs, BitrateRange valid_range);

  const Cubic& coeffs() const { return coeffs_; }
  double c0() const { return coeffs_[0]; }
  double c1() const { return coeffs_[1]; }
  double c2() const { return coeffs_[2]; }
  double c3() const { return coeffs_[3]; }
  BitrateRange valid_range() const { return valid_range_; }

  bool IsExtrapolation(double r) const { return !valid_range_.Contains(r); }

  friend bool operator==(const CubicRD&, const CubicRD&) = default;

 private:
  Cubic coeffs_;
  BitrateRange valid_range_;
};

// Quality at |r| Mbps. No clamping to the valid range. Throws kInput for a
// negative or non-finite bitrate.
double EvalCubic(const CubicRD& model, double r);

// dQ/dR at |r| Mbps. Same preconditions as EvalCubic.
double EvalDerivative(const CubicRD& model, double r);

// Least-squares polynomial of |degree| (1..3) through |points|, solved by
// Householder QR on a column-scaled Vandermonde matrix. Unused higher
// coefficients are zero. The valid range spans the input bitrates.
//
// Throws kDegenerateInput with fewer than degree+1 distinct bitrates, kInput
// for an unsupported degree or non-positive bitrate, and kConditioning when
// the system is numerically rank deficient.
CubicRD FitPolynomial(std::span<const RDPoint> points, int degree);

// Q = a log(b R), fit as the linear model Q = a log R + intercept with
// intercept = a log b.
struct LogFit {
  double a = 0.0;
  double b = 1.0;  // 1 when |a| is negligible
  double intercept = 0.0;

  double Eval(double r) const;
};

// Throws kDomain for any bitrate <= 0 and kDegenerateInput with fewer than
// two distinct bitrates.
LogFit FitLog(std::span<const RDPoint> points);

enum class FitFamily { kLinear, kQuadratic, kCubic, kLogarithmic };

std::string_view FitFamilyName(FitFamily family);

// Per-family mean squared error over one point set. A family that could not
// be fit is absent rather than reported as zero error.
struct FitReport {
  std::array<std::optional<double>, 4> mse;
  FitFamily chosen = FitFamily::kCubic;

  std::optional<double> Mse(FitFamily family) const {
    return mse[static_cast<int>(family)];
  }
};

// Fits every family and picks the lowest MSE. Near-ties resolve toward the
// earlier family in (linear, quadratic, cubic, logarithmic) order. Throws
// kDegenerateInput when fewer than four distinct bitrates are given.
FitReport CompareFits(std::span<const RDPoint> points);

double MeanSquaredError(const CubicRD& model, std::span<const RDPoint> points);

}  // namespace rdtrans

#endif  // RDTRANS_RD_MODEL_H_
