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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "rdtrans/error.h"

namespace rdtrans {

namespace {

// Relative pivot threshold below which the scaled Vandermonde system is
// treated as rank deficient.
constexpr double kRankThreshold = 1e-12;
constexpr double kLogSlopeEpsilon = 1e-12;

void CheckBitrate(double r) {
  if (!std::isfinite(r) || r < 0.0) {
    std::ostringstream msg;
    msg << "bitrate must be finite and >= 0, got " << r;
    throw Error(ErrorKind::kInput, msg.str());
  }
}

size_t CountDistinctBitrates(std::span<const RDPoint> points) {
  std::set<double> distinct;
  for (const RDPoint& p : points) distinct.insert(p.bitrate);
  return distinct.size();
}

// Least-squares solve of design * x = rhs with column equilibration.
Eigen::VectorXd SolveLeastSquares(const Eigen::MatrixXd& design,
                                  const Eigen::VectorXd& rhs) {
  const Eigen::VectorXd norms = design.colwise().norm().transpose();
  Eigen::MatrixXd scaled = design;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    if (norms(j) > 0.0) scaled.col(j) /= norms(j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < scaled.cols()) {
    const auto diag = qr.matrixQR().diagonal().cwiseAbs();
    const double cond = diag.maxCoeff() /
                        std::max(diag.minCoeff(), 1e-300);
    std::ostringstream msg;
    msg << "least-squares system is numerically singular (rank "
        << qr.rank() << " of " << scaled.cols()
        << ", estimated condition number " << cond << ")";
    throw Error(ErrorKind::kConditioning, msg.str());
  }
  Eigen::VectorXd x = qr.solve(rhs);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (norms(j) > 0.0) x(j) /= norms(j);
  }
  return x;
}

}  // namespace

CubicRD::CubicRD(const Cubic& coeffs, BitrateRange valid_range)
    : coeffs_(coeffs), valid_range_(valid_range) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw Error(ErrorKind::kInput, "cubic coefficients must be finite");
    }
  }
  if (!(valid_range_.lo > 0.0) || !(valid_range_.lo < valid_range_.hi) ||
      !std::isfinite(valid_range_.hi)) {
    std::ostringstream msg;
    msg << "valid range must satisfy 0 < lo < hi, got [" << valid_range_.lo
        << ", " << valid_range_.hi << "]";
    throw Error(ErrorKind::kInput, msg.str());
  }
}

double EvalCubic(const CubicRD& model, double r) {
  CheckBitrate(r);
  return EvalPolynomial(model.coeffs(), r);
}

double EvalDerivative(const CubicRD& model, double r) {
  CheckBitrate(r);
  return model.c1() + r * (2.0 * model.c2() + 3.0 * model.c3() * r);
}

CubicRD FitPolynomial(std::span<const RDPoint> points, int degree) {
  if (degree < 1 || degree > 3) {
    throw Error(ErrorKind::kInput,
                "polynomial degree must be 1, 2 or 3, got " +
                    std::to_string(degree));
  }
  for (const RDPoint& p : points) {
    if (!std::isfinite(p.bitrate) || !std::isfinite(p.psnr) ||
        p.bitrate <= 0.0) {
      throw Error(ErrorKind::kInput,
                  "fit points need finite values and positive bitrates");
    }
  }
  const size_t distinct = CountDistinctBitrates(points);
  if (distinct < static_cast<size_t>(degree) + 1) {
    throw Error(ErrorKind::kDegenerateInput,
                "degree " + std::to_string(degree) + " fit needs " +
                    std::to_string(degree + 1) +
                    " distinct bitrates, got " + std::to_string(distinct));
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, degree + 1);
  Eigen::VectorXd rhs(n);
  double lo = points[0].bitrate;
  double hi = points[0].bitrate;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = points[i].bitrate;
    double power = 1.0;
    for (int j = 0; j <= degree; ++j) {
      design(i, j) = power;
      power *= r;
    }
    rhs(i) = points[i].psnr;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const Eigen::VectorXd x = SolveLeastSquares(design, rhs);
  Cubic coeffs{0.0, 0.0, 0.0, 0.0};
  for (int j = 0; j <= degree; ++j) coeffs[j] = x(j);
  return CubicRD(coeffs, {lo, hi});
}

double LogFit::Eval(double r) const { return a * std::log(r) + intercept; }

LogFit FitLog(std::span<const RDPoint> points) {
  for (const RDPoint& p : points) {
    if (!(p.bitrate > 0.0)) {
      std::ostringstream msg;
      msg << "logarithmic fit requires bitrates > 0, got " << p.bitrate;
      throw Error(ErrorKind::kDomain, msg.str());
    }
  }
  if (CountDistinctBitrates(points) < 2) {
    throw Error(ErrorKind::kDegenerateInput,
                "logarithmic fit needs at least two distinct bitrates");
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::log(points[i].bitrate);
    rhs(i) = points[i].psnr;
  }
  const Eigen::VectorXd x = SolveLeastSquares(design, rhs);
  LogFit fit;
  fit.intercept = x(0);
  fit.a = x(1);
  fit.b = std::fabs(fit.a) < kLogSlopeEpsilon ? 1.0
                                              : std::exp(fit.intercept / fit.a);
  return fit;
}

std::string_view FitFamilyName(FitFamily family) {
  switch (family) {
    case FitFamily::kLinear: return "linear";
    case FitFamily::kQuadratic: return "poly2";
    case FitFamily::kCubic: return "poly3";
    case FitFamily::kLogarithmic: return "log";
  }
  return "unknown";
}

double MeanSquaredError(const CubicRD& model,
                        std::span<const RDPoint> points) {
  if (points.empty()) return 0.0;
  double sum = 0.0;
  for (const RDPoint& p : points) {
    const double e = EvalPolynomial(model.coeffs(), p.bitrate) - p.psnr;
    sum += e * e;
  }
  return sum / static_cast<double>(points.size());
}

FitReport CompareFits(std::span<const RDPoint> points) {
  if (CountDistinctBitrates(points) < 4) {
    throw Error(ErrorKind::kDegenerateInput,
                "fit comparison needs at least four distinct bitrates");
  }
  FitReport report;
  for (int degree = 1; degree <= 3; ++degree) {
    try {
      report.mse[degree - 1] =
          MeanSquaredError(FitPolynomial(points, degree), points);
    } catch (const Error&) {
      report.mse[degree - 1] = std::nullopt;
    }
  }
  try {
    const LogFit log_fit = FitLog(points);
    double sum = 0.0;
    for (const RDPoint& p : points) {
      const double e = log_fit.Eval(p.bitrate) - p.psnr;
      sum += e * e;
    }
    report.mse[3] = sum / static_cast<double>(points.size());
  } catch (const Error&) {
    report.mse[3] = std::nullopt;
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& mse : report.mse) {
    if (mse) best = std::min(best, *mse);
  }
  // Noiseless data leaves every adequate family at round-off level MSE.
  const double tie = 1e-12 + 1e-9 * best;
  for (int i = 0; i < 4; ++i) {
    if (report.mse[i] && *report.mse[i] <= best + tie) {
      report.chosen = static_cast<FitFamily>(i);
      break;
    }
  }
  return report;
}

}  // namespace rdtrans
