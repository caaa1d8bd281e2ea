#pragma once

#include <cmath>

#include "hkreg/errors.hpp"

namespace hkreg {

/// Scale parameter of the Huber loss. Comparison-style checks additionally
/// require sigma > max(2M, 1); that stronger gate lives with the checks.
struct HuberScale {
  double sigma;
  explicit HuberScale(double s) : sigma(s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ContractViolation("HuberScale: sigma must be positive");
  }
};

/// Quadratic inside |t| < sigma, linear with slope 2*sigma outside; the two
/// branches agree at |t| = sigma.
inline double huber_loss(HuberScale scale, double t) {
  const double s = scale.sigma;
  const double a = std::abs(t);
  return a >= s ? 2.0 * s * a - s * s : t * t;
}

/// Derivative: 2t inside, 2*sigma*sign(t) outside. Odd, bounded by 2*sigma.
inline double huber_dloss(HuberScale scale, double t) {
  const double s = scale.sigma;
  if (t >= s) return 2.0 * s;
  if (t <= -s) return -2.0 * s;
  return 2.0 * t;
}

/// Majorize-minimize weight min(1, sigma/|t|); equals dloss(t)/(2t) off zero.
inline double huber_irls_weight(HuberScale scale, double t) {
  const double a = std::abs(t);
  return a <= scale.sigma ? 1.0 : scale.sigma / a;
}

/// Generic robust-loss surface. The analysis extends to other losses with
/// the same quadratic-near-zero / linear-tail shape; only Huber ships.
class RobustLoss {
 public:
  virtual ~RobustLoss() = default;
  virtual double loss(double t) const = 0;
  virtual double dloss(double t) const = 0;
  virtual double irls_weight(double t) const = 0;
  /// Global Lipschitz constant of loss().
  virtual double lipschitz() const = 0;
};

class HuberLoss final : public RobustLoss {
 public:
  explicit HuberLoss(HuberScale scale) : scale_(scale) {}
  double loss(double t) const override { return huber_loss(scale_, t); }
  double dloss(double t) const override { return huber_dloss(scale_, t); }
  double irls_weight(double t) const override { return huber_irls_weight(scale_, t); }
  double lipschitz() const override { return 2.0 * scale_.sigma; }
  HuberScale scale() const { return scale_; }

 private:
  HuberScale scale_;
};

}  // namespace hkreg
