#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dged {

// Convex superlinear weight sigma used for tail-moment control.
//
// Two built-in families of power weights sigma(x) = x^p:
//   * exponent in (1, 2]  -- sigma'(x) concave, growth constant m_sigma = 2;
//   * exponent >= 2       -- sigma'(x) convex and Delta_2.
// Custom weights supply the callable and its derivative plus an explicit
// growth constant.
//
// The growth constant m_sigma is the one appearing in
//   (j+k) * (sigma(j+k) + sigma(i-k) - sigma(j) - sigma(i))
//       <= m_sigma * (j*sigma(k) + k*sigma(j)),   1 <= k <= i.
class SigmaFunction {
 public:
  enum class Family { PowerConcaveDerivative, PowerConvexDerivative, Custom };

  // Power weight x^p, p > 1. m_sigma defaults to 2 for p <= 2 and to
  // max(2^p - 2, p) for p > 2 (tight at j == i, resp. j == 1).
  static SigmaFunction power(double exponent);

  static SigmaFunction custom(std::string name, std::function<double(double)> value,
                              std::function<double(double)> derivative, double m_sigma);

  double operator()(double x) const { return value_(x); }
  double derivative(double x) const { return derivative_(x); }
  double m_sigma() const { return m_sigma_; }
  Family family() const { return family_; }
  const std::string& name() const { return name_; }

  // Checks sigma(0) == 0, nonnegativity, convexity (second differences) and,
  // for the concave-derivative class, that sigma(r)/r is increasing, on the
  // integer grid 0..grid_max. Returns human-readable violation strings.
  std::vector<std::string> audit(int grid_max) const;

 private:
  SigmaFunction(Family family, std::string name, std::function<double(double)> value,
                std::function<double(double)> derivative, double m_sigma);

  Family family_;
  std::string name_;
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
  double m_sigma_;
};

}  // namespace dged
