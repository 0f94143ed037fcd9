#include "dged/sigma.hpp"

#include <cmath>
#include <stdexcept>

namespace dged {

SigmaFunction::SigmaFunction(Family family, std::string name,
                             std::function<double(double)> value,
                             std::function<double(double)> derivative, double m_sigma)
    : family_(family),
      name_(std::move(name)),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      m_sigma_(m_sigma) {}

SigmaFunction SigmaFunction::power(double exponent) {
  if (!(exponent > 1.0)) throw std::invalid_argument("sigma power: exponent must be > 1");
  const Family family =
      exponent <= 2.0 ? Family::PowerConcaveDerivative : Family::PowerConvexDerivative;
  const double m = exponent <= 2.0 ? 2.0 : std::max(std::pow(2.0, exponent) - 2.0, exponent);
  auto value = [exponent](double x) { return std::pow(x, exponent); };
  auto derivative = [exponent](double x) { return exponent * std::pow(x, exponent - 1.0); };
  return SigmaFunction(family, "x^" + std::to_string(exponent), std::move(value),
                       std::move(derivative), m);
}

SigmaFunction SigmaFunction::custom(std::string name, std::function<double(double)> value,
                                    std::function<double(double)> derivative, double m_sigma) {
  if (!(m_sigma >= 0.0)) throw std::invalid_argument("sigma custom: m_sigma must be >= 0");
  return SigmaFunction(Family::Custom, std::move(name), std::move(value), std::move(derivative),
                       m_sigma);
}

std::vector<std::string> SigmaFunction::audit(int grid_max) const {
  std::vector<std::string> issues;
  const double at_zero = value_(0.0);
  if (at_zero != 0.0) issues.push_back("sigma(0) != 0");
  double prev = at_zero;
  double prev_ratio = 0.0;
  for (int r = 1; r <= grid_max; ++r) {
    const double cur = value_(static_cast<double>(r));
    if (!(cur >= 0.0)) issues.push_back("sigma(" + std::to_string(r) + ") < 0");
    if (r >= 2) {
      // convexity via second differences on the integer grid
      const double before = value_(static_cast<double>(r - 2));
      if (cur - 2.0 * prev + before < -1e-12 * std::max(1.0, cur))
        issues.push_back("sigma not convex near r=" + std::to_string(r));
    }
    if (family_ == Family::PowerConcaveDerivative) {
      const double ratio = cur / static_cast<double>(r);
      if (r >= 2 && ratio < prev_ratio - 1e-12 * std::max(1.0, prev_ratio))
        issues.push_back("sigma(r)/r not increasing at r=" + std::to_string(r));
      prev_ratio = ratio;
    }
    prev = cur;
  }
  return issues;
}

}  // namespace dged
