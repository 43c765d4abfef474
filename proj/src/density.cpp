#include "lgrav/density.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lgrav {

DensityProfile DensityProfile::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("density: c must be > 0");
  DensityProfile p;
  p.kind_ = Kind::Constant;
  p.c_ = c;
  return p;
}

DensityProfile DensityProfile::power_law(double c, double lambda) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("density: c must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("density: lambda must be >= 0");
  DensityProfile p;
  p.kind_ = Kind::PowerLaw;
  p.c_ = c;
  p.lambda_ = lambda;
  p.int_lambda_ = (lambda == std::floor(lambda) && lambda <= 8.0) ? static_cast<int>(lambda) : -1;
  return p;
}

DensityProfile DensityProfile::tabulated(Custom custom) {
  if (!custom.h || !custom.dh || !custom.witness) {
    throw std::invalid_argument("density: tabulated profile needs h, h' and a lower-bound witness");
  }
  DensityProfile p;
  p.kind_ = Kind::Tabulated;
  p.custom_ = std::make_shared<const Custom>(std::move(custom));
  return p;
}

double DensityProfile::power(double x) const {
  if (int_lambda_ >= 0) {
    double r = 1.0;
    for (int i = 0; i < int_lambda_; ++i) r *= x;
    return r;
  }
  return std::pow(x, lambda_);
}

double DensityProfile::eval(double y) const {
  if (y > 0.0) throw std::domain_error("density: eval requires y <= 0");
  switch (kind_) {
    case Kind::Constant:
      return c_ * mult_;
    case Kind::PowerLaw:
      return c_ * mult_ * power(-y);
    case Kind::Tabulated:
      if (y == 0.0) throw std::domain_error("density: tabulated profile undefined at y = 0");
      return mult_ * custom_->h(y);
  }
  return 0.0;
}

double DensityProfile::derivative(double y) const {
  if (!(y < 0.0)) throw std::domain_error("density: derivative requires y < 0");
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::PowerLaw:
      if (lambda_ == 0.0) return 0.0;
      return -lambda_ * c_ * mult_ * std::pow(-y, lambda_ - 1.0);
    case Kind::Tabulated:
      return mult_ * custom_->dh(y);
  }
  return 0.0;
}

double DensityProfile::lower_bound(double a) const {
  if (!(a < 0.0)) throw std::domain_error("density: lower bound requires a < 0");
  switch (kind_) {
    case Kind::Constant:
      return c_ * mult_;
    case Kind::PowerLaw:
      return c_ * mult_ * power(-a);
    case Kind::Tabulated:
      return mult_ * custom_->witness(a);
  }
  return 0.0;
}

DensityProfile DensityProfile::rescaled(double n) const {
  if (!(n >= 1.0) || !std::isfinite(n)) throw std::invalid_argument("density: rescale index must be >= 1");
  DensityProfile p = *this;
  p.index_ = index_ * n;
  p.mult_ = std::sqrt(p.index_);
  return p;
}

std::string DensityProfile::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant: os << "constant(c=" << c_; break;
    case Kind::PowerLaw: os << "power-law(c=" << c_ << ",lambda=" << lambda_; break;
    case Kind::Tabulated: os << "tabulated(" << custom_->name; break;
  }
  if (index_ != 1.0) os << ",n=" << index_;
  os << ")";
  return os.str();
}

}  // namespace lgrav
