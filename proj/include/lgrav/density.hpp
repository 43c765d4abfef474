#pragma once

#include <functional>
#include <memory>
#include <string>

namespace lgrav {

// Scatterer density h(y) on y < 0. Values are immutable; rescaling records the
// accumulated index n so that rescaled(n).rescaled(m) == rescaled(n*m) exactly.
class DensityProfile {
 public:
  enum class Kind { Constant, PowerLaw, Tabulated };

  struct Custom {
    std::function<double(double)> h;
    std::function<double(double)> dh;
    std::function<double(double)> witness;  // a -> delta(a) <= inf_{y<=a} h(y)
    std::string name;
  };

  static DensityProfile constant(double c);
  static DensityProfile power_law(double c, double lambda);
  static DensityProfile tabulated(Custom custom);

  double eval(double y) const;
  double derivative(double y) const;
  double operator()(double y) const { return eval(y); }
  double lower_bound(double a) const;
  DensityProfile rescaled(double n) const;

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double lambda() const { return lambda_; }
  double index() const { return index_; }
  // c * sqrt(index): the amplitude actually applied by eval.
  double amplitude() const { return c_ * mult_; }
  // Constant profiles count as power laws with lambda = 0.
  bool is_power_law() const { return kind_ != Kind::Tabulated; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::Constant;
  double c_ = 1.0;
  double lambda_ = 0.0;
  int int_lambda_ = 0;  // lambda when it is a small non-negative integer, else -1
  double index_ = 1.0;
  double mult_ = 1.0;
  std::shared_ptr<const Custom> custom_;

  double power(double x) const;
};

}  // namespace lgrav
