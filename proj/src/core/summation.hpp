#ifndef PANELSELECT_CORE_SUMMATION_HPP
#define PANELSELECT_CORE_SUMMATION_HPP

#include <cmath>

namespace panelselect {

// Neumaier compensated accumulator. Used everywhere a sum must be stable
// against term ordering (likelihood reductions, weighted means).
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace panelselect

#endif
