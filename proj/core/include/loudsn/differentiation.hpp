#pragma once

#include <functional>

namespace loudsn {

// Central differences at steps h and h/2 combined by one Richardson step.
// `consistent` is false when the two raw estimates differ by more than
// `consistency_rel` relative to the extrapolated value.
struct DerivativeEstimate {
  double value = 0.0;
  double coarse = 0.0;  // step h
  double fine = 0.0;    // step h/2
  bool consistent = false;

  // Sign is certified when the estimate is consistent and all three values agree in sign.
  int certified_sign() const;
};

DerivativeEstimate richardson_central(const std::function<double(double)>& f, double x, double h,
                                      double consistency_rel = 0.01);

}  // namespace loudsn
