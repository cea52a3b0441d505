#pragma once

namespace palign {

// Compensated (Kahan) accumulator. Pixel and edge sums are accumulated in a
// fixed order with compensation so repeated runs are bit-reproducible.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  void merge(const KahanSum& other) {
    add(other.s_);
    add(-other.c_);
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace palign
