#pragma once
// dense real polynomials in one variable, ascending coefficient order.
// exact derivative/antiderivative keep rate integrals closed-form.

#include <cmath>
#include <cstddef>
#include <vector>

namespace msaw {

class Poly {
public:
  Poly() = default;
  explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

  // horner evaluation
  double operator()(double u) const {
    double acc = 0.0;
    for (size_t i = c_.size(); i-- > 0;) acc = acc * u + c_[i];
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly{};
    std::vector<double> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
    return Poly(std::move(d));
  }

  // antiderivative with zero constant term
  Poly antiderivative() const {
    if (c_.empty()) return Poly{};
    std::vector<double> a(c_.size() + 1, 0.0);
    for (size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / double(k + 1);
    return Poly(std::move(a));
  }

  int degree() const { return int(c_.size()) - 1; }  // -1 for the zero polynomial
  bool is_zero() const { return c_.empty(); }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }
  double coeff(size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
  const std::vector<double>& coeffs() const { return c_; }

  Poly scaled(double a) const {
    std::vector<double> out(c_);
    for (double& x : out) x *= a;
    return Poly(std::move(out));
  }

  Poly operator+(const Poly& o) const {
    std::vector<double> out(std::max(c_.size(), o.c_.size()), 0.0);
    for (size_t k = 0; k < c_.size(); ++k) out[k] += c_[k];
    for (size_t k = 0; k < o.c_.size(); ++k) out[k] += o.c_[k];
    return Poly(std::move(out));
  }

  // sum_k |c_k| x^k, a cheap upper bound for |p| on [-x, x]
  double abs_bound(double x) const {
    double acc = 0.0;
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + std::fabs(c_[i]);
    return acc;
  }

private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }
  std::vector<double> c_;
};

}  // namespace msaw
