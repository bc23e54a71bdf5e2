#pragma once
// numeric plumbing shared by the estimators: compensated sums, moment helpers,
// leave-one-out jackknife for smooth functions of replica means, and the two
// distributional tests used by the verification battery.

#include <cstdint>
#include <functional>
#include <vector>

namespace msaw {

class KahanSum {
public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  void merge(const KahanSum& o) {
    add(o.s_);
    add(-o.c_);
  }
  double value() const { return s_ - c_; }

private:
  double s_ = 0.0, c_ = 0.0;
};

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  double se = 0.0;   // sqrt(var / n)
  int64_t n = 0;
};

MeanVar mean_var(const std::vector<double>& xs);

// rows[i] is the ingredient vector of replica i (all rows the same length m).
// f maps a length-m vector of ingredient means to the statistic. value is f at
// the full means; se is the leave-one-out jackknife standard error.
struct JackknifeResult {
  double value = 0.0;
  double se = 0.0;
  int64_t n = 0;
};

JackknifeResult jackknife(const std::vector<std::vector<double>>& rows,
                          const std::function<double(const std::vector<double>&)>& f);

// one-sample Kolmogorov-Smirnov against Exp(rate); p-value via the asymptotic
// Kolmogorov distribution of sqrt(n) D
struct KsResult {
  double d_stat = 0.0;
  double p_value = 0.0;
  int64_t n = 0;
};
KsResult ks_test_exponential(std::vector<double> samples, double rate);

// two-sample Kolmogorov-Smirnov (used to cross-validate the two jump samplers)
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

// Anderson-Darling normality check with estimated mean/variance; p-value from
// the small-sample-corrected statistic a2_star (case 3 tables)
struct AdResult {
  double a2_star = 0.0;
  double p_value = 0.0;
};
AdResult anderson_darling_normal(std::vector<double> samples);

}  // namespace msaw
