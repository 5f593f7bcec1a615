#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace sburgers {

/// One-pass mean/variance (Welford), mergeable with Chan's update.
class RunningStats {
 public:
  void add(double v);
  void merge(const RunningStats& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const;
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

class ComplexStats {
 public:
  void add(std::complex<double> v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  void merge(const ComplexStats& other) {
    re_.merge(other.re_);
    im_.merge(other.im_);
  }
  std::size_t count() const { return re_.count(); }
  std::complex<double> mean() const { return {re_.mean(), im_.mean()}; }
  const RunningStats& real() const { return re_; }
  const RunningStats& imag() const { return im_; }

 private:
  RunningStats re_, im_;
};

/// Monte Carlo estimate of a complex expectation.
struct McEstimate {
  std::complex<double> mean{};
  double std_error_re = 0.0;
  double std_error_im = 0.0;
  std::size_t n = 0;
  std::size_t aborted = 0;

  bool valid() const { return aborted == 0; }
  /// Modulus of the per-component errors.
  double std_error() const;

  static McEstimate from(const ComplexStats& s, std::size_t aborted);
  static McEstimate exact(std::complex<double> value);
};

/// |a - b| <= k * (combined standard error), componentwise.
bool within_sigmas(std::complex<double> diff, double err_re, double err_im, double k);

double normal_cdf(double z);

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample test of `samples` against a continuous CDF.
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace sburgers
