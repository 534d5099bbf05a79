#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace scos {

// 0.5 * logdet(I + cov / noise) over the given covariance block.
double mutual_information(const Eigen::MatrixXd& cov, double noise_variance);
// Same, restricted to the rows/columns in `ids`.
double mutual_information(const Eigen::MatrixXd& cov, std::span<const int> ids,
                          double noise_variance);

// sqrt(gamma) * (sqrt(mi + past) - sqrt(past)).
double info_bonus(double past_mi, double mi, double gamma);

// gamma = (scale * sd(values))^2 over finite values, clamped to [0, cap].
double bonus_scale(std::span<const double> values, double scale, double cap);

class InfoLedger {
 public:
  double cumulative() const { return cumulative_; }
  double bonus(double mi, double gamma) const { return info_bonus(cumulative_, mi, gamma); }
  void record(double mi) { cumulative_ += mi; }

 private:
  double cumulative_ = 0.0;
};

}  // namespace scos
