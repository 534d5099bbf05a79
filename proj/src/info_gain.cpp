#include "scos/info_gain.hpp"

#include <algorithm>
#include <cmath>

#include "scos/errors.hpp"

namespace scos {

double mutual_information(const Eigen::MatrixXd& cov, double noise_variance) {
  if (cov.rows() == 0) return 0.0;
  if (!(noise_variance > 0)) throw Error(ErrorCode::kDomain, "noise variance must be > 0");
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(cov.rows(), cov.cols()) + cov / noise_variance;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kNumerical, "MI factorization failed");
  Eigen::MatrixXd L = llt.matrixL();
  return L.diagonal().array().log().sum();  // 0.5 * logdet = sum log L_ii
}

double mutual_information(const Eigen::MatrixXd& cov, std::span<const int> ids,
                          double noise_variance) {
  const auto m = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = cov(ids[a], ids[b]);
  return mutual_information(sub, noise_variance);
}

double info_bonus(double past_mi, double mi, double gamma) {
  if (mi <= 0.0 || gamma <= 0.0) return 0.0;
  return std::sqrt(gamma) * (std::sqrt(mi + past_mi) - std::sqrt(past_mi));
}

double bonus_scale(std::span<const double> values, double scale, double cap) {
  double n = 0, mean = 0, m2 = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    n += 1;
    double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  if (n < 2) return 0.0;
  double sd = std::sqrt(m2 / (n - 1));
  double g = (scale * sd) * (scale * sd);
  return std::clamp(g, 0.0, std::max(cap, 0.0));
}

}  // namespace scos
