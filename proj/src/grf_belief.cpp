#include "scos/grf_belief.hpp"

#include <cmath>
#include <cstring>

#include "scos/errors.hpp"

namespace scos {

double Kernel::operator()(Point a, Point b) const {
  double d2 = (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
  return sigma_f * sigma_f * std::exp(-d2 / (2.0 * length_scale * length_scale));
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, std::span<const Point> centers,
                              double jitter) {
  const auto n = static_cast<Eigen::Index>(centers.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = kernel.sigma_f * kernel.sigma_f * (1.0 + jitter);
    for (Eigen::Index j = 0; j < i; ++j) K(i, j) = K(j, i) = kernel(centers[i], centers[j]);
  }
  return K;
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const std::vector<Obstacle>& obstacles,
                              double jitter) {
  std::vector<Point> centers;
  for (const auto& ob : obstacles) centers.push_back(ob.center);
  return kernel_matrix(kernel, centers, jitter);
}

Posterior posterior(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& noise) {
  const Eigen::Index n = K.rows();
  std::vector<Eigen::Index> A;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::isfinite(noise[i])) A.push_back(i);
  Posterior out{Eigen::VectorXd::Zero(n), K};
  if (A.empty()) return out;

  const auto m = static_cast<Eigen::Index>(A.size());
  Eigen::MatrixXd S(m, m), KnA(n, m);
  Eigen::VectorXd yA(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    yA[a] = y[A[a]];
    KnA.col(a) = K.col(A[a]);
    for (Eigen::Index b = 0; b < m; ++b) S(a, b) = K(A[a], A[b]);
    S(a, a) += noise[A[a]];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kNumerical, "posterior solve failed");
  out.mean = KnA * llt.solve(yA);
  out.cov = K - KnA * llt.solve(KnA.transpose());
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

Posterior posterior_sequential(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& noise) {
  Posterior p{Eigen::VectorXd::Zero(K.rows()), K};
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    if (!std::isfinite(noise[i])) continue;
    Eigen::VectorXd k = p.cov.col(i);
    double s = k[i] + noise[i];
    if (!(s > 0)) throw Error(ErrorCode::kNumerical, "nonpositive innovation variance");
    p.mean += k * ((y[i] - p.mean[i]) / s);
    p.cov -= k * k.transpose() / s;
  }
  return p;
}

double logistic(double mu) {
  if (mu >= 0) return 1.0 / (1.0 + std::exp(-mu));
  double e = std::exp(mu);
  return e / (1.0 + e);
}

Eigen::VectorXd to_probabilities(const Eigen::VectorXd& mu) {
  return mu.unaryExpr([](double m) { return logistic(m); });
}

BeliefState::BeliefState(Eigen::MatrixXd prior, CorrelationMode mode)
    : prior_(std::make_shared<const Eigen::MatrixXd>(std::move(prior))), mode_(mode) {
  const auto n = prior_->rows();
  known_.assign(n, Knowledge::kUnknown);
  llr_sum_ = Eigen::VectorXd::Zero(n);
  noise_sum_ = Eigen::VectorXd::Zero(n);
  readings_.assign(n, 0);
  recompute();
}

std::vector<int> BeliefState::ambiguous_ids() const {
  std::vector<int> ids;
  for (int i = 0; i < size(); ++i)
    if (known_[i] == Knowledge::kUnknown) ids.push_back(i);
  return ids;
}

Eigen::VectorXd BeliefState::evidence() const {
  Eigen::VectorXd y(size());
  for (int i = 0; i < size(); ++i) {
    double pseudo = known_[i] == Knowledge::kBlocked ? kLogOddsCap
                    : known_[i] == Knowledge::kFree  ? -kLogOddsCap
                                                     : 0.0;
    if (known_[i] == Knowledge::kUnknown) {
      y[i] = readings_[i] > 0 ? llr_sum_[i] : 0.0;
    } else if (readings_[i] == 0) {
      y[i] = pseudo;
    } else {
      // Precision-weighted merge of the reading record and the pseudo-observation.
      double sr = noise_sum_[i] / (double(readings_[i]) * readings_[i]);
      double w = 1.0 / sr + 1.0 / kDisambiguationNoise;
      y[i] = (llr_sum_[i] / sr + pseudo / kDisambiguationNoise) / w;
    }
  }
  return y;
}

Eigen::VectorXd BeliefState::evidence_noise() const {
  Eigen::VectorXd s(size());
  for (int i = 0; i < size(); ++i) {
    double sr = readings_[i] > 0 ? noise_sum_[i] / (double(readings_[i]) * readings_[i]) : kInf;
    if (known_[i] == Knowledge::kUnknown) {
      s[i] = sr;
    } else {
      s[i] = std::isfinite(sr) ? 1.0 / (1.0 / sr + 1.0 / kDisambiguationNoise)
                               : kDisambiguationNoise;
    }
  }
  return s;
}

void BeliefState::observe(std::span<const Observation> observations) {
  bool changed = false;
  for (const auto& o : observations) {
    if (!std::isfinite(o.noise_variance)) continue;
    if (o.obstacle < 0 || o.obstacle >= size())
      throw Error(ErrorCode::kDomain, "observation for unknown obstacle");
    if (o.disambiguation) {
      apply_disambiguation(o.obstacle, o.llr > 0);
      continue;
    }
    llr_sum_[o.obstacle] += o.llr;
    noise_sum_[o.obstacle] += o.noise_variance;
    readings_[o.obstacle] += 1;
    changed = true;
  }
  if (changed) recompute();
}

void BeliefState::apply_disambiguation(int id, bool blocked) {
  if (id < 0 || id >= size() || known_[id] != Knowledge::kUnknown)
    throw Error(ErrorCode::kNotAmbiguous, "obstacle " + std::to_string(id) + " is not ambiguous");
  known_[id] = blocked ? Knowledge::kBlocked : Knowledge::kFree;
  recompute();
}

void BeliefState::recompute() {
  Posterior p = posterior(*prior_, evidence(), evidence_noise());
  mean_ = std::move(p.mean);
  cov_ = std::move(p.cov);
  if (mode_ == CorrelationMode::kMarginal) cov_ = Eigen::MatrixXd(cov_.diagonal().asDiagonal());

  sample_ids_ = ambiguous_ids();
  const auto m = static_cast<Eigen::Index>(sample_ids_.size());
  Eigen::MatrixXd C(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) C(a, b) = cov_(sample_ids_[a], sample_ids_[b]);
  double scale = m > 0 ? std::max(C.diagonal().maxCoeff(), 1e-300) : 1.0;
  for (double jitter : {1e-10, 1e-6}) {
    Eigen::MatrixXd Cj = C;
    Cj.diagonal().array() += jitter * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(Cj);
    if (llt.info() == Eigen::Success) {
      sample_chol_ = llt.matrixL();
      return;
    }
  }
  throw Error(ErrorCode::kNumerical, "posterior covariance is not positive definite");
}

Statuses BeliefState::sample_environment(Rng& rng, std::span<const int> forced_blocked) const {
  Statuses z(size(), 0);
  for (int i = 0; i < size(); ++i) z[i] = known_[i] == Knowledge::kBlocked ? 1 : 0;
  const auto m = static_cast<Eigen::Index>(sample_ids_.size());
  if (m > 0) {
    Eigen::VectorXd eps(m);
    for (Eigen::Index a = 0; a < m; ++a) eps[a] = standard_normal(rng);
    Eigen::VectorXd y = sample_chol_ * eps;
    for (Eigen::Index a = 0; a < m; ++a) {
      int id = sample_ids_[a];
      double rho = logistic(mean_[id] + y[a]);
      z[id] = uniform01(rng) < rho ? 1 : 0;
    }
  }
  for (int id : forced_blocked) z[id] = 1;
  return z;
}

std::vector<Label> BeliefState::labels(std::span<const int> discarded) const {
  std::vector<Label> out(size());
  for (int i = 0; i < size(); ++i) {
    switch (known_[i]) {
      case Knowledge::kBlocked: out[i] = Label::kBlocked; break;
      case Knowledge::kFree: out[i] = Label::kFree; break;
      case Knowledge::kUnknown: out[i] = Label::kAmbiguousFree; break;
    }
  }
  for (int id : discarded) out[id] = Label::kBlocked;
  return out;
}

nlohmann::json BeliefState::snapshot() const {
  nlohmann::json j;
  std::vector<int> blocked, free, unknown;
  for (int i = 0; i < size(); ++i) {
    if (known_[i] == Knowledge::kBlocked) blocked.push_back(i);
    else if (known_[i] == Knowledge::kFree) free.push_back(i);
    else unknown.push_back(i);
  }
  j["blocked"] = blocked;
  j["free"] = free;
  j["ambiguous"] = unknown;
  j["mean"] = std::vector<double>(mean_.data(), mean_.data() + mean_.size());
  Eigen::VectorXd d = cov_.diagonal();
  j["variance"] = std::vector<double>(d.data(), d.data() + d.size());
  Eigen::VectorXd rho = probabilities();
  j["probability"] = std::vector<double>(rho.data(), rho.data() + rho.size());
  return j;
}

std::uint64_t BeliefState::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const void* data, std::size_t len) {
    auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) h = (h ^ p[k]) * 0x100000001b3ULL;
  };
  mix(known_.data(), known_.size());
  mix(mean_.data(), sizeof(double) * mean_.size());
  mix(cov_.data(), sizeof(double) * cov_.size());
  return h;
}

}  // namespace scos
