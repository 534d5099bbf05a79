#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "scos/grid_world.hpp"
#include "scos/rng.hpp"
#include "scos/sensing.hpp"

namespace scos {

inline constexpr double kKernelJitter = 1e-8;
inline constexpr double kLogOddsCap = 10.0;
inline constexpr double kDisambiguationNoise = 1e-6;

struct Kernel {
  double sigma_f = 1.5;
  double length_scale = 7.0;
  double operator()(Point a, Point b) const;
};

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, std::span<const Point> centers,
                              double jitter = kKernelJitter);
Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const std::vector<Obstacle>& obstacles,
                              double jitter = kKernelJitter);

struct Posterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Conditioning on the observed subset A = {i : noise_i < inf}:
//   mean = K_.A (K_AA + S_A)^-1 y_A,   cov = K - K_.A (K_AA + S_A)^-1 K_A.
Posterior posterior(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& noise);
// Same result reached one observation at a time with rank-one updates.
Posterior posterior_sequential(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& noise);

double logistic(double mu);
Eigen::VectorXd to_probabilities(const Eigen::VectorXd& mu);

enum class Knowledge : std::uint8_t { kUnknown, kBlocked, kFree };

// Marginal mode drops posterior cross-covariances after every update, so the
// sampled environments and MI see independent obstacles.
enum class CorrelationMode { kFull, kMarginal };

class BeliefState {
 public:
  BeliefState() = default;
  explicit BeliefState(Eigen::MatrixXd prior, CorrelationMode mode = CorrelationMode::kFull);

  int size() const { return static_cast<int>(known_.size()); }
  CorrelationMode mode() const { return mode_; }
  Knowledge knowledge(int id) const { return known_[id]; }
  const std::vector<Knowledge>& knowledge() const { return known_; }
  bool ambiguous(int id) const { return known_[id] == Knowledge::kUnknown; }
  std::vector<int> ambiguous_ids() const;

  const Eigen::MatrixXd& prior() const { return *prior_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  double probability(int id) const { return logistic(mean_[id]); }
  Eigen::VectorXd probabilities() const { return to_probabilities(mean_); }

  // Cumulative evidence per obstacle after combining sensor readings and any
  // disambiguation pseudo-observation.
  Eigen::VectorXd evidence() const;
  Eigen::VectorXd evidence_noise() const;
  int reading_count(int id) const { return readings_[id]; }

  // Placeholders (noise = inf) are ignored; each finite reading adds its LLR to
  // the obstacle's sum and shrinks the effective noise to sigma^2 / m.
  void observe(std::span<const Observation> observations);
  void apply_disambiguation(int id, bool blocked);

  // Draw statuses for every obstacle: revealed ones keep their truth, the
  // `forced_blocked` ids are set blocked, the rest follow y ~ N(mean, cov).
  Statuses sample_environment(Rng& rng, std::span<const int> forced_blocked = {}) const;

  // Planner labels: revealed blocked -> BLOCKED, revealed free -> FREE,
  // ambiguous -> AMBIGUOUS_FREE, `discarded` -> BLOCKED.
  std::vector<Label> labels(std::span<const int> discarded = {}) const;

  nlohmann::json snapshot() const;
  std::uint64_t digest() const;

 private:
  void recompute();

  std::shared_ptr<const Eigen::MatrixXd> prior_;
  CorrelationMode mode_ = CorrelationMode::kFull;
  std::vector<Knowledge> known_;
  Eigen::VectorXd llr_sum_;
  Eigen::VectorXd noise_sum_;  // sum of per-reading noise, to form sigma^2/m
  std::vector<int> readings_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  std::vector<int> sample_ids_;
  Eigen::MatrixXd sample_chol_;
};

}  // namespace scos
