#pragma once

#include <Eigen/Dense>
#include <vector>

#include "trajsign/rng.hpp"

namespace trajsign {

inline constexpr double kVarianceFloor = 1e-6;

// Multivariate normal with a cached Cholesky factor. Construction symmetrizes
// the covariance and lifts its spectrum so every eigenvalue is at least the
// variance floor.
class Gaussian {
 public:
  Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
           double variance_floor = kVarianceFloor);

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  Eigen::Index dim() const { return mean_.size(); }

  double log_pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Batched log density of every column of x, written into out. The
  // destination may be a strided row view of a larger matrix.
  void log_pdf_cols(
      const Eigen::Ref<const Eigen::MatrixXd>& x,
      Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_lower_;
  double log_norm_ = 0.0;  // -(d log 2pi + log det) / 2
};

// Mixture of Gaussians with normalized non-negative weights.
class Gmm {
 public:
  Gmm(std::vector<Gaussian> components, Eigen::VectorXd weights);

  const std::vector<Gaussian>& components() const { return components_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& log_weights() const { return log_weights_; }
  Eigen::Index size() const {
    return static_cast<Eigen::Index>(components_.size());
  }
  Eigen::Index dim() const { return components_[0].dim(); }

 private:
  std::vector<Gaussian> components_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd log_weights_;
};

// Symmetrize, then shift the diagonal until no eigenvalue is below the floor.
Eigen::MatrixXd ensure_spd(Eigen::MatrixXd cov, double variance_floor);

template <typename Derived>
double log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf stays -inf
  return m + std::log((v.array() - m).exp().sum());
}

double gaussian_log_pdf(const Gaussian& g,
                        const Eigen::Ref<const Eigen::VectorXd>& x);

double mixture_log_pdf(const Gmm& gmm,
                       const Eigen::Ref<const Eigen::VectorXd>& x);

// Per-component log(c_i) + log N_i(x_t) for all columns of x; out is M x T.
void mixture_component_log_pdfs(const Gmm& gmm,
                                const Eigen::Ref<const Eigen::MatrixXd>& x,
                                Eigen::Ref<Eigen::MatrixXd> out);

// Weighted maximum-likelihood update. samples is d x N (columns are
// observations), responsibilities M x N with non-negative entries; rows need
// not be normalized. A component whose total responsibility falls below
// 1e-10 is reset: mean from a random sample, covariance from the global data
// covariance, weight 1/M, and all weights renormalized. num_resets, when
// given, receives the reset count.
Gmm weighted_em_update(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                       const Eigen::Ref<const Eigen::MatrixXd>& responsibilities,
                       const Gmm& prior, Rng& rng,
                       double variance_floor = kVarianceFloor,
                       bool diagonal_covariance = false,
                       int* num_resets = nullptr);

}  // namespace trajsign
