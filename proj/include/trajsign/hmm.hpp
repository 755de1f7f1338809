#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "trajsign/gmm.hpp"

namespace trajsign {

// Continuous-emission hidden Markov chain: initial distribution, row-
// stochastic transition matrix, and one Gaussian mixture per state.
// Construction validates stochasticity and shared emission dimension.
class Hmm {
 public:
  Hmm(Eigen::VectorXd initial, Eigen::MatrixXd transitions,
      std::vector<Gmm> emissions);

  Eigen::Index num_states() const { return initial_.size(); }
  Eigen::Index dim() const { return emissions_[0].dim(); }
  const Eigen::VectorXd& initial() const { return initial_; }
  const Eigen::MatrixXd& transitions() const { return transitions_; }
  const std::vector<Gmm>& emissions() const { return emissions_; }

 private:
  Eigen::VectorXd initial_;
  Eigen::MatrixXd transitions_;
  std::vector<Gmm> emissions_;
};

enum class Topology { kErgodic, kLeftRight };

struct TrainConfig {
  int num_states = 12;
  int num_mixtures = 3;
  int max_iterations = 100;
  double rel_tolerance = 1e-6;  // on |dLL| / (|LL| + 1)
  std::uint64_t seed = 0;
  Topology topology = Topology::kErgodic;
  bool diagonal_covariance = false;
  double variance_floor = kVarianceFloor;
};

struct PosteriorStats {
  Eigen::MatrixXd gamma;            // T x q state posteriors
  std::vector<Eigen::MatrixXd> xi;  // T-1 slices of q x q pair posteriors
  double loglik = 0.0;
};

struct TrainResult {
  Hmm model;
  std::vector<double> loglik_trace;  // one entry per EM iteration
};

// log P(obs | model) by the scaled forward recursion. obs is d x T with one
// observation vector per column.
double forward_log(const Hmm& model,
                   const Eigen::Ref<const Eigen::MatrixXd>& obs);

PosteriorStats forward_backward(const Hmm& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& obs);

// Random starting point: Dirichlet pi/A rows (or the left-right pattern),
// mixture means drawn from the data, covariances from the pooled data
// covariance, uniform weights. Deterministic for a fixed config.seed.
Hmm init_model(std::span<const Eigen::MatrixXd> samples,
               const TrainConfig& config);

// Multi-sequence Baum-Welch. The returned model is the one whose total
// train log-likelihood equals the last trace entry.
TrainResult baum_welch(std::span<const Eigen::MatrixXd> samples,
                       const TrainConfig& config);

// Text serialization, 17 significant digits per value; loading a saved model
// reproduces forward_log scores bit-exactly.
void save_hmm(std::ostream& out, const Hmm& model);
Hmm load_hmm(std::istream& in);

}  // namespace trajsign
