#include "trajsign/gmm.hpp"

#include <cmath>
#include <stdexcept>

#include "trajsign/errors.hpp"

namespace trajsign {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kDegenerateMass = 1e-10;

}  // namespace

Eigen::MatrixXd ensure_spd(Eigen::MatrixXd cov, double variance_floor) {
  cov = ((cov + cov.transpose()) * 0.5).eval();
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        cov, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo >= variance_floor) return cov;
    const double shift = (variance_floor - lo) * (1.0 + 1e-12) +
                         variance_floor * 1e-12;
    cov.diagonal().array() += shift;
  }
  return cov;
}

Gaussian::Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                   double variance_floor)
    : mean_(std::move(mean)) {
  if (covariance.rows() != covariance.cols() ||
      covariance.rows() != mean_.size()) {
    throw DimensionMismatch("gaussian mean/covariance size mismatch");
  }
  if (mean_.size() == 0) {
    throw std::invalid_argument("gaussian dimension must be positive");
  }
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * scale) {
    throw std::invalid_argument("covariance not symmetric");
  }
  covariance_ = ensure_spd(std::move(covariance), variance_floor);

  const Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("covariance factorization failed after floor");
  }
  chol_lower_ = llt.matrixL();
  log_norm_ = -0.5 * (static_cast<double>(dim()) * kLog2Pi +
                      2.0 * chol_lower_.diagonal().array().log().sum());
}

double Gaussian::log_pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("gaussian_log_pdf dimension mismatch");
  }
  const Eigen::VectorXd y =
      chol_lower_.triangularView<Eigen::Lower>().solve(x - mean_);
  return log_norm_ - 0.5 * y.squaredNorm();
}

void Gaussian::log_pdf_cols(
    const Eigen::Ref<const Eigen::MatrixXd>& x,
    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const {
  if (x.rows() != dim()) {
    throw DimensionMismatch("gaussian_log_pdf dimension mismatch");
  }
  Eigen::MatrixXd y = x.colwise() - mean_;
  chol_lower_.triangularView<Eigen::Lower>().solveInPlace(y);
  out = (-0.5 * y.colwise().squaredNorm()).array() + log_norm_;
}

Gmm::Gmm(std::vector<Gaussian> components, Eigen::VectorXd weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) {
    throw std::invalid_argument("mixture needs at least one component");
  }
  if (weights_.size() != size()) {
    throw DimensionMismatch("mixture weight count mismatch");
  }
  for (const Gaussian& g : components_) {
    if (g.dim() != components_[0].dim()) {
      throw DimensionMismatch("mixture components differ in dimension");
    }
  }
  if ((weights_.array() < 0.0).any()) {
    throw std::invalid_argument("mixture weights must be non-negative");
  }
  const double sum = weights_.sum();
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
  weights_ /= sum;
  log_weights_ = weights_.array().log();
}

double gaussian_log_pdf(const Gaussian& g,
                        const Eigen::Ref<const Eigen::VectorXd>& x) {
  return g.log_pdf(x);
}

double mixture_log_pdf(const Gmm& gmm,
                       const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd terms(gmm.size());
  for (Eigen::Index i = 0; i < gmm.size(); ++i) {
    terms(i) = gmm.log_weights()(i) +
               gmm.components()[static_cast<std::size_t>(i)].log_pdf(x);
  }
  return log_sum_exp(terms);
}

void mixture_component_log_pdfs(const Gmm& gmm,
                                const Eigen::Ref<const Eigen::MatrixXd>& x,
                                Eigen::Ref<Eigen::MatrixXd> out) {
  for (Eigen::Index i = 0; i < gmm.size(); ++i) {
    gmm.components()[static_cast<std::size_t>(i)].log_pdf_cols(x, out.row(i));
    out.row(i).array() += gmm.log_weights()(i);
  }
}

Gmm weighted_em_update(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                       const Eigen::Ref<const Eigen::MatrixXd>& responsibilities,
                       const Gmm& prior, Rng& rng, double variance_floor,
                       bool diagonal_covariance, int* num_resets) {
  const Eigen::Index n = samples.cols();
  const Eigen::Index d = samples.rows();
  const Eigen::Index m = prior.size();
  if (d != prior.dim()) {
    throw DimensionMismatch("em update sample dimension mismatch");
  }
  if (responsibilities.rows() != m || responsibilities.cols() != n) {
    throw DimensionMismatch("em update responsibility shape mismatch");
  }
  if (n == 0) throw std::invalid_argument("em update needs samples");
  if ((responsibilities.array() < 0.0).any()) {
    throw std::invalid_argument("responsibilities must be non-negative");
  }

  // Global statistics, used when a component loses all its mass.
  Eigen::VectorXd global_mean;
  Eigen::MatrixXd global_cov;
  const auto global_stats = [&]() {
    if (global_mean.size() == 0) {
      global_mean = samples.rowwise().mean();
      const Eigen::MatrixXd centered = samples.colwise() - global_mean;
      global_cov = centered * centered.transpose() / static_cast<double>(n);
      if (diagonal_covariance) {
        // .eval() breaks aliasing: the diagonal is a view into global_cov.
        global_cov = global_cov.diagonal().eval().asDiagonal();
      }
      global_cov = ensure_spd(std::move(global_cov), variance_floor);
    }
  };

  const Eigen::VectorXd mass = responsibilities.rowwise().sum();
  const double total = mass.sum();

  std::vector<Gaussian> components;
  components.reserve(static_cast<std::size_t>(m));
  Eigen::VectorXd weights(m);
  int resets = 0;

  for (Eigen::Index i = 0; i < m; ++i) {
    if (mass(i) < kDegenerateMass) {
      global_stats();
      const Eigen::Index pick =
          static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
      components.emplace_back(samples.col(pick), global_cov, variance_floor);
      weights(i) = 1.0 / static_cast<double>(m);
      ++resets;
      continue;
    }
    const Eigen::VectorXd mu =
        samples * responsibilities.row(i).transpose() / mass(i);
    const Eigen::MatrixXd centered = samples.colwise() - mu;
    Eigen::MatrixXd cov = centered *
                          responsibilities.row(i).asDiagonal() *
                          centered.transpose() / mass(i);
    if (diagonal_covariance) cov = cov.diagonal().eval().asDiagonal();
    components.emplace_back(mu, std::move(cov), variance_floor);
    weights(i) = total > 0.0 ? mass(i) / total : 1.0 / static_cast<double>(m);
  }

  weights /= weights.sum();
  if (num_resets) *num_resets = resets;
  return Gmm(std::move(components), std::move(weights));
}

}  // namespace trajsign
