#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "trajsign/errors.hpp"
#include "trajsign/hmm.hpp"
#include "trajsign/rng.hpp"

using namespace trajsign;

namespace {

// Two Gaussian blobs circling opposite ways; easy to model, hard to confuse.
std::vector<Eigen::MatrixXd> toy_sequences(Rng& rng, int count, int len,
                                           double direction) {
  std::vector<Eigen::MatrixXd> out;
  for (int s = 0; s < count; ++s) {
    Eigen::MatrixXd seq(2, len);
    const double phase = rng.uniform(0.0, 0.3);
    for (int t = 0; t < len; ++t) {
      const double a =
          direction * (phase + 2.0 * M_PI * double(t) / double(len));
      seq(0, t) = std::cos(a) + 0.05 * rng.normal();
      seq(1, t) = std::sin(a) + 0.05 * rng.normal();
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace

TEST_CASE("hmm constructor validates stochastic structure") {
  const Gaussian unit(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  const Gmm emission({unit}, Eigen::VectorXd::Ones(1));

  Eigen::VectorXd pi = Eigen::VectorXd::Constant(2, 0.5);
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK_NOTHROW(Hmm(pi, a, {emission, emission}));

  Eigen::VectorXd bad_pi(2);
  bad_pi << 0.9, 0.3;
  CHECK_THROWS_AS(Hmm(bad_pi, a, {emission, emission}),
                  std::invalid_argument);

  Eigen::MatrixXd bad_a = a;
  bad_a(0, 0) = 0.7;
  CHECK_THROWS_AS(Hmm(pi, bad_a, {emission, emission}),
                  std::invalid_argument);

  CHECK_THROWS_AS(Hmm(pi, a, {emission}), DimensionMismatch);

  const Gaussian unit2(Eigen::VectorXd::Zero(2),
                       Eigen::MatrixXd::Identity(2, 2));
  const Gmm mismatched({unit2}, Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(Hmm(pi, a, {emission, mismatched}), DimensionMismatch);
}

TEST_CASE("single-state forward_log is the summed emission density") {
  Rng rng(2);
  std::vector<Gaussian> comps{Gaussian(Eigen::VectorXd::Zero(2),
                                       oracle::random_spd(rng, 2))};
  const Gmm emission(comps, Eigen::VectorXd::Ones(1));
  const Hmm model(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1),
                  {emission});
  const Eigen::MatrixXd obs = oracle::random_obs(rng, 2, 12);
  double want = 0.0;
  for (Eigen::Index t = 0; t < obs.cols(); ++t) {
    want += mixture_log_pdf(emission, obs.col(t));
  }
  CHECK(forward_log(model, obs) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("forward_log matches the path-enumeration oracle") {
  Rng rng(1234);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index q = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.below(2));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(2));
    const Eigen::Index len = 2 + static_cast<Eigen::Index>(rng.below(5));
    const Hmm model = oracle::random_hmm(rng, q, m, d);
    const Eigen::MatrixXd obs = oracle::random_obs(rng, d, len);
    const double got = forward_log(model, obs);
    const double want = oracle::enumerate_forward_log(model, obs);
    CHECK(std::abs(got - want) <= 1e-8 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("forward_log is invariant under state relabeling") {
  Rng rng(7);
  const Hmm model = oracle::random_hmm(rng, 3, 2, 2);
  const Eigen::MatrixXd obs = oracle::random_obs(rng, 2, 10);

  const std::vector<Eigen::Index> perm{2, 0, 1};
  Eigen::VectorXd pi(3);
  Eigen::MatrixXd a(3, 3);
  std::vector<Gmm> emissions;
  for (Eigen::Index i = 0; i < 3; ++i) {
    pi(i) = model.initial()(perm[static_cast<std::size_t>(i)]);
    emissions.push_back(
        model.emissions()[static_cast<std::size_t>(
            perm[static_cast<std::size_t>(i)])]);
    for (Eigen::Index j = 0; j < 3; ++j) {
      a(i, j) = model.transitions()(perm[static_cast<std::size_t>(i)],
                                    perm[static_cast<std::size_t>(j)]);
    }
  }
  const Hmm relabeled(pi, a, std::move(emissions));
  CHECK(std::abs(forward_log(model, obs) - forward_log(relabeled, obs)) <
        1e-10);
}

TEST_CASE("forward_log stays finite where unscaled recursion underflows") {
  Rng rng(3);
  const Hmm model = oracle::random_hmm(rng, 3, 1, 2);
  Eigen::MatrixXd obs = oracle::random_obs(rng, 2, 60);
  obs.array() += 30.0;  // push far into the tails
  const double ll = forward_log(model, obs);
  CHECK(std::isfinite(ll));
  CHECK(ll < -1000.0);  // genuinely extreme, would underflow unscaled
}

TEST_CASE("forward_log validates inputs") {
  Rng rng(4);
  const Hmm model = oracle::random_hmm(rng, 2, 1, 2);
  CHECK_THROWS_AS(forward_log(model, Eigen::MatrixXd(2, 0)), EmptySequence);
  CHECK_THROWS_AS(forward_log(model, Eigen::MatrixXd::Zero(3, 5)),
                  DimensionMismatch);
}

TEST_CASE("forward_backward posteriors are consistent") {
  Rng rng(11);
  const Hmm model = oracle::random_hmm(rng, 3, 2, 2);
  const Eigen::MatrixXd obs = oracle::random_obs(rng, 2, 9);
  const PosteriorStats stats = forward_backward(model, obs);

  CHECK(stats.loglik ==
        doctest::Approx(forward_log(model, obs)).epsilon(1e-12));
  REQUIRE(stats.gamma.rows() == 9);
  REQUIRE(stats.xi.size() == 8);
  for (Eigen::Index t = 0; t < 9; ++t) {
    CHECK(stats.gamma.row(t).sum() == doctest::Approx(1.0).epsilon(1e-8));
  }
  for (std::size_t t = 0; t < stats.xi.size(); ++t) {
    CHECK(stats.xi[t].sum() == doctest::Approx(1.0).epsilon(1e-8));
    // Row sums of the pair posteriors give the state posterior.
    for (Eigen::Index i = 0; i < 3; ++i) {
      CHECK(stats.xi[t].row(i).sum() ==
            doctest::Approx(stats.gamma(static_cast<Eigen::Index>(t), i))
                .epsilon(1e-8));
    }
  }
}

TEST_CASE("forward_backward gamma matches the enumeration oracle") {
  Rng rng(13);
  const Hmm model = oracle::random_hmm(rng, 2, 1, 2);
  const Eigen::MatrixXd obs = oracle::random_obs(rng, 2, 4);
  const PosteriorStats stats = forward_backward(model, obs);
  const Eigen::MatrixXd want = oracle::enumerate_gamma(model, obs);
  CHECK((stats.gamma - want).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("single-state gamma is all ones") {
  Rng rng(15);
  const Hmm model = oracle::random_hmm(rng, 1, 2, 1);
  const Eigen::MatrixXd obs = oracle::random_obs(rng, 1, 6);
  const PosteriorStats stats = forward_backward(model, obs);
  CHECK((stats.gamma.array() == 1.0).all());
}

TEST_CASE("init_model is deterministic and respects topology") {
  Rng rng(19);
  const auto sequences = toy_sequences(rng, 4, 20, 1.0);
  TrainConfig config;
  config.num_states = 5;
  config.num_mixtures = 2;
  config.seed = 77;

  const Hmm a = init_model(sequences, config);
  const Hmm b = init_model(sequences, config);
  CHECK(a.initial() == b.initial());
  CHECK(a.transitions() == b.transitions());
  CHECK((a.transitions().array() > 0.0).all());

  config.topology = Topology::kLeftRight;
  const Hmm lr = init_model(sequences, config);
  CHECK(lr.initial()(0) == 1.0);
  CHECK(lr.initial().tail(4).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      if (j == i || j == i + 1) continue;
      CHECK(lr.transitions()(i, j) == 0.0);
    }
  }
}

TEST_CASE("init_model diagonal covariances keep the pooled variances") {
  // Regression: an aliased self-assignment once zeroed the pooled covariance
  // while diagonalizing it, so every state started at the variance floor and
  // left-right training diverged immediately.
  Rng rng(29);
  const auto sequences = toy_sequences(rng, 4, 20, 1.0);
  TrainConfig config;
  config.num_states = 3;
  config.num_mixtures = 2;
  config.seed = 5;
  config.diagonal_covariance = true;
  config.topology = Topology::kLeftRight;

  const Hmm model = init_model(sequences, config);
  for (const Gmm& gmm : model.emissions()) {
    for (const Gaussian& g : gmm.components()) {
      const Eigen::MatrixXd& cov = g.covariance();
      CHECK(cov(0, 1) == 0.0);
      CHECK(cov(1, 0) == 0.0);
      CHECK(cov(0, 0) > 0.1);
      CHECK(cov(1, 1) > 0.1);
    }
  }
}

TEST_CASE("baum_welch monotone trace, convergence, determinism") {
  Rng rng(23);
  const auto sequences = toy_sequences(rng, 6, 18, 1.0);
  TrainConfig config;
  config.num_states = 3;
  config.num_mixtures = 2;
  config.max_iterations = 40;
  config.seed = 5;

  const TrainResult result = baum_welch(sequences, config);
  REQUIRE(!result.loglik_trace.empty());
  for (std::size_t i = 1; i < result.loglik_trace.size(); ++i) {
    CHECK(result.loglik_trace[i] >= result.loglik_trace[i - 1] - 1e-8);
  }

  // The returned model is the one scored by the last trace entry.
  double total = 0.0;
  for (const auto& seq : sequences) total += forward_log(result.model, seq);
  CHECK(total == doctest::Approx(result.loglik_trace.back()).epsilon(1e-9));

  const TrainResult again = baum_welch(sequences, config);
  CHECK(again.loglik_trace == result.loglik_trace);
  CHECK(again.model.initial() == result.model.initial());
  CHECK(again.model.transitions() == result.model.transitions());

  // One more iteration from the converged point moves the likelihood by
  // less than the relative tolerance.
  if (result.loglik_trace.size() < 40) {
    const double last = result.loglik_trace.back();
    const double prev = result.loglik_trace[result.loglik_trace.size() - 2];
    CHECK(std::abs(last - prev) / (std::abs(last) + 1.0) <
          config.rel_tolerance);
  }
}

TEST_CASE("baum_welch reaches the generating model's likelihood") {
  Rng rng(29);
  // Sample from a known 2-state model.
  Eigen::VectorXd pi(2);
  pi << 0.7, 0.3;
  Eigen::MatrixXd a(2, 2);
  a << 0.85, 0.15, 0.1, 0.9;
  Eigen::VectorXd m0(2), m1(2);
  m0 << -1.0, 0.0;
  m1 << 1.0, 0.5;
  const Gmm e0({Gaussian(m0, 0.09 * Eigen::MatrixXd::Identity(2, 2))},
               Eigen::VectorXd::Ones(1));
  const Gmm e1({Gaussian(m1, 0.04 * Eigen::MatrixXd::Identity(2, 2))},
               Eigen::VectorXd::Ones(1));
  const Hmm truth(pi, a, {e0, e1});

  std::vector<Eigen::MatrixXd> data;
  for (int s = 0; s < 200; ++s) {
    Eigen::MatrixXd seq(2, 30);
    int state = rng.uniform01() < pi(0) ? 0 : 1;
    for (int t = 0; t < 30; ++t) {
      if (t > 0) state = rng.uniform01() < a(state, 0) ? 0 : 1;
      const Eigen::VectorXd& mean = state == 0 ? m0 : m1;
      const double sd = state == 0 ? 0.3 : 0.2;
      seq(0, t) = mean(0) + sd * rng.normal();
      seq(1, t) = mean(1) + sd * rng.normal();
    }
    data.push_back(std::move(seq));
  }

  TrainConfig config;
  config.num_states = 2;
  config.num_mixtures = 1;
  config.seed = 31;
  const TrainResult result = baum_welch(data, config);

  double truth_ll = 0.0, trained_ll = 0.0;
  for (const auto& seq : data) {
    truth_ll += forward_log(truth, seq);
    trained_ll += forward_log(result.model, seq);
  }
  CHECK(trained_ll >= truth_ll - 1e-6);
}

TEST_CASE("baum_welch keeps the left-right pattern") {
  Rng rng(37);
  const auto sequences = toy_sequences(rng, 5, 16, 1.0);
  TrainConfig config;
  config.num_states = 4;
  config.num_mixtures = 1;
  config.topology = Topology::kLeftRight;
  config.seed = 3;
  const TrainResult result = baum_welch(sequences, config);
  const Eigen::MatrixXd& a = result.model.transitions();
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (j == i || j == i + 1) continue;
      CHECK(a(i, j) == 0.0);
    }
    CHECK(a.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(result.model.initial()(0) == 1.0);
}

TEST_CASE("baum_welch validates inputs") {
  TrainConfig config;
  CHECK_THROWS_AS(baum_welch({}, config), std::invalid_argument);

  std::vector<Eigen::MatrixXd> mixed{Eigen::MatrixXd::Zero(2, 8),
                                     Eigen::MatrixXd::Zero(3, 8)};
  CHECK_THROWS_AS(baum_welch(mixed, config), DimensionMismatch);
}

TEST_CASE("model serialization round-trips scores bit-exactly") {
  Rng rng(43);
  const auto sequences = toy_sequences(rng, 4, 14, -1.0);
  TrainConfig config;
  config.num_states = 3;
  config.num_mixtures = 2;
  config.max_iterations = 12;
  config.seed = 9;
  const TrainResult result = baum_welch(sequences, config);

  std::stringstream buf;
  save_hmm(buf, result.model);
  const Hmm loaded = load_hmm(buf);

  for (const auto& seq : sequences) {
    const double a = forward_log(result.model, seq);
    const double b = forward_log(loaded, seq);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
  }

  std::stringstream once, twice;
  save_hmm(once, result.model);
  save_hmm(twice, loaded);
  CHECK(once.str() == twice.str());

  std::stringstream junk("not a model");
  CHECK_THROWS_AS(load_hmm(junk), IoError);
}
