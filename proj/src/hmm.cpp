#include "trajsign/hmm.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "trajsign/errors.hpp"

namespace trajsign {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void write_double(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

void expect_token(std::istream& in, const std::string& want) {
  std::string got;
  if (!(in >> got) || got != want) {
    throw IoError("model parse error: expected '" + want + "', got '" + got +
                  "'");
  }
}

double read_double(std::istream& in) {
  double v = 0.0;
  if (!(in >> v)) throw IoError("model parse error: expected a number");
  return v;
}

long read_int(std::istream& in) {
  long v = 0;
  if (!(in >> v)) throw IoError("model parse error: expected an integer");
  return v;
}

// Uniform in (0, 1): keeps -log(u) finite and strictly positive.
double uniform_open(Rng& rng) {
  return (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1.0p-53;
}

Eigen::VectorXd dirichlet_uniform(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = -std::log(uniform_open(rng));
  return v / v.sum();
}

// Per-state emission log densities and the per-component terms behind them.
struct EmissionTable {
  Eigen::MatrixXd log_b;                  // q x T
  std::vector<Eigen::MatrixXd> comp_log;  // per state: M x T of log(c N)
};

EmissionTable emission_table(const Hmm& model,
                             const Eigen::Ref<const Eigen::MatrixXd>& obs,
                             bool keep_components) {
  const Eigen::Index q = model.num_states();
  const Eigen::Index len = obs.cols();
  EmissionTable table;
  table.log_b.resize(q, len);
  if (keep_components) table.comp_log.resize(static_cast<std::size_t>(q));
  Eigen::MatrixXd comp;
  for (Eigen::Index j = 0; j < q; ++j) {
    const Gmm& gmm = model.emissions()[static_cast<std::size_t>(j)];
    comp.resize(gmm.size(), len);
    mixture_component_log_pdfs(gmm, obs, comp);
    for (Eigen::Index t = 0; t < len; ++t) {
      table.log_b(j, t) = log_sum_exp(comp.col(t));
    }
    if (keep_components) {
      table.comp_log[static_cast<std::size_t>(j)] = comp;
    }
  }
  return table;
}

// Scaled forward pass over per-timestep max-shifted emission densities.
// Fills alpha/scale/shift when requested; returns log P(obs | model).
double scaled_forward(const Hmm& model, const Eigen::MatrixXd& log_b,
                      Eigen::MatrixXd* alpha_out, Eigen::VectorXd* scale_out,
                      Eigen::MatrixXd* btil_out) {
  const Eigen::Index q = log_b.rows();
  const Eigen::Index len = log_b.cols();

  Eigen::MatrixXd btil(q, len);
  Eigen::VectorXd shift(len);
  for (Eigen::Index t = 0; t < len; ++t) {
    shift(t) = log_b.col(t).maxCoeff();
    if (!std::isfinite(shift(t))) return kNegInf;
    btil.col(t) = (log_b.col(t).array() - shift(t)).exp();
  }

  Eigen::MatrixXd alpha(q, len);
  Eigen::VectorXd scale(len);
  double loglik = 0.0;
  Eigen::VectorXd a = model.initial().cwiseProduct(btil.col(0));
  for (Eigen::Index t = 0;; ++t) {
    const double s = a.sum();
    if (!(s > 0.0)) return kNegInf;
    scale(t) = s;
    alpha.col(t) = a / s;
    loglik += std::log(s) + shift(t);
    if (t + 1 == len) break;
    a = (model.transitions().transpose() * alpha.col(t))
            .cwiseProduct(btil.col(t + 1));
  }
  if (alpha_out) *alpha_out = std::move(alpha);
  if (scale_out) *scale_out = std::move(scale);
  if (btil_out) *btil_out = std::move(btil);
  return loglik;
}

void validate_obs(const Hmm& model,
                  const Eigen::Ref<const Eigen::MatrixXd>& obs) {
  if (obs.cols() < 1) throw EmptySequence("observation sequence is empty");
  if (obs.rows() != model.dim()) {
    throw DimensionMismatch("observation dimension does not match emissions");
  }
}

Hmm init_model_impl(std::span<const Eigen::MatrixXd> samples,
                    const TrainConfig& config, Rng& rng) {
  const Eigen::Index q = config.num_states;
  const Eigen::Index m = config.num_mixtures;
  const Eigen::Index d = samples[0].rows();

  Eigen::Index total = 0;
  for (const auto& s : samples) total += s.cols();
  Eigen::MatrixXd pool(d, total);
  Eigen::Index at = 0;
  for (const auto& s : samples) {
    pool.middleCols(at, s.cols()) = s;
    at += s.cols();
  }

  Eigen::VectorXd pi(q);
  Eigen::MatrixXd trans = Eigen::MatrixXd::Zero(q, q);
  if (config.topology == Topology::kLeftRight) {
    pi.setZero();
    pi(0) = 1.0;
    for (Eigen::Index i = 0; i < q; ++i) {
      if (i + 1 < q) {
        trans(i, i) = 0.5;
        trans(i, i + 1) = 0.5;
      } else {
        trans(i, i) = 1.0;
      }
    }
  } else {
    pi = dirichlet_uniform(rng, q);
    for (Eigen::Index i = 0; i < q; ++i) {
      trans.row(i) = dirichlet_uniform(rng, q).transpose();
    }
  }

  const Eigen::VectorXd global_mean = pool.rowwise().mean();
  const Eigen::MatrixXd centered = pool.colwise() - global_mean;
  Eigen::MatrixXd global_cov =
      centered * centered.transpose() / static_cast<double>(total);
  if (config.diagonal_covariance) {
    // .eval() breaks aliasing: the diagonal is a view into global_cov.
    global_cov = global_cov.diagonal().eval().asDiagonal();
  }
  global_cov = ensure_spd(std::move(global_cov), config.variance_floor);

  // Seed each state's means from its own temporal slice of the training
  // columns: state j draws from the j-th of q equal segments of every
  // sequence. This anchors states to phases of the gesture, which random
  // column picks do not.
  std::vector<std::vector<Eigen::Index>> segment_cols(
      static_cast<std::size_t>(q));
  at = 0;
  for (const auto& s : samples) {
    const Eigen::Index len = s.cols();
    for (Eigen::Index t = 0; t < len; ++t) {
      auto j = static_cast<std::size_t>((t * q) / len);
      segment_cols[j].push_back(at + t);
    }
    at += len;
  }

  std::vector<Gmm> emissions;
  emissions.reserve(static_cast<std::size_t>(q));
  const Eigen::VectorXd uniform_w =
      Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  for (Eigen::Index j = 0; j < q; ++j) {
    const auto& segment = segment_cols[static_cast<std::size_t>(j)];
    std::vector<Gaussian> comps;
    comps.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index pick =
          segment.empty()
              ? static_cast<Eigen::Index>(
                    rng.below(static_cast<std::uint64_t>(total)))
              : segment[rng.below(segment.size())];
      comps.emplace_back(pool.col(pick), global_cov, config.variance_floor);
    }
    emissions.emplace_back(std::move(comps), uniform_w);
  }
  return Hmm(std::move(pi), std::move(trans), std::move(emissions));
}

void validate_train_inputs(std::span<const Eigen::MatrixXd> samples,
                           const TrainConfig& config) {
  if (samples.empty()) {
    throw std::invalid_argument("training needs at least one sample");
  }
  if (config.num_states < 1 || config.num_mixtures < 1) {
    throw std::invalid_argument("num_states and num_mixtures must be >= 1");
  }
  if (!(config.rel_tolerance > 0.0)) {
    throw std::invalid_argument("rel_tolerance must be positive");
  }
  const Eigen::Index d = samples[0].rows();
  for (const auto& s : samples) {
    if (s.rows() != d) {
      throw DimensionMismatch("training samples differ in dimension");
    }
    if (s.cols() < 1) throw EmptySequence("training sample has no columns");
  }
}

}  // namespace

Hmm::Hmm(Eigen::VectorXd initial, Eigen::MatrixXd transitions,
         std::vector<Gmm> emissions)
    : initial_(std::move(initial)),
      transitions_(std::move(transitions)),
      emissions_(std::move(emissions)) {
  const Eigen::Index q = initial_.size();
  if (q < 1) throw std::invalid_argument("model needs at least one state");
  if (transitions_.rows() != q || transitions_.cols() != q) {
    throw DimensionMismatch("transition matrix shape mismatch");
  }
  if (static_cast<Eigen::Index>(emissions_.size()) != q) {
    throw DimensionMismatch("one emission mixture required per state");
  }
  if ((initial_.array() < 0.0).any() || (transitions_.array() < 0.0).any()) {
    throw std::invalid_argument("probabilities must be non-negative");
  }
  if (std::abs(initial_.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("initial distribution must sum to 1");
  }
  initial_ /= initial_.sum();
  for (Eigen::Index i = 0; i < q; ++i) {
    const double row = transitions_.row(i).sum();
    if (std::abs(row - 1.0) > 1e-9) {
      throw std::invalid_argument("transition rows must sum to 1");
    }
    transitions_.row(i) /= row;
  }
  for (const Gmm& g : emissions_) {
    if (g.dim() != emissions_[0].dim()) {
      throw DimensionMismatch("emissions differ in dimension");
    }
  }
}

double forward_log(const Hmm& model,
                   const Eigen::Ref<const Eigen::MatrixXd>& obs) {
  validate_obs(model, obs);
  const EmissionTable table = emission_table(model, obs, false);
  return scaled_forward(model, table.log_b, nullptr, nullptr, nullptr);
}

PosteriorStats forward_backward(const Hmm& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& obs) {
  validate_obs(model, obs);
  const Eigen::Index q = model.num_states();
  const Eigen::Index len = obs.cols();
  const EmissionTable table = emission_table(model, obs, false);

  Eigen::MatrixXd alpha;
  Eigen::VectorXd scale;
  Eigen::MatrixXd btil;
  const double loglik =
      scaled_forward(model, table.log_b, &alpha, &scale, &btil);
  if (!std::isfinite(loglik)) {
    throw TrainingDiverged("non-finite sequence likelihood");
  }

  // Backward pass under the same per-step scale factors.
  Eigen::MatrixXd beta(q, len);
  beta.col(len - 1).setOnes();
  for (Eigen::Index t = len - 2; t >= 0; --t) {
    const Eigen::VectorXd v =
        btil.col(t + 1).cwiseProduct(beta.col(t + 1));
    beta.col(t) = (model.transitions() * v) / scale(t + 1);
  }

  PosteriorStats stats;
  stats.loglik = loglik;
  stats.gamma.resize(len, q);
  for (Eigen::Index t = 0; t < len; ++t) {
    Eigen::VectorXd g = alpha.col(t).cwiseProduct(beta.col(t));
    stats.gamma.row(t) = (g / g.sum()).transpose();
  }
  stats.xi.reserve(static_cast<std::size_t>(len > 0 ? len - 1 : 0));
  for (Eigen::Index t = 0; t + 1 < len; ++t) {
    const Eigen::VectorXd v =
        btil.col(t + 1).cwiseProduct(beta.col(t + 1));
    Eigen::MatrixXd slice =
        (alpha.col(t) * v.transpose()).cwiseProduct(model.transitions()) /
        scale(t + 1);
    slice /= slice.sum();
    stats.xi.push_back(std::move(slice));
  }
  return stats;
}

Hmm init_model(std::span<const Eigen::MatrixXd> samples,
               const TrainConfig& config) {
  validate_train_inputs(samples, config);
  Rng rng(config.seed);
  return init_model_impl(samples, config, rng);
}

TrainResult baum_welch(std::span<const Eigen::MatrixXd> samples,
                       const TrainConfig& config) {
  validate_train_inputs(samples, config);
  const Eigen::Index q = config.num_states;
  const Eigen::Index m = config.num_mixtures;
  const Eigen::Index d = samples[0].rows();

  Rng rng(config.seed);
  Hmm model = init_model_impl(samples, config, rng);

  // Observations concatenated once; emission responsibilities index into it.
  Eigen::Index total = 0;
  for (const auto& s : samples) total += s.cols();
  Eigen::MatrixXd pool(d, total);
  {
    Eigen::Index at = 0;
    for (const auto& s : samples) {
      pool.middleCols(at, s.cols()) = s;
      at += s.cols();
    }
  }

  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.max_iterations));
  double prev_ll = 0.0;

  std::vector<Eigen::MatrixXd> resp(
      static_cast<std::size_t>(q));  // per state: m x total
  for (auto& r : resp) r.resize(m, total);

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    Eigen::VectorXd pi_acc = Eigen::VectorXd::Zero(q);
    Eigen::MatrixXd a_num = Eigen::MatrixXd::Zero(q, q);
    Eigen::VectorXd a_den = Eigen::VectorXd::Zero(q);
    double total_ll = 0.0;

    Eigen::Index at = 0;
    for (const auto& obs : samples) {
      const Eigen::Index len = obs.cols();
      const EmissionTable table = emission_table(model, obs, true);

      Eigen::MatrixXd alpha;
      Eigen::VectorXd scale;
      Eigen::MatrixXd btil;
      const double ll =
          scaled_forward(model, table.log_b, &alpha, &scale, &btil);
      if (!std::isfinite(ll)) {
        throw TrainingDiverged("non-finite log-likelihood during training");
      }
      total_ll += ll;

      Eigen::MatrixXd beta(q, len);
      beta.col(len - 1).setOnes();
      for (Eigen::Index t = len - 2; t >= 0; --t) {
        const Eigen::VectorXd v =
            btil.col(t + 1).cwiseProduct(beta.col(t + 1));
        beta.col(t) = (model.transitions() * v) / scale(t + 1);
      }

      for (Eigen::Index t = 0; t < len; ++t) {
        Eigen::VectorXd g = alpha.col(t).cwiseProduct(beta.col(t));
        g /= g.sum();
        if (t == 0) pi_acc += g;
        if (t + 1 < len) a_den += g;

        // Split each state's posterior over its mixture components.
        for (Eigen::Index j = 0; j < q; ++j) {
          const Eigen::MatrixXd& comp =
              table.comp_log[static_cast<std::size_t>(j)];
          const double lse = log_sum_exp(comp.col(t));
          resp[static_cast<std::size_t>(j)].col(at + t) =
              g(j) * (comp.col(t).array() - lse).exp();
        }
      }
      for (Eigen::Index t = 0; t + 1 < len; ++t) {
        const Eigen::VectorXd v =
            btil.col(t + 1).cwiseProduct(beta.col(t + 1));
        a_num += (alpha.col(t) * v.transpose())
                     .cwiseProduct(model.transitions()) /
                 scale(t + 1);
      }
      at += len;
    }

    trace.push_back(total_ll);
    const bool converged =
        iter > 0 && std::abs(total_ll - prev_ll) / (std::abs(total_ll) + 1.0) <
                        config.rel_tolerance;
    prev_ll = total_ll;
    if (converged || iter + 1 == config.max_iterations) break;

    // M-step.
    Eigen::VectorXd pi =
        pi_acc / static_cast<double>(samples.size());
    Eigen::MatrixXd trans = model.transitions();
    for (Eigen::Index i = 0; i < q; ++i) {
      if (a_den(i) > 0.0) {
        trans.row(i) = a_num.row(i) / a_den(i);
      }
      trans.row(i) /= trans.row(i).sum();
    }
    pi /= pi.sum();

    std::vector<Gmm> emissions;
    emissions.reserve(static_cast<std::size_t>(q));
    for (Eigen::Index j = 0; j < q; ++j) {
      emissions.push_back(weighted_em_update(
          pool, resp[static_cast<std::size_t>(j)],
          model.emissions()[static_cast<std::size_t>(j)], rng,
          config.variance_floor, config.diagonal_covariance));
    }
    model = Hmm(std::move(pi), std::move(trans), std::move(emissions));
  }

  return TrainResult{std::move(model), std::move(trace)};
}

void save_hmm(std::ostream& out, const Hmm& model) {
  const Eigen::Index q = model.num_states();
  const Eigen::Index d = model.dim();
  out << "states " << q << " dims " << d << "\n";
  out << "pi\n";
  for (Eigen::Index j = 0; j < q; ++j) {
    if (j > 0) out << " ";
    write_double(out, model.initial()(j));
  }
  out << "\nA\n";
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) {
      if (j > 0) out << " ";
      write_double(out, model.transitions()(i, j));
    }
    out << "\n";
  }
  for (Eigen::Index j = 0; j < q; ++j) {
    const Gmm& gmm = model.emissions()[static_cast<std::size_t>(j)];
    out << "state " << j << " mixtures " << gmm.size() << "\n";
    out << "weights\n";
    for (Eigen::Index i = 0; i < gmm.size(); ++i) {
      if (i > 0) out << " ";
      write_double(out, gmm.weights()(i));
    }
    out << "\n";
    for (Eigen::Index i = 0; i < gmm.size(); ++i) {
      const Gaussian& g = gmm.components()[static_cast<std::size_t>(i)];
      out << "component " << i << "\nmean\n";
      for (Eigen::Index r = 0; r < d; ++r) {
        if (r > 0) out << " ";
        write_double(out, g.mean()(r));
      }
      out << "\ncov\n";
      for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
          if (c > 0) out << " ";
          write_double(out, g.covariance()(r, c));
        }
        out << "\n";
      }
    }
  }
}

Hmm load_hmm(std::istream& in) {
  expect_token(in, "states");
  const Eigen::Index q = read_int(in);
  expect_token(in, "dims");
  const Eigen::Index d = read_int(in);
  if (q < 1 || d < 1) throw IoError("model parse error: bad sizes");

  expect_token(in, "pi");
  Eigen::VectorXd pi(q);
  for (Eigen::Index j = 0; j < q; ++j) pi(j) = read_double(in);
  expect_token(in, "A");
  Eigen::MatrixXd trans(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) trans(i, j) = read_double(in);
  }

  std::vector<Gmm> emissions;
  emissions.reserve(static_cast<std::size_t>(q));
  for (Eigen::Index j = 0; j < q; ++j) {
    expect_token(in, "state");
    if (read_int(in) != j) throw IoError("model parse error: state index");
    expect_token(in, "mixtures");
    const Eigen::Index m = read_int(in);
    if (m < 1) throw IoError("model parse error: bad mixture count");
    expect_token(in, "weights");
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) w(i) = read_double(in);
    std::vector<Gaussian> comps;
    comps.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      expect_token(in, "component");
      if (read_int(in) != i) {
        throw IoError("model parse error: component index");
      }
      expect_token(in, "mean");
      Eigen::VectorXd mean(d);
      for (Eigen::Index r = 0; r < d; ++r) mean(r) = read_double(in);
      expect_token(in, "cov");
      Eigen::MatrixXd cov(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) cov(r, c) = read_double(in);
      }
      comps.emplace_back(std::move(mean), std::move(cov));
    }
    emissions.emplace_back(std::move(comps), std::move(w));
  }
  return Hmm(std::move(pi), std::move(trans), std::move(emissions));
}

}  // namespace trajsign
