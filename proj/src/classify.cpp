#include "trajsign/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "trajsign/errors.hpp"
#include "trajsign/features.hpp"
#include "trajsign/parallel.hpp"
#include "trajsign/rng.hpp"

namespace trajsign {

namespace {

// Guards ceil() against binary round-off: 0.2 * 60 must give 12, not 13.
constexpr double kCountSlack = 1e-9;

std::map<int, std::vector<std::size_t>> group_by_class(
    std::span<const Sample> samples) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    groups[samples[i].record.sign_code].push_back(i);
  }
  return groups;
}

void finish_split(Split& split) {
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
}

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double std_of(std::span<const double> values, double mean) {
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

// Returns the bank row index of the best-scoring model; ascending order of
// entries makes "first strict maximum" the lowest-code tie-break.
std::size_t classify_index(const ModelBank& bank,
                           const Eigen::Ref<const Eigen::MatrixXd>& obs,
                           Eigen::VectorXd* logliks_out) {
  if (bank.entries.empty()) throw Error("model bank is empty");
  if (obs.rows() != bank.dim()) {
    throw DimensionMismatch("feature dimension does not match model bank");
  }
  Eigen::VectorXd ll(static_cast<Eigen::Index>(bank.entries.size()));
  std::size_t best = 0;
  for (std::size_t k = 0; k < bank.entries.size(); ++k) {
    ll(static_cast<Eigen::Index>(k)) = forward_log(bank.entries[k].model, obs);
    if (ll(static_cast<Eigen::Index>(k)) > ll(static_cast<Eigen::Index>(best))) {
      best = k;
    }
  }
  if (logliks_out) *logliks_out = std::move(ll);
  return best;
}

EvalReport report_from_predictions(const std::vector<int>& codes,
                                   std::span<const Sample> test,
                                   const std::vector<std::size_t>& true_row,
                                   const std::vector<std::size_t>& pred_row) {
  const Eigen::Index s = static_cast<Eigen::Index>(codes.size());
  EvalReport report;
  report.sign_codes = codes;
  report.confusion = Eigen::MatrixXi::Zero(s, s);
  for (std::size_t i = 0; i < test.size(); ++i) {
    report.confusion(static_cast<Eigen::Index>(true_row[i]),
                     static_cast<Eigen::Index>(pred_row[i])) += 1;
  }
  report.per_class_accuracy.resize(s);
  long correct = 0;
  for (Eigen::Index r = 0; r < s; ++r) {
    const long row_total = report.confusion.row(r).sum();
    const long row_hit = report.confusion(r, r);
    correct += row_hit;
    report.per_class_accuracy(r) =
        row_total > 0 ? 100.0 * static_cast<double>(row_hit) /
                            static_cast<double>(row_total)
                      : std::numeric_limits<double>::quiet_NaN();
  }
  report.accuracy =
      100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
  return report;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

int parse_positive_int(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size() || v < 1) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw IoError(std::string("manifest parse error: bad ") + what + " '" +
                  text + "'");
  }
}

std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

Eigen::Index ModelBank::dim() const {
  return entries.empty() ? 0 : entries.front().model.dim();
}

const Hmm* ModelBank::find(int sign_code) const {
  for (const auto& e : entries) {
    if (e.sign_code == sign_code) return &e.model;
  }
  return nullptr;
}

Split split_random(std::span<const Sample> samples, double train_fraction,
                   std::uint64_t seed) {
  if (samples.empty()) throw InsufficientSamples("no samples to split");
  auto groups = group_by_class(samples);
  Rng rng(seed);
  Split split;
  for (auto& [code, idx] : groups) {
    const auto n = idx.size();
    const double want = train_fraction * static_cast<double>(n);
    const auto take = static_cast<long>(std::ceil(want - kCountSlack));
    if (take < 1) {
      throw InsufficientSamples("sign " + std::to_string(code) +
                                ": train share is empty");
    }
    if (take >= static_cast<long>(n)) {
      throw InsufficientSamples("sign " + std::to_string(code) +
                                ": test share is empty");
    }
    rng.shuffle(idx);
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + take);
    split.test.insert(split.test.end(), idx.begin() + take, idx.end());
  }
  finish_split(split);
  return split;
}

Split split_subject_dependent(std::span<const Sample> samples, int per_subject,
                              std::uint64_t seed) {
  if (samples.empty()) throw InsufficientSamples("no samples to split");
  if (per_subject < 1) {
    throw std::invalid_argument("per_subject must be >= 1");
  }
  std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    groups[{samples[i].record.sign_code, samples[i].record.subject_id}]
        .push_back(i);
  }
  Rng rng(seed);
  Split split;
  for (auto& [key, idx] : groups) {
    if (static_cast<int>(idx.size()) < per_subject) {
      throw InsufficientSamples(
          "sign " + std::to_string(key.first) + " subject " +
          std::to_string(key.second) + ": fewer than " +
          std::to_string(per_subject) + " samples");
    }
    rng.shuffle(idx);
    split.train.insert(split.train.end(), idx.begin(),
                       idx.begin() + per_subject);
    split.test.insert(split.test.end(), idx.begin() + per_subject, idx.end());
  }
  if (split.test.empty()) {
    throw InsufficientSamples("test share is empty");
  }
  finish_split(split);
  return split;
}

Split split_subject_independent(std::span<const Sample> samples,
                                int train_subjects, std::uint64_t seed) {
  if (samples.empty()) throw InsufficientSamples("no samples to split");
  if (train_subjects < 1) {
    throw std::invalid_argument("train_subjects must be >= 1");
  }
  std::set<int> ids;
  for (const auto& s : samples) ids.insert(s.record.subject_id);
  if (static_cast<int>(ids.size()) < train_subjects + 1) {
    throw InsufficientSubjects(
        "need at least " + std::to_string(train_subjects + 1) +
        " distinct subjects, have " + std::to_string(ids.size()));
  }
  std::vector<int> subjects(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(subjects);
  const std::set<int> chosen(subjects.begin(),
                             subjects.begin() + train_subjects);
  Split split;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (chosen.count(samples[i].record.subject_id)) {
      split.train.push_back(i);
    } else {
      split.test.push_back(i);
    }
  }
  finish_split(split);
  return split;
}

std::vector<Sample> gather(std::span<const Sample> samples,
                           std::span<const std::size_t> indices) {
  std::vector<Sample> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(samples[i]);
  return out;
}

ModelBank train_bank(std::span<const Sample> train, const TrainConfig& config,
                     int threads) {
  if (train.empty()) throw InsufficientSamples("training set is empty");
  const Eigen::Index d = train.front().features.rows();
  for (const auto& s : train) {
    if (s.features.rows() != d) {
      throw DimensionMismatch("training samples differ in feature dimension");
    }
  }

  auto groups = group_by_class(train);
  std::vector<int> codes;
  std::vector<std::vector<Eigen::MatrixXd>> seqs;
  codes.reserve(groups.size());
  seqs.reserve(groups.size());
  for (const auto& [code, idx] : groups) {
    codes.push_back(code);
    std::vector<Eigen::MatrixXd> klass;
    klass.reserve(idx.size());
    for (std::size_t i : idx) klass.push_back(train[i].features);
    seqs.push_back(std::move(klass));
  }

  std::vector<std::optional<Hmm>> models(codes.size());
  parallel_for(codes.size(), threads, [&](std::size_t k) {
    TrainConfig cfg = config;
    cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(codes[k]));
    try {
      models[k] = baum_welch(seqs[k], cfg).model;
    } catch (const Error& e) {
      throw Error("sign " + std::to_string(codes[k]) + ": " + e.what());
    }
  });

  ModelBank bank;
  bank.entries.reserve(codes.size());
  for (std::size_t k = 0; k < codes.size(); ++k) {
    bank.entries.push_back(BankEntry{codes[k], std::move(*models[k])});
  }
  return bank;
}

Classification classify(const ModelBank& bank,
                        const Eigen::Ref<const Eigen::MatrixXd>& obs) {
  Classification result;
  const std::size_t best = classify_index(bank, obs, &result.logliks);
  result.sign_code = bank.entries[best].sign_code;
  return result;
}

EvalReport evaluate(const ModelBank& bank, std::span<const Sample> test,
                    int threads) {
  if (test.empty()) throw InsufficientSamples("test set is empty");
  std::vector<int> codes;
  codes.reserve(bank.entries.size());
  std::map<int, std::size_t> row_of;
  for (const auto& e : bank.entries) {
    row_of[e.sign_code] = codes.size();
    codes.push_back(e.sign_code);
  }

  std::vector<std::size_t> true_row(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto it = row_of.find(test[i].record.sign_code);
    if (it == row_of.end()) {
      throw Error("sample " + test[i].record.sample_id + ": sign " +
                  std::to_string(test[i].record.sign_code) +
                  " has no model in the bank");
    }
    true_row[i] = it->second;
  }

  std::vector<std::size_t> pred_row(test.size());
  parallel_for(test.size(), threads, [&](std::size_t i) {
    pred_row[i] = classify_index(bank, test[i].features, nullptr);
  });
  return report_from_predictions(codes, test, true_row, pred_row);
}

EvalReport baseline_1nn(std::span<const Sample> train,
                        std::span<const Sample> test) {
  if (train.empty() || test.empty()) {
    throw InsufficientSamples("baseline needs non-empty train and test sets");
  }
  const Eigen::Index rows = train.front().features.rows();
  const Eigen::Index cols = train.front().features.cols();
  for (const auto& s : train) {
    if (s.features.rows() != rows || s.features.cols() != cols) {
      throw DimensionMismatch("baseline requires uniform feature shapes");
    }
  }

  std::set<int> train_codes;
  for (const auto& s : train) train_codes.insert(s.record.sign_code);
  std::vector<int> codes(train_codes.begin(), train_codes.end());
  std::map<int, std::size_t> row_of;
  for (std::size_t k = 0; k < codes.size(); ++k) row_of[codes[k]] = k;

  std::vector<std::size_t> true_row(test.size());
  std::vector<std::size_t> pred_row(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Sample& probe = test[i];
    if (probe.features.rows() != rows || probe.features.cols() != cols) {
      throw DimensionMismatch("baseline requires uniform feature shapes");
    }
    const auto it = row_of.find(probe.record.sign_code);
    if (it == row_of.end()) {
      throw Error("sample " + probe.record.sample_id + ": sign " +
                  std::to_string(probe.record.sign_code) +
                  " absent from the training set");
    }
    true_row[i] = it->second;

    double best_d2 = std::numeric_limits<double>::infinity();
    int best_code = codes.front();
    for (const auto& cand : train) {
      const double d2 = (probe.features - cand.features).squaredNorm();
      if (d2 < best_d2 ||
          (d2 == best_d2 && cand.record.sign_code < best_code)) {
        best_d2 = d2;
        best_code = cand.record.sign_code;
      }
    }
    pred_row[i] = row_of.at(best_code);
  }
  return report_from_predictions(codes, test, true_row, pred_row);
}

std::vector<CurvePoint> learning_curve(std::span<const Sample> samples,
                                       std::span<const double> fractions,
                                       int repeats, const TrainConfig& config,
                                       int threads) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  std::vector<CurvePoint> curve;
  curve.reserve(fractions.size());
  for (double f : fractions) {
    std::vector<double> accs;
    accs.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
      const Split split = split_random(samples, f, seed);
      const std::vector<Sample> train = gather(samples, split.train);
      const std::vector<Sample> test = gather(samples, split.test);
      TrainConfig cfg = config;
      cfg.seed = seed;
      const ModelBank bank = train_bank(train, cfg, threads);
      accs.push_back(evaluate(bank, test, threads).accuracy);
    }
    const double mean = mean_of(accs);
    curve.push_back(CurvePoint{f, mean, std_of(accs, mean)});
  }
  return curve;
}

std::vector<ProtocolResult> run_protocol_suite(std::span<const Sample> samples,
                                               const ProtocolSuiteConfig& config,
                                               int threads) {
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  struct Protocol {
    const char* name;
    Split (*make)(std::span<const Sample>, const ProtocolSuiteConfig&,
                  std::uint64_t);
  };
  static const Protocol kProtocols[] = {
      {"random",
       [](std::span<const Sample> s, const ProtocolSuiteConfig& c,
          std::uint64_t seed) {
         return split_random(s, c.train_fraction, seed);
       }},
      {"subject-dependent",
       [](std::span<const Sample> s, const ProtocolSuiteConfig& c,
          std::uint64_t seed) {
         return split_subject_dependent(s, c.per_subject, seed);
       }},
      {"subject-independent",
       [](std::span<const Sample> s, const ProtocolSuiteConfig& c,
          std::uint64_t seed) {
         return split_subject_independent(s, c.train_subjects, seed);
       }},
  };

  std::vector<ProtocolResult> results;
  results.reserve(3);
  for (const Protocol& protocol : kProtocols) {
    ProtocolResult result;
    result.name = protocol.name;
    result.run_accuracies.reserve(static_cast<std::size_t>(config.runs));
    for (int r = 0; r < config.runs; ++r) {
      const std::uint64_t seed =
          config.train.seed + static_cast<std::uint64_t>(r);
      const Split split = protocol.make(samples, config, seed);
      const std::vector<Sample> train = gather(samples, split.train);
      const std::vector<Sample> test = gather(samples, split.test);
      TrainConfig cfg = config.train;
      cfg.seed = seed;
      const ModelBank bank = train_bank(train, cfg, threads);
      result.run_accuracies.push_back(evaluate(bank, test, threads).accuracy);
    }
    result.mean_accuracy = mean_of(result.run_accuracies);
    result.std_accuracy = std_of(result.run_accuracies, result.mean_accuracy);
    results.push_back(std::move(result));
  }
  return results;
}

void save_bank(std::ostream& out, const ModelBank& bank) {
  out << "trajsign-model v1\n";
  out << "classes " << bank.entries.size() << "\n";
  for (const auto& e : bank.entries) {
    out << "class " << e.sign_code << "\n";
    save_hmm(out, e.model);
  }
}

ModelBank load_bank(std::istream& in) {
  while (in >> std::ws, in.peek() == '#') {
    std::string skip;
    std::getline(in, skip);
  }
  std::string token;
  if (!(in >> token) || token != "trajsign-model") {
    throw IoError("not a model bank file");
  }
  if (!(in >> token) || token != "v1") {
    throw IoError("unsupported model bank version");
  }
  if (!(in >> token) || token != "classes") {
    throw IoError("model bank parse error: expected 'classes'");
  }
  long count = 0;
  if (!(in >> count) || count < 1) {
    throw IoError("model bank parse error: bad class count");
  }
  ModelBank bank;
  bank.entries.reserve(static_cast<std::size_t>(count));
  int prev_code = 0;
  for (long k = 0; k < count; ++k) {
    if (!(in >> token) || token != "class") {
      throw IoError("model bank parse error: expected 'class'");
    }
    int code = 0;
    if (!(in >> code) || code < 1) {
      throw IoError("model bank parse error: bad sign code");
    }
    if (k > 0 && code <= prev_code) {
      throw IoError("model bank parse error: codes must ascend");
    }
    prev_code = code;
    bank.entries.push_back(BankEntry{code, load_hmm(in)});
  }
  if (bank.entries.size() > 1) {
    const Eigen::Index d = bank.entries.front().model.dim();
    for (const auto& e : bank.entries) {
      if (e.model.dim() != d) {
        throw IoError("model bank parse error: mixed feature dimensions");
      }
    }
  }
  return bank;
}

void save_bank_file(const std::filesystem::path& path, const ModelBank& bank) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  save_bank(out, bank);
  if (!out) throw IoError("failed writing " + path.string());
}

ModelBank load_bank_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return load_bank(in);
}

void save_manifest_csv(const std::filesystem::path& path,
                       std::span<const SampleRecord> records,
                       std::span<const std::string> comments) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& line : comments) out << "# " << line << "\n";
  out << "sample_id,sign_code,subject_id,repetition,feature_path\n";
  for (const auto& r : records) {
    out << r.sample_id << "," << r.sign_code << "," << r.subject_id << ","
        << r.repetition << "," << r.feature_path << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<SampleRecord> load_manifest_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<SampleRecord> records;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != "sample_id,sign_code,subject_id,repetition,feature_path") {
        throw IoError("manifest parse error: unexpected header '" + line +
                      "'");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw IoError("manifest parse error: expected 5 fields, got " +
                    std::to_string(fields.size()));
    }
    SampleRecord r;
    r.sample_id = fields[0];
    r.sign_code = parse_positive_int(fields[1], "sign_code");
    r.subject_id = parse_positive_int(fields[2], "subject_id");
    r.repetition = parse_positive_int(fields[3], "repetition");
    r.feature_path = fields[4];
    if (r.sample_id.empty() || r.feature_path.empty()) {
      throw IoError("manifest parse error: empty field");
    }
    records.push_back(std::move(r));
  }
  if (!saw_header) throw IoError("manifest parse error: missing header");
  return records;
}

std::vector<Sample> load_samples(const std::filesystem::path& manifest_path) {
  const auto records = load_manifest_csv(manifest_path);
  const std::filesystem::path base = manifest_path.parent_path();
  std::vector<Sample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) {
    std::filesystem::path feature_path(r.feature_path);
    if (feature_path.is_relative()) feature_path = base / feature_path;
    Sample s;
    s.record = r;
    s.features = load_features_csv(feature_path);
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "# trajsign-report v1\n";
  if (!report.split_descriptor.empty()) {
    out << "# split: " << report.split_descriptor << "\n";
  }
  out << "# seed: " << report.seed << "\n";
  out << "sign_code,test_count,correct,accuracy_percent\n";
  long total = 0;
  long correct = 0;
  for (std::size_t k = 0; k < report.sign_codes.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    const long row_total = report.confusion.row(r).sum();
    const long row_hit = report.confusion(r, r);
    total += row_total;
    correct += row_hit;
    out << report.sign_codes[k] << "," << row_total << "," << row_hit << ","
        << format_percent(report.per_class_accuracy(r)) << "\n";
  }
  out << "overall," << total << "," << correct << ","
      << format_percent(report.accuracy) << "\n";
}

void write_confusion_csv(std::ostream& out, const EvalReport& report) {
  out << "# trajsign-confusion v1\n";
  out << "# rows: true sign_code; columns: predicted sign_code\n";
  out << "code";
  for (int code : report.sign_codes) out << "," << code;
  out << "\n";
  for (std::size_t k = 0; k < report.sign_codes.size(); ++k) {
    out << report.sign_codes[k];
    const auto r = static_cast<Eigen::Index>(k);
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) {
      out << "," << report.confusion(r, c);
    }
    out << "\n";
  }
}

std::string format_protocol_summary(std::span<const ProtocolResult> results) {
  std::ostringstream out;
  out << "protocol              runs  accuracy\n";
  char line[96];
  double sum = 0.0;
  for (const auto& r : results) {
    std::snprintf(line, sizeof(line), "%-21s %4zu  %6.2f +- %.2f\n",
                  r.name.c_str(), r.run_accuracies.size(), r.mean_accuracy,
                  r.std_accuracy);
    out << line;
    sum += r.mean_accuracy;
  }
  std::snprintf(line, sizeof(line), "mean of protocol accuracies: %.2f\n",
                sum / static_cast<double>(results.size()));
  out << line;
  return out.str();
}

void write_protocol_csv(std::ostream& out,
                        std::span<const ProtocolResult> results) {
  out << "# trajsign-protocols v1\n";
  out << "protocol,run,seed_offset,accuracy_percent\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.run_accuracies.size(); ++i) {
      out << r.name << "," << i << "," << i << ","
          << format_percent(r.run_accuracies[i]) << "\n";
    }
  }
  out << "protocol,mean_accuracy_percent,std_accuracy_percent\n";
  for (const auto& r : results) {
    out << r.name << "," << format_percent(r.mean_accuracy) << ","
        << format_percent(r.std_accuracy) << "\n";
  }
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "# trajsign-curve v1\n";
  out << "fraction,mean_accuracy_percent,std_accuracy_percent\n";
  for (const auto& p : curve) {
    out << format_percent(p.fraction) << "," << format_percent(p.mean_accuracy)
        << "," << format_percent(p.std_accuracy) << "\n";
  }
}

std::string format_curve(std::span<const CurvePoint> curve) {
  std::ostringstream out;
  out << "fraction  accuracy\n";
  char line[64];
  for (const auto& p : curve) {
    std::snprintf(line, sizeof(line), "%7.0f%%  %6.2f +- %.2f\n",
                  100.0 * p.fraction, p.mean_accuracy, p.std_accuracy);
    out << line;
  }
  return out.str();
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  long total = 0;
  long correct = 0;
  for (std::size_t k = 0; k < report.sign_codes.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    total += report.confusion.row(r).sum();
    correct += report.confusion(r, r);
  }
  if (!report.split_descriptor.empty()) {
    out << "split: " << report.split_descriptor << "  seed: " << report.seed
        << "\n";
  }
  char line[96];
  std::snprintf(line, sizeof(line), "overall accuracy: %.2f%% (%ld/%ld)\n",
                report.accuracy, correct, total);
  out << line;
  out << " sign  count  correct  accuracy\n";
  for (std::size_t k = 0; k < report.sign_codes.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    const long row_total = report.confusion.row(r).sum();
    std::snprintf(line, sizeof(line), "%5d  %5ld  %7d  %7.2f%%\n",
                  report.sign_codes[k], row_total, report.confusion(r, r),
                  report.per_class_accuracy(r));
    out << line;
  }
  return out.str();
}

}  // namespace trajsign
