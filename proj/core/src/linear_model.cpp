#include "alstop/linear_model.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <thread>

#include "alstop/rng.hpp"

namespace alstop {

namespace {

constexpr double kInactiveScore = -std::numeric_limits<double>::infinity();

struct SubproblemResult {
  std::vector<double> w;
  double bias = 0.0;
  bool degenerate = false;
};

// Dual coordinate descent for the L1-hinge SVM with linear kernel. The bias
// is a constant augmented feature, so the regularizer covers it too. All
// features are binary, hence ||x_i||^2 = nnz_i + 1.
SubproblemResult solve_hinge_svm(const std::vector<SparseDoc>& train,
                                 int vocab_size,
                                 const std::vector<signed char>& y,
                                 const TrainConfig& cfg, std::uint64_t seed,
                                 FitDiagnostics::Subproblem* diag) {
  const std::size_t n = train.size();
  SubproblemResult result;
  result.w.assign(static_cast<std::size_t>(vocab_size), 0.0);
  double bias_w = 0.0;

  std::vector<double> alpha(n, 0.0);
  std::vector<double> diag_q(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag_q[i] = static_cast<double>(train[i].features.size()) + 1.0;
  }

  const auto decision = [&](const SparseDoc& doc) {
    double v = bias_w;
    for (const int f : doc.features) v += result.w[f];
    return v;
  };
  const auto record_objectives = [&] {
    if (!diag) return;
    double norm_sq = bias_w * bias_w;
    for (const double w : result.w) norm_sq += w * w;
    double hinge = 0.0;
    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      hinge += std::max(0.0, 1.0 - y[i] * decision(train[i]));
      alpha_sum += alpha[i];
    }
    diag->primal_by_epoch.push_back(0.5 * norm_sq + cfg.c * hinge);
    diag->dual_obj_by_epoch.push_back(alpha_sum - 0.5 * norm_sq);
  };

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  double max_violation = 0.0;
  bool converged = false;
  int epochs = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    max_violation = 0.0;
    for (const std::size_t i : order) {
      const SparseDoc& doc = train[i];
      const double yi = static_cast<double>(y[i]);
      const double g = yi * decision(doc) - 1.0;

      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= cfg.c) {
        pg = std::max(g, 0.0);
      }
      max_violation = std::max(max_violation, std::fabs(pg));
      if (std::fabs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / diag_q[i], 0.0, cfg.c);
        const double delta = (alpha[i] - old) * yi;
        if (delta != 0.0) {
          for (const int f : doc.features) result.w[f] += delta;
          bias_w += delta;
        }
      }
    }
    epochs = epoch + 1;
    record_objectives();
    if (max_violation <= cfg.tol) {
      converged = true;
      break;
    }
  }

  if (diag) {
    diag->dual = alpha;
    diag->final_violation = max_violation;
    diag->epochs = epochs;
    diag->converged = converged;
  }
  result.bias = bias_w;
  return result;
}

void validate_fit_inputs(const std::vector<SparseDoc>& train, int vocab_size,
                         int num_classes, const TrainConfig& cfg) {
  if (train.empty()) throw EmptyInput("fit needs a nonempty training set");
  if (vocab_size < 1) throw InvalidParams("vocab_size must be >= 1");
  if (num_classes < 2) throw InvalidParams("num_classes must be >= 2");
  if (!(cfg.c > 0.0)) throw InvalidParams("TrainConfig.c must be > 0");
  if (!(cfg.tol > 0.0)) throw InvalidParams("TrainConfig.tol must be > 0");
  if (cfg.max_epochs < 1) throw InvalidParams("max_epochs must be >= 1");
  for (const auto& doc : train) {
    if (doc.label < 0 || doc.label >= num_classes) {
      throw InvalidParams("doc label out of range: " +
                          std::to_string(doc.label));
    }
    if (!doc.features.empty() && doc.features.back() >= vocab_size) {
      throw InvalidParams("feature index out of range in doc " +
                          std::to_string(doc.doc_id));
    }
  }
}

ModelSnapshot fit_impl(const std::vector<SparseDoc>& train, int vocab_size,
                       int num_classes, const TrainConfig& cfg,
                       FitDiagnostics* diag, int threads,
                       bool allow_degenerate) {
  validate_fit_inputs(train, vocab_size, num_classes, cfg);

  // Binary problems keep a single hyperplane whose positive side is class 1;
  // multiclass trains one-vs-rest per class.
  const int num_stored = num_classes == 2 ? 1 : num_classes;
  const auto positive_class = [num_classes](int stored_index) {
    return num_classes == 2 ? 1 : stored_index;
  };

  std::vector<long long> class_counts(num_classes, 0);
  for (const auto& doc : train) ++class_counts[doc.label];
  for (int s = 0; s < num_stored; ++s) {
    const long long pos = class_counts[positive_class(s)];
    const long long neg = static_cast<long long>(train.size()) - pos;
    if ((pos == 0 || neg == 0) && !allow_degenerate) {
      throw DegenerateClass("class " + std::to_string(positive_class(s)) +
                            " has no " + (pos == 0 ? "positive" : "negative") +
                            " examples");
    }
  }

  ModelSnapshot model;
  model.num_classes = num_classes;
  model.vocab_size = vocab_size;
  model.train_size = static_cast<int>(train.size());
  model.weights.resize(num_stored);
  model.biases.assign(num_stored, 0.0);
  model.active.assign(num_stored, 1);
  if (diag) {
    diag->subproblems.assign(num_stored, {});
  }

  const auto solve_one = [&](int s) {
    const int pos_class = positive_class(s);
    const long long pos = class_counts[pos_class];
    const long long neg = static_cast<long long>(train.size()) - pos;
    if (pos == 0 || neg == 0) {
      model.weights[s].assign(static_cast<std::size_t>(vocab_size), 0.0);
      model.biases[s] = 0.0;
      model.active[s] = 0;
      if (diag) diag->subproblems[s].skipped = true;
      return;
    }
    std::vector<signed char> y(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      y[i] = train[i].label == pos_class ? 1 : -1;
    }
    auto result = solve_hinge_svm(
        train, vocab_size, y, cfg, mix_seed(cfg.shuffle_seed, 0x5f0f + s),
        diag ? &diag->subproblems[s] : nullptr);
    model.weights[s] = std::move(result.w);
    model.biases[s] = result.bias;
  };

  const int workers = std::clamp(threads, 1, num_stored);
  if (workers <= 1) {
    for (int s = 0; s < num_stored; ++s) solve_one(s);
  } else {
    // Each subproblem seeds its own generator, so the merged result is
    // independent of scheduling.
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int s = next.fetch_add(1); s < num_stored;
             s = next.fetch_add(1)) {
          solve_one(s);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return model;
}

}  // namespace

ModelSnapshot fit(const std::vector<SparseDoc>& train, int vocab_size,
                  int num_classes, const TrainConfig& cfg,
                  FitDiagnostics* diag, int threads) {
  return fit_impl(train, vocab_size, num_classes, cfg, diag, threads, false);
}

ModelSnapshot fit_partial(const std::vector<SparseDoc>& train, int vocab_size,
                          int num_classes, const TrainConfig& cfg,
                          FitDiagnostics* diag, int threads) {
  return fit_impl(train, vocab_size, num_classes, cfg, diag, threads, true);
}

std::vector<double> decision_values(const ModelSnapshot& model,
                                    const SparseDoc& doc) {
  if (!doc.features.empty() && doc.features.back() >= model.vocab_size) {
    throw InvalidParams("doc feature index exceeds model vocabulary");
  }
  std::vector<double> values(model.num_stored());
  for (int s = 0; s < model.num_stored(); ++s) {
    if (!model.active[s]) {
      values[s] = kInactiveScore;
      continue;
    }
    double v = model.biases[s];
    const auto& w = model.weights[s];
    for (const int f : doc.features) v += w[f];
    values[s] = v;
  }
  return values;
}

int argmax_class(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("argmax over empty vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

int predict(const ModelSnapshot& model, const SparseDoc& doc) {
  const auto values = decision_values(model, doc);
  if (model.binary()) {
    return values[0] > 0.0 ? 1 : 0;
  }
  return argmax_class(values);
}

namespace {

constexpr char kModelMagic[8] = {'A', 'L', 'S', 'M', 'D', 'L', 'v', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw IoError("model file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i]))
         << (8 * i);
  }
  pos += 4;
  return v;
}

double get_f64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw IoError("model file truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i]))
            << (8 * i);
  }
  pos += 8;
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_model(const ModelSnapshot& model, const std::filesystem::path& file) {
  std::string out;
  out.append(kModelMagic, sizeof kModelMagic);
  put_u32(out, static_cast<std::uint32_t>(model.num_classes));
  put_u32(out, static_cast<std::uint32_t>(model.vocab_size));
  put_u32(out, static_cast<std::uint32_t>(model.num_stored()));
  put_u32(out, static_cast<std::uint32_t>(model.iteration));
  put_u32(out, static_cast<std::uint32_t>(model.train_size));
  for (int s = 0; s < model.num_stored(); ++s) {
    out.push_back(static_cast<char>(model.active[s]));
    put_f64(out, model.biases[s]);
    for (const double w : model.weights[s]) put_f64(out, w);
  }
  std::ofstream stream(file, std::ios::binary | std::ios::trunc);
  if (!stream) throw IoError("cannot open model file: " + file.string());
  stream.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!stream) throw IoError("write failure: " + file.string());
}

ModelSnapshot load_model(const std::filesystem::path& file) {
  std::ifstream stream(file, std::ios::binary);
  if (!stream) throw IoError("cannot open model file: " + file.string());
  std::string in((std::istreambuf_iterator<char>(stream)),
                 std::istreambuf_iterator<char>());
  if (in.size() < sizeof kModelMagic ||
      std::memcmp(in.data(), kModelMagic, sizeof kModelMagic) != 0) {
    throw IoError("not a model file: " + file.string());
  }
  std::size_t pos = sizeof kModelMagic;
  ModelSnapshot model;
  model.num_classes = static_cast<int>(get_u32(in, pos));
  model.vocab_size = static_cast<int>(get_u32(in, pos));
  const auto num_stored = get_u32(in, pos);
  model.iteration = static_cast<int>(get_u32(in, pos));
  model.train_size = static_cast<int>(get_u32(in, pos));
  model.weights.resize(num_stored);
  model.biases.resize(num_stored);
  model.active.resize(num_stored);
  for (std::uint32_t s = 0; s < num_stored; ++s) {
    if (pos >= in.size()) throw IoError("model file truncated");
    model.active[s] = static_cast<std::uint8_t>(in[pos++]);
    model.biases[s] = get_f64(in, pos);
    model.weights[s].resize(static_cast<std::size_t>(model.vocab_size));
    for (auto& w : model.weights[s]) w = get_f64(in, pos);
  }
  if (pos != in.size()) throw IoError("model file has trailing bytes");
  return model;
}

}  // namespace alstop
