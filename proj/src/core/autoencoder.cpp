#include "autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csv.hpp"
#include "numfmt.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace zeroday {

namespace {

constexpr std::size_t kRowBlock = 256;  // fixed reduction granularity

double activate(Activation a, double z) {
  switch (a) {
    case Activation::tanh:
      return std::tanh(z);
    case Activation::relu:
      return z > 0.0 ? z : 0.0;
    case Activation::linear:
      return z;
  }
  return z;
}

// derivative expressed through the activation value
double activate_grad(Activation a, double value) {
  switch (a) {
    case Activation::tanh:
      return 1.0 - value * value;
    case Activation::relu:
      return value > 0.0 ? 1.0 : 0.0;
    case Activation::linear:
      return 1.0;
  }
  return 1.0;
}

// per-layer activations for one row; acts[0] is the input itself
struct Workspace {
  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> delta;

  explicit Workspace(const Architecture& arch) {
    for (std::size_t w : arch.layer_widths) {
      acts.emplace_back(w, 0.0);
      delta.emplace_back(w, 0.0);
    }
  }
};

void forward_row(const AutoencoderModel& m, std::span<const double> x,
                 Workspace& ws) {
  std::copy(x.begin(), x.end(), ws.acts[0].begin());
  const std::size_t last = m.n_layers() - 1;
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    const Matrix& w = m.weights[l];
    const auto& in = ws.acts[l];
    auto& out = ws.acts[l + 1];
    for (std::size_t j = 0; j < w.cols(); ++j) out[j] = m.biases[l][j];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double a = in[i];
      if (a == 0.0) continue;
      const double* wrow = w.row(i).data();
      for (std::size_t j = 0; j < w.cols(); ++j) out[j] += a * wrow[j];
    }
    if (l != last) {
      for (auto& v : out) v = activate(m.architecture.hidden_activation, v);
    }
  }
}

GradientSet zero_gradients(const AutoencoderModel& m) {
  GradientSet g;
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    g.weight_grads.emplace_back(m.weights[l].rows(), m.weights[l].cols());
    g.bias_grads.emplace_back(m.biases[l].size(), 0.0);
  }
  return g;
}

// accumulates one row's gradient; returns the row's reconstruction loss
double backward_row(const AutoencoderModel& m, std::span<const double> x,
                    Workspace& ws, GradientSet& g) {
  forward_row(m, x, ws);
  const std::size_t last = m.n_layers();
  const auto& out = ws.acts[last];
  const double inv_d = 1.0 / static_cast<double>(out.size());

  double loss = 0.0;
  auto& out_delta = ws.delta[last];
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double resid = out[j] - x[j];
    if (m.loss_kind == LossKind::mse) {
      loss += resid * resid;
      out_delta[j] = 2.0 * resid * inv_d;
    } else {
      loss += std::fabs(resid);
      out_delta[j] = (resid > 0.0 ? 1.0 : (resid < 0.0 ? -1.0 : 0.0)) * inv_d;
    }
  }
  loss *= inv_d;

  for (std::size_t l = last; l-- > 0;) {
    const Matrix& w = m.weights[l];
    const auto& in = ws.acts[l];
    const auto& dout = ws.delta[l + 1];
    Matrix& gw = g.weight_grads[l];
    auto& gb = g.bias_grads[l];
    for (std::size_t j = 0; j < w.cols(); ++j) gb[j] += dout[j];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double a = in[i];
      double* grow = gw.row(i).data();
      const double* wrow = w.row(i).data();
      double back = 0.0;
      for (std::size_t j = 0; j < w.cols(); ++j) {
        grow[j] += a * dout[j];
        back += wrow[j] * dout[j];
      }
      if (l > 0) {
        ws.delta[l][i] =
            back * activate_grad(m.architecture.hidden_activation, in[i]);
      }
    }
  }
  return loss;
}

void add_into(GradientSet& acc, const GradientSet& part) {
  for (std::size_t l = 0; l < acc.weight_grads.size(); ++l) {
    double* a = acc.weight_grads[l].data();
    const double* p = part.weight_grads[l].data();
    const std::size_t n =
        acc.weight_grads[l].rows() * acc.weight_grads[l].cols();
    for (std::size_t i = 0; i < n; ++i) a[i] += p[i];
    for (std::size_t i = 0; i < acc.bias_grads[l].size(); ++i) {
      acc.bias_grads[l][i] += part.bias_grads[l][i];
    }
  }
  acc.data_loss += part.data_loss;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::tanh:
      return "tanh";
    case Activation::relu:
      return "relu";
    case Activation::linear:
      return "linear";
  }
  return "tanh";
}

std::string to_string(LossKind k) {
  return k == LossKind::mse ? "mse" : "mae";
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  if (s == "linear") return Activation::linear;
  throw Error(ErrorCode::argument, "unknown activation: " + s);
}

LossKind loss_from_string(const std::string& s) {
  if (s == "mse") return LossKind::mse;
  if (s == "mae") return LossKind::mae;
  throw Error(ErrorCode::argument, "unknown loss: " + s);
}

void validate(const Architecture& arch) {
  const auto& w = arch.layer_widths;
  if (w.size() < 3) {
    throw Error(ErrorCode::argument, "need at least one hidden layer");
  }
  for (std::size_t width : w) {
    if (width == 0) {
      throw Error(ErrorCode::argument, "layer widths must be positive");
    }
  }
  if (w.front() != w.back()) {
    throw Error(ErrorCode::argument, "input and output widths must match");
  }
  if (w[w.size() / 2] >= w.front()) {
    throw Error(ErrorCode::argument, "bottleneck must be narrower than the input");
  }
}

std::string AutoencoderModel::fingerprint() const {
  Fingerprinter fp;
  fp.add(autoencoder_to_text(*this));
  return fp.hex();
}

AutoencoderModel build_autoencoder(const Architecture& arch, LossKind loss,
                                   double l2_lambda, std::uint64_t seed) {
  validate(arch);
  if (l2_lambda < 0.0) {
    throw Error(ErrorCode::argument, "l2_lambda must be >= 0");
  }
  AutoencoderModel m;
  m.architecture = arch;
  m.loss_kind = loss;
  m.l2_lambda = l2_lambda;
  m.init_seed = seed;
  Rng rng(derive_seed(seed, "init"));
  for (std::size_t l = 0; l + 1 < arch.layer_widths.size(); ++l) {
    const std::size_t fan_in = arch.layer_widths[l];
    const std::size_t fan_out = arch.layer_widths[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (std::size_t i = 0; i < fan_in; ++i) {
      for (std::size_t j = 0; j < fan_out; ++j) {
        w(i, j) = rng.uniform(-bound, bound);
      }
    }
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(fan_out, 0.0);
  }
  return m;
}

std::vector<double> forward(const AutoencoderModel& model,
                            std::span<const double> x) {
  if (x.size() != model.input_width()) {
    throw Error(ErrorCode::argument, "input width mismatch");
  }
  Workspace ws(model.architecture);
  forward_row(model, x, ws);
  return ws.acts.back();
}

double reconstruction_error(std::span<const double> x,
                            std::span<const double> reconstruction,
                            LossKind kind) {
  if (x.size() != reconstruction.size()) {
    throw Error(ErrorCode::argument, "length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = reconstruction[i] - x[i];
    acc += kind == LossKind::mse ? r * r : std::fabs(r);
  }
  return acc / static_cast<double>(x.size());
}

GradientSet gradients(const AutoencoderModel& model, const Matrix& batch,
                      std::size_t threads) {
  if (batch.rows() == 0) {
    throw Error(ErrorCode::argument, "empty batch");
  }
  if (batch.cols() != model.input_width()) {
    throw Error(ErrorCode::argument, "batch width mismatch");
  }
  const std::size_t n_blocks = block_count(batch.rows(), kRowBlock);
  std::vector<GradientSet> partials;
  partials.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) partials.push_back(zero_gradients(model));

  parallel_blocks(batch.rows(), kRowBlock, threads,
                  [&](std::size_t b, std::size_t lo, std::size_t hi) {
                    Workspace ws(model.architecture);
                    for (std::size_t r = lo; r < hi; ++r) {
                      partials[b].data_loss +=
                          backward_row(model, batch.row(r), ws, partials[b]);
                    }
                  });

  GradientSet total = zero_gradients(model);
  for (const auto& part : partials) add_into(total, part);

  const double inv_b = 1.0 / static_cast<double>(batch.rows());
  for (std::size_t l = 0; l < total.weight_grads.size(); ++l) {
    double* gw = total.weight_grads[l].data();
    const double* w = model.weights[l].data();
    const std::size_t n =
        total.weight_grads[l].rows() * total.weight_grads[l].cols();
    for (std::size_t i = 0; i < n; ++i) {
      gw[i] = gw[i] * inv_b + 2.0 * model.l2_lambda * w[i];
    }
    for (auto& gb : total.bias_grads[l]) gb *= inv_b;
  }
  total.data_loss *= inv_b;
  return total;
}

double dataset_loss(const AutoencoderModel& model, const Matrix& x,
                    std::size_t threads) {
  if (x.rows() == 0) {
    throw Error(ErrorCode::argument, "empty matrix");
  }
  if (x.cols() != model.input_width()) {
    throw Error(ErrorCode::argument, "width mismatch");
  }
  const std::size_t n_blocks = block_count(x.rows(), kRowBlock);
  std::vector<double> partial(n_blocks, 0.0);
  parallel_blocks(x.rows(), kRowBlock, threads,
                  [&](std::size_t b, std::size_t lo, std::size_t hi) {
                    Workspace ws(model.architecture);
                    for (std::size_t r = lo; r < hi; ++r) {
                      forward_row(model, x.row(r), ws);
                      partial[b] += reconstruction_error(
                          x.row(r), ws.acts.back(), model.loss_kind);
                    }
                  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(x.rows());
}

namespace {

struct AdamState {
  std::vector<Matrix> mw, vw;
  std::vector<std::vector<double>> mb, vb;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t step = 0;

  explicit AdamState(const AutoencoderModel& m) {
    for (std::size_t l = 0; l < m.n_layers(); ++l) {
      mw.emplace_back(m.weights[l].rows(), m.weights[l].cols());
      vw.emplace_back(m.weights[l].rows(), m.weights[l].cols());
      mb.emplace_back(m.biases[l].size(), 0.0);
      vb.emplace_back(m.biases[l].size(), 0.0);
    }
  }

  void update(AutoencoderModel& m, const GradientSet& g, double lr) {
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    auto apply = [&](double& w, double& mo, double& ve, double grad) {
      mo = beta1 * mo + (1.0 - beta1) * grad;
      ve = beta2 * ve + (1.0 - beta2) * grad * grad;
      w -= lr * (mo / c1) / (std::sqrt(ve / c2) + eps);
    };
    for (std::size_t l = 0; l < m.n_layers(); ++l) {
      double* w = m.weights[l].data();
      double* mo = mw[l].data();
      double* ve = vw[l].data();
      const double* grad = g.weight_grads[l].data();
      const std::size_t n = m.weights[l].rows() * m.weights[l].cols();
      for (std::size_t i = 0; i < n; ++i) apply(w[i], mo[i], ve[i], grad[i]);
      for (std::size_t i = 0; i < m.biases[l].size(); ++i) {
        apply(m.biases[l][i], mb[l][i], vb[l][i], g.bias_grads[l][i]);
      }
    }
  }
};

}  // namespace

TrainHistory train(AutoencoderModel& model, const TrainConfig& cfg,
                   const Matrix& train_set, const Matrix& validation_set,
                   std::size_t threads) {
  if (train_set.rows() == 0) {
    throw Error(ErrorCode::data, "empty training set");
  }
  if (train_set.cols() != model.input_width() ||
      (validation_set.rows() > 0 && validation_set.cols() != model.input_width())) {
    throw Error(ErrorCode::argument, "training data width mismatch");
  }
  if (cfg.batch_size == 0 || !(cfg.learning_rate > 0.0)) {
    throw Error(ErrorCode::argument, "batch_size and learning_rate must be positive");
  }
  model.loss_kind = cfg.loss_kind;
  model.l2_lambda = cfg.l2_lambda;

  TrainHistory history;
  if (cfg.epochs == 0) return history;

  AdamState adam(model);
  std::vector<std::size_t> order(train_set.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, "batch", epoch));
    rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      Matrix batch = select_rows(
          train_set, std::span<const std::size_t>(order).subspan(start, end - start));
      GradientSet g = gradients(model, batch, threads);
      epoch_loss += g.data_loss * static_cast<double>(batch.rows());
      adam.update(model, g, cfg.learning_rate);
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    history.validation_loss.push_back(
        validation_set.rows() > 0 ? dataset_loss(model, validation_set, threads)
                                  : history.train_loss.back());
  }
  return history;
}

std::vector<double> score(const AutoencoderModel& model, const Matrix& x,
                          std::size_t threads, std::optional<LossKind> metric) {
  if (x.cols() != model.input_width()) {
    throw Error(ErrorCode::argument, "width mismatch");
  }
  const LossKind kind = metric.value_or(model.loss_kind);
  std::vector<double> scores(x.rows(), 0.0);
  parallel_blocks(x.rows(), kRowBlock, threads,
                  [&](std::size_t, std::size_t lo, std::size_t hi) {
                    Workspace ws(model.architecture);
                    for (std::size_t r = lo; r < hi; ++r) {
                      forward_row(model, x.row(r), ws);
                      scores[r] =
                          reconstruction_error(x.row(r), ws.acts.back(), kind);
                    }
                  });
  return scores;
}

double detect(std::span<const double> scores, double threshold) {
  if (scores.empty()) {
    throw Error(ErrorCode::argument, "empty score vector");
  }
  std::size_t flagged = 0;
  for (double s : scores) {
    if (s > threshold) ++flagged;
  }
  return static_cast<double>(flagged) / static_cast<double>(scores.size());
}

SearchResult random_search(const SearchSpace& space, LossKind loss,
                           const Matrix& train_set, const Matrix& validation_set,
                           std::size_t threads) {
  if (space.budget < 1) {
    throw Error(ErrorCode::argument, "budget must be >= 1");
  }
  if (space.architectures.empty() || space.learning_rates.empty() ||
      space.epoch_counts.empty() || space.l2_lambdas.empty()) {
    throw Error(ErrorCode::argument, "search space lists must be non-empty");
  }
  for (const auto& arch : space.architectures) validate(arch);

  Rng rng(derive_seed(space.seed, "search"));
  SearchResult result;
  for (std::size_t t = 0; t < space.budget; ++t) {
    SearchTrial trial;
    trial.index = t;
    trial.architecture = space.architectures[rng.below(space.architectures.size())];
    trial.config.learning_rate =
        space.learning_rates[rng.below(space.learning_rates.size())];
    trial.config.epochs = space.epoch_counts[rng.below(space.epoch_counts.size())];
    trial.config.l2_lambda = space.l2_lambdas[rng.below(space.l2_lambdas.size())];
    trial.config.batch_size = space.batch_size;
    trial.config.loss_kind = loss;
    trial.config.seed = derive_seed(space.seed, "search.trial", t);

    AutoencoderModel model =
        build_autoencoder(trial.architecture, loss, trial.config.l2_lambda,
                          derive_seed(space.seed, "search.init", t));
    TrainConfig trial_cfg = trial.config;
    trial_cfg.epochs = std::min<std::size_t>(10, trial.config.epochs);
    TrainHistory h = train(model, trial_cfg, train_set, validation_set, threads);
    trial.validation_loss = h.validation_loss.empty()
                                ? dataset_loss(model, validation_set, threads)
                                : h.validation_loss.back();
    result.trials.push_back(std::move(trial));
  }
  result.best_index = 0;
  for (std::size_t t = 1; t < result.trials.size(); ++t) {
    if (result.trials[t].validation_loss <
        result.trials[result.best_index].validation_loss) {
      result.best_index = t;
    }
  }
  return result;
}

std::string autoencoder_to_text(const AutoencoderModel& m) {
  std::string out = "zeroday-autoencoder 1\n";
  out += "layers";
  for (std::size_t w : m.architecture.layer_widths) {
    out += " " + std::to_string(w);
  }
  out += "\nactivation " + to_string(m.architecture.hidden_activation);
  out += "\nloss " + to_string(m.loss_kind);
  out += "\nl2 " + format_double(m.l2_lambda);
  out += "\ninit_seed " + std::to_string(m.init_seed);
  out += "\npipeline_fingerprint " +
         (m.pipeline_fingerprint.empty() ? "-" : m.pipeline_fingerprint);
  out += "\n";
  for (std::size_t l = 0; l < m.n_layers(); ++l) {
    out += "weights " + std::to_string(l) + " " +
           std::to_string(m.weights[l].rows()) + " " +
           std::to_string(m.weights[l].cols()) + "\n";
    for (std::size_t i = 0; i < m.weights[l].rows(); ++i) {
      auto row = m.weights[l].row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) out.push_back(' ');
        out += format_double(row[j]);
      }
      out.push_back('\n');
    }
    out += "bias " + std::to_string(l) + "\n";
    for (std::size_t j = 0; j < m.biases[l].size(); ++j) {
      if (j) out.push_back(' ');
      out += format_double(m.biases[l][j]);
    }
    out.push_back('\n');
  }
  out += "end\n";
  return out;
}

namespace {

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) {
      throw Error(ErrorCode::data, "truncated model document");
    }
    return line;
  }

 private:
  std::istringstream in_;
};

std::vector<double> parse_numbers(const std::string& line, std::size_t expect) {
  std::istringstream ss(line);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    auto v = parse_double(tok);
    if (!v) throw Error(ErrorCode::data, "bad number in model document: " + tok);
    out.push_back(*v);
  }
  if (out.size() != expect) {
    throw Error(ErrorCode::data, "wrong value count in model document");
  }
  return out;
}

}  // namespace

AutoencoderModel autoencoder_from_text(const std::string& text) {
  LineReader reader(text);
  if (reader.next() != "zeroday-autoencoder 1") {
    throw Error(ErrorCode::data, "not an autoencoder document");
  }
  AutoencoderModel m;
  {
    std::istringstream ss(reader.next());
    std::string tag;
    ss >> tag;
    if (tag != "layers") throw Error(ErrorCode::data, "expected layers line");
    std::size_t w;
    while (ss >> w) m.architecture.layer_widths.push_back(w);
  }
  auto expect_field = [&](const std::string& name) {
    std::istringstream ss(reader.next());
    std::string tag, value;
    ss >> tag >> value;
    if (tag != name) {
      throw Error(ErrorCode::data, "expected field '" + name + "'");
    }
    return value;
  };
  m.architecture.hidden_activation =
      activation_from_string(expect_field("activation"));
  m.loss_kind = loss_from_string(expect_field("loss"));
  {
    auto v = parse_double(expect_field("l2"));
    if (!v) throw Error(ErrorCode::data, "bad l2 value");
    m.l2_lambda = *v;
  }
  try {
    m.init_seed = std::stoull(expect_field("init_seed"));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::data, "bad init_seed value");
  }
  {
    const std::string fp = expect_field("pipeline_fingerprint");
    if (fp != "-") m.pipeline_fingerprint = fp;
  }
  validate(m.architecture);
  const std::size_t n_layers = m.architecture.layer_widths.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t rows = m.architecture.layer_widths[l];
    const std::size_t cols = m.architecture.layer_widths[l + 1];
    {
      std::istringstream ss(reader.next());
      std::string tag;
      std::size_t idx, r, c;
      ss >> tag >> idx >> r >> c;
      if (tag != "weights" || idx != l || r != rows || c != cols) {
        throw Error(ErrorCode::data, "bad weights header");
      }
    }
    Matrix w(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      auto vals = parse_numbers(reader.next(), cols);
      for (std::size_t j = 0; j < cols; ++j) w(i, j) = vals[j];
    }
    m.weights.push_back(std::move(w));
    {
      std::istringstream ss(reader.next());
      std::string tag;
      std::size_t idx;
      ss >> tag >> idx;
      if (tag != "bias" || idx != l) {
        throw Error(ErrorCode::data, "bad bias header");
      }
    }
    m.biases.push_back(parse_numbers(reader.next(), cols));
  }
  if (reader.next() != "end") {
    throw Error(ErrorCode::data, "missing end marker");
  }
  return m;
}

void save_autoencoder(const AutoencoderModel& model, const std::string& path) {
  write_text_file(path, autoencoder_to_text(model));
}

AutoencoderModel load_autoencoder(const std::string& path) {
  return autoencoder_from_text(read_text_file(path));
}

}  // namespace zeroday
