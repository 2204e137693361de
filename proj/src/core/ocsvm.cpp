#include "ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "numfmt.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace zeroday {

double resolve_gamma(const KernelSpec& spec, const Matrix& x) {
  if (!spec.is_scale()) return spec.gamma;
  if (x.rows() == 0 || x.cols() == 0) {
    throw Error(ErrorCode::argument, "cannot resolve gamma on an empty matrix");
  }
  const std::size_t n = x.rows() * x.cols();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x.data()[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x.data()[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n);
  if (!(var > 0.0)) var = 1.0;
  return 1.0 / (static_cast<double>(x.cols()) * var);
}

double rbf_kernel(std::span<const double> x, std::span<const double> y,
                  double gamma) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::argument, "kernel input length mismatch");
  }
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::argument, "gamma must be positive");
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

namespace {

// Row-on-demand kernel cache with LRU eviction. When the budget covers
// all n rows this is simply a lazily filled dense matrix.
class KernelCache {
 public:
  KernelCache(const Matrix& x, double gamma, std::size_t budget_bytes,
              std::size_t threads)
      : x_(x), gamma_(gamma), threads_(threads), norms_(x.rows()) {
    const std::size_t row_bytes = x.rows() * sizeof(double);
    budget_rows_ = std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(1, row_bytes));
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      double s = 0.0;
      auto row = x_.row(i);
      for (double v : row) s += v * v;
      norms_[i] = s;
    }
  }

  const std::vector<double>& row(std::size_t i) {
    auto it = map_.find(i);
    if (it != map_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.order);
      return it->second.values;
    }
    if (map_.size() >= budget_rows_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      map_.erase(victim);
    }
    lru_.push_front(i);
    Entry entry;
    entry.order = lru_.begin();
    entry.values = compute_row(i);
    auto [pos, inserted] = map_.emplace(i, std::move(entry));
    return pos->second.values;
  }

 private:
  struct Entry {
    std::list<std::size_t>::iterator order;
    std::vector<double> values;
  };

  std::vector<double> compute_row(std::size_t i) const {
    const std::size_t n = x_.rows();
    std::vector<double> out(n);
    const auto xi = x_.row(i);
    parallel_blocks(n, 512, threads_, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        double dot = 0.0;
        const auto xj = x_.row(j);
        for (std::size_t c = 0; c < xi.size(); ++c) dot += xi[c] * xj[c];
        const double d2 = norms_[i] + norms_[j] - 2.0 * dot;
        out[j] = std::exp(-gamma_ * std::max(0.0, d2));
      }
    });
    return out;
  }

  const Matrix& x_;
  double gamma_;
  std::size_t threads_;
  std::size_t budget_rows_;
  std::vector<double> norms_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, Entry> map_;
};

}  // namespace

std::string OneClassSvmModel::fingerprint() const {
  Fingerprinter fp;
  fp.add(ocsvm_to_text(*this));
  return fp.hex();
}

OneClassSvmModel fit(const Matrix& x, double nu, const KernelSpec& kernel,
                     const SmoConfig& cfg, std::size_t threads) {
  if (!(nu > 0.0 && nu <= 1.0)) {
    throw Error(ErrorCode::argument, "nu must be in (0,1]");
  }
  if (x.rows() < 2) {
    throw Error(ErrorCode::argument, "need at least 2 training rows");
  }
  if (!(cfg.tolerance > 0.0) || cfg.max_passes == 0) {
    throw Error(ErrorCode::argument, "tolerance and max_passes must be positive");
  }
  const std::size_t n = x.rows();
  const double upper = 1.0 / (nu * static_cast<double>(n));
  const double gamma = resolve_gamma(kernel, x);
  KernelCache cache(x, gamma, cfg.cache_mb << 20, threads);

  // feasible start: distribute the unit mass over a seeded subset
  std::vector<double> alpha(n, 0.0);
  {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(cfg.seed, "smo.init"));
    rng.shuffle(order);
    const std::size_t full = static_cast<std::size_t>(
        std::floor(nu * static_cast<double>(n)));
    for (std::size_t k = 0; k < full; ++k) alpha[order[k]] = upper;
    const double rest = 1.0 - static_cast<double>(full) * upper;
    if (rest > 0.0 && full < n) alpha[order[full]] = rest;
  }

  // gradient of the objective: G = K alpha
  std::vector<double> grad(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    const auto& ki = cache.row(i);
    const double ai = alpha[i];
    for (std::size_t j = 0; j < n; ++j) grad[j] += ai * ki[j];
  }

  const std::size_t max_updates = cfg.max_passes * n;
  double gap = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (std::size_t iter = 0; iter < max_updates; ++iter) {
    // receiver: smallest gradient with headroom; donor: largest gradient
    // holding mass
    std::size_t up = n, down = n;
    double g_up = std::numeric_limits<double>::infinity();
    double g_down = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] < upper && grad[i] < g_up) {
        g_up = grad[i];
        up = i;
      }
      if (alpha[i] > 0.0 && grad[i] > g_down) {
        g_down = grad[i];
        down = i;
      }
    }
    gap = (up == n || down == n) ? 0.0 : g_down - g_up;
    if (gap <= cfg.tolerance) {
      converged = true;
      break;
    }

    const auto& k_up = cache.row(up);
    const auto& k_down = cache.row(down);
    const double curvature =
        std::max(k_up[up] + k_down[down] - 2.0 * k_up[down], 1e-12);
    double delta = gap / curvature;
    delta = std::min(delta, std::min(upper - alpha[up], alpha[down]));
    if (delta == upper - alpha[up]) {
      alpha[up] = upper;
      alpha[down] -= delta;
    } else if (delta == alpha[down]) {
      alpha[down] = 0.0;
      alpha[up] += delta;
    } else {
      alpha[up] += delta;
      alpha[down] -= delta;
    }
    for (std::size_t j = 0; j < n; ++j) {
      grad[j] += delta * (k_up[j] - k_down[j]);
    }
  }
  if (!converged) {
    throw Error(ErrorCode::numeric,
                "one-class svm did not converge within " +
                    std::to_string(cfg.max_passes) +
                    " passes; kkt gap = " + format_double(gap));
  }

  // offset from free support vectors; fall back to the bound midpoint
  double rho;
  {
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] > 0.0 && alpha[i] < upper) {
        free_sum += grad[i];
        ++free_count;
      } else if (alpha[i] == 0.0) {
        hi = std::min(hi, grad[i]);
      } else {
        lo = std::max(lo, grad[i]);
      }
    }
    if (free_count > 0) {
      rho = free_sum / static_cast<double>(free_count);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
      rho = 0.5 * (lo + hi);
    } else {
      rho = std::isfinite(lo) ? lo : hi;
    }
  }

  OneClassSvmModel model;
  model.nu = nu;
  model.gamma = gamma;
  model.rho = rho;
  model.n_train = n;
  model.trained_on = fingerprint_of(x);
  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > 0.0) sv.push_back(i);
  }
  model.support_vectors = select_rows(x, sv);
  for (std::size_t i : sv) model.alphas.push_back(alpha[i]);
  return model;
}

double decision_function(const OneClassSvmModel& model,
                         std::span<const double> x) {
  if (x.size() != model.width()) {
    throw Error(ErrorCode::argument, "decision input width mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < model.support_vectors.rows(); ++i) {
    acc += model.alphas[i] *
           rbf_kernel(model.support_vectors.row(i), x, model.gamma);
  }
  return acc - model.rho;
}

Prediction predict(const OneClassSvmModel& model, std::span<const double> x) {
  return decision_function(model, x) > 0.0 ? Prediction::inlier
                                           : Prediction::outlier;
}

double detect_rate(const OneClassSvmModel& model, const Matrix& x,
                   std::size_t threads) {
  if (x.rows() == 0) {
    throw Error(ErrorCode::argument, "empty matrix");
  }
  if (x.cols() != model.width()) {
    throw Error(ErrorCode::argument, "width mismatch");
  }
  const std::size_t n_blocks = block_count(x.rows(), 256);
  std::vector<std::size_t> flagged(n_blocks, 0);
  parallel_blocks(x.rows(), 256, threads,
                  [&](std::size_t b, std::size_t lo, std::size_t hi) {
                    for (std::size_t r = lo; r < hi; ++r) {
                      if (predict(model, x.row(r)) == Prediction::outlier) {
                        ++flagged[b];
                      }
                    }
                  });
  std::size_t total = 0;
  for (std::size_t f : flagged) total += f;
  return static_cast<double>(total) / static_cast<double>(x.rows());
}

double dual_objective(const Matrix& x, const std::vector<double>& alphas,
                      double gamma) {
  if (alphas.size() != x.rows()) {
    throw Error(ErrorCode::argument, "alpha count mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (alphas[i] == 0.0) continue;
    for (std::size_t j = 0; j < x.rows(); ++j) {
      if (alphas[j] == 0.0) continue;
      acc += alphas[i] * alphas[j] * rbf_kernel(x.row(i), x.row(j), gamma);
    }
  }
  return 0.5 * acc;
}

namespace {

// Euclidean projection onto { 0 <= a <= c, sum a = 1 } by bisection on
// the simplex shift.
void project_capped_simplex(std::vector<double>& a, double c) {
  const std::size_t n = a.size();
  double lo = -c, hi = 0.0;
  for (double v : a) {
    lo = std::min(lo, v - c);
    hi = std::max(hi, v);
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double tau = 0.5 * (lo + hi);
    double sum = 0.0;
    for (double v : a) sum += std::clamp(v - tau, 0.0, c);
    if (sum > 1.0) {
      lo = tau;
    } else {
      hi = tau;
    }
    if (hi - lo < 1e-18) break;
  }
  const double tau = 0.5 * (lo + hi);
  for (double& v : a) v = std::clamp(v - tau, 0.0, c);
}

}  // namespace

DualSolution solve_dual_reference(const Matrix& x, double nu, double gamma) {
  if (!(nu > 0.0 && nu <= 1.0)) {
    throw Error(ErrorCode::argument, "nu must be in (0,1]");
  }
  const std::size_t n = x.rows();
  if (n == 0) {
    throw Error(ErrorCode::argument, "empty matrix");
  }
  if (n > 2048) {
    throw Error(ErrorCode::argument,
                "reference solver is limited to 2048 rows");
  }
  const double upper = 1.0 / (nu * static_cast<double>(n));

  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = rbf_kernel(x.row(i), x.row(j), gamma);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  // Gershgorin bound on the largest eigenvalue
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) row_sum += k(i, j);
    lipschitz = std::max(lipschitz, row_sum);
  }
  const double step = 1.0 / lipschitz;

  auto mul = [&](const std::vector<double>& a, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const double* row = k.row(i).data();
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * a[j];
      out[i] = acc;
    }
  };
  auto objective = [&](const std::vector<double>& a) {
    std::vector<double> ka(n);
    mul(a, ka);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * ka[i];
    return 0.5 * acc;
  };
  auto kkt_gap = [&](const std::vector<double>& a) {
    std::vector<double> g(n);
    mul(a, g);
    double g_up = std::numeric_limits<double>::infinity();
    double g_down = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] < upper) g_up = std::min(g_up, g[i]);
      if (a[i] > 0.0) g_down = std::max(g_down, g[i]);
    }
    if (!std::isfinite(g_up) || !std::isfinite(g_down)) return 0.0;
    return std::max(0.0, g_down - g_up);
  };

  // FISTA with objective-based restart
  std::vector<double> a(n, 1.0 / static_cast<double>(n));
  project_capped_simplex(a, upper);
  std::vector<double> y = a, prev = a, g(n);
  double t = 1.0;
  const std::size_t max_iters = 200000;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    mul(y, g);
    prev = a;
    for (std::size_t i = 0; i < n; ++i) a[i] = y[i] - step * g[i];
    project_capped_simplex(a, upper);
    double momentum_dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      momentum_dot += g[i] * (a[i] - prev[i]);
    }
    if (momentum_dot > 0.0) {
      t = 1.0;
      y = a;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = a[i] + beta * (a[i] - prev[i]);
      }
      t = t_next;
    }
    if (iter % 64 == 63 && kkt_gap(a) <= 1e-8) break;
  }
  return {a, objective(a)};
}

std::string ocsvm_to_text(const OneClassSvmModel& m) {
  std::string out = "zeroday-ocsvm 1\n";
  out += "nu " + format_double(m.nu);
  out += "\ngamma " + format_double(m.gamma);
  out += "\nrho " + format_double(m.rho);
  out += "\nn_train " + std::to_string(m.n_train);
  out += "\ntrained_on " + (m.trained_on.hash.empty() ? "-" : m.trained_on.hash) +
         " " + std::to_string(m.trained_on.rows);
  out += "\npipeline_fingerprint " +
         (m.pipeline_fingerprint.empty() ? "-" : m.pipeline_fingerprint);
  out += "\nsupport_vectors " + std::to_string(m.support_vectors.rows()) + " " +
         std::to_string(m.support_vectors.cols()) + "\n";
  for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
    auto row = m.support_vectors.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out.push_back(' ');
      out += format_double(row[j]);
    }
    out.push_back('\n');
  }
  out += "alphas\n";
  for (std::size_t i = 0; i < m.alphas.size(); ++i) {
    if (i) out.push_back(' ');
    out += format_double(m.alphas[i]);
  }
  out += "\nend\n";
  return out;
}

OneClassSvmModel ocsvm_from_text(const std::string& text) {
  std::istringstream in(text);
  auto next_line = [&in]() {
    std::string line;
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::data, "truncated model document");
    }
    return line;
  };
  if (next_line() != "zeroday-ocsvm 1") {
    throw Error(ErrorCode::data, "not a one-class svm document");
  }
  auto field = [&](const std::string& name) {
    std::istringstream ss(next_line());
    std::string tag, value;
    ss >> tag >> value;
    if (tag != name) {
      throw Error(ErrorCode::data, "expected field '" + name + "'");
    }
    return value;
  };
  auto field_double = [&](const std::string& name) {
    auto v = parse_double(field(name));
    if (!v) throw Error(ErrorCode::data, "bad number for field " + name);
    return *v;
  };
  OneClassSvmModel m;
  try {
    m.nu = field_double("nu");
    m.gamma = field_double("gamma");
    m.rho = field_double("rho");
    m.n_train = std::stoull(field("n_train"));
    {
      std::istringstream ss(next_line());
      std::string tag, hash;
      std::size_t rows;
      ss >> tag >> hash >> rows;
      if (tag != "trained_on") throw Error(ErrorCode::data, "expected trained_on");
      if (hash != "-") m.trained_on = {hash, rows};
    }
    {
      const std::string fp = field("pipeline_fingerprint");
      if (fp != "-") m.pipeline_fingerprint = fp;
    }
    std::size_t n_sv = 0, dim = 0;
    {
      std::istringstream ss(next_line());
      std::string tag;
      ss >> tag >> n_sv >> dim;
      if (tag != "support_vectors") {
        throw Error(ErrorCode::data, "expected support_vectors");
      }
    }
    m.support_vectors = Matrix(n_sv, dim);
    for (std::size_t i = 0; i < n_sv; ++i) {
      std::istringstream ss(next_line());
      std::string tok;
      for (std::size_t j = 0; j < dim; ++j) {
        if (!(ss >> tok)) throw Error(ErrorCode::data, "short support vector row");
        auto v = parse_double(tok);
        if (!v) throw Error(ErrorCode::data, "bad support vector value");
        m.support_vectors(i, j) = *v;
      }
    }
    if (next_line() != "alphas") {
      throw Error(ErrorCode::data, "expected alphas");
    }
    {
      std::istringstream ss(next_line());
      std::string tok;
      while (ss >> tok) {
        auto v = parse_double(tok);
        if (!v) throw Error(ErrorCode::data, "bad alpha value");
        m.alphas.push_back(*v);
      }
    }
    if (m.alphas.size() != n_sv) {
      throw Error(ErrorCode::data, "alpha count does not match support vectors");
    }
    if (next_line() != "end") {
      throw Error(ErrorCode::data, "missing end marker");
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::data, "malformed one-class svm document");
  }
  return m;
}

void save_ocsvm(const OneClassSvmModel& model, const std::string& path) {
  write_text_file(path, ocsvm_to_text(model));
}

OneClassSvmModel load_ocsvm(const std::string& path) {
  return ocsvm_from_text(read_text_file(path));
}

}  // namespace zeroday
