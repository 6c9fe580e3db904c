// Soft-margin kernel SVM trained from scratch by sequential minimal
// optimization on the dual:
//
//   min_a  1/2 sum_ij a_i a_j y_i y_j K(x_i,x_j) - sum_i a_i
//   s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0
//
// The working set is the deterministic maximal-violating pair: with
// G_i = sum_j Q_ij a_j - 1 and Q_ij = y_i y_j K_ij,
//   i = argmax_{t in I_up}  -y_t G_t,   j = argmin_{t in I_low} -y_t G_t,
// ties resolved to the lowest index. The pair is optimized analytically with
// box clipping and the solver stops when m(a) - M(a) <= tol, at which point
// the bias b = (m + M)/2 satisfies every KKT condition within tol/2. No
// randomized selection is involved, so training is bitwise reproducible.

#ifndef MAG_SVM_HPP
#define MAG_SVM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mag/domain.hpp"

namespace mag {

struct KernelSpec {
  enum class Kind { linear, rbf };

  Kind kind = Kind::rbf;
  double gamma = 1.0;  // rbf only; ignored for linear

  static KernelSpec linear() { return KernelSpec{Kind::linear, 0.0}; }

  static KernelSpec rbf(double gamma) {
    detail::require(gamma > 0.0, ErrorKind::invalid_argument,
                    "KernelSpec: rbf gamma must be positive");
    return KernelSpec{Kind::rbf, gamma};
  }
};

inline const char* kernel_name(KernelSpec::Kind kind) {
  return kind == KernelSpec::Kind::linear ? "linear" : "rbf";
}

inline double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                          std::span<const double> y) {
  detail::require(x.size() == y.size(), ErrorKind::dimension_mismatch,
                  "kernel_eval: vectors must have the same dimension");
  if (spec.kind == KernelSpec::Kind::linear) {
    double dot = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) dot += x[d] * y[d];
    return dot;
  }
  double sq = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - y[d];
    sq += diff * diff;
  }
  return std::exp(-spec.gamma * sq);
}

// Trained model: support vectors with signed dual coefficients (a_i * y_i)
// and the bias. C is kept as training metadata.
class SvmModel {
 public:
  SvmModel(KernelSpec kernel, std::vector<std::vector<double>> support_vectors,
           std::vector<double> coefs, double bias, double c)
      : kernel_(kernel),
        support_vectors_(std::move(support_vectors)),
        coefs_(std::move(coefs)),
        bias_(bias),
        c_(c) {
    detail::require(c_ > 0.0, ErrorKind::invalid_argument,
                    "SvmModel: C must be positive");
    detail::require(!support_vectors_.empty(), ErrorKind::invalid_argument,
                    "SvmModel: needs at least one support vector");
    detail::require(support_vectors_.size() == coefs_.size(),
                    ErrorKind::invalid_argument,
                    "SvmModel: one coefficient per support vector");
    dim_ = support_vectors_.front().size();
    detail::require(dim_ > 0, ErrorKind::invalid_argument,
                    "SvmModel: support vectors must be non-empty");
    for (const auto& sv : support_vectors_) {
      detail::require(sv.size() == dim_, ErrorKind::dimension_mismatch,
                      "SvmModel: support vectors must share one dimension");
    }
    for (double coef : coefs_) {
      detail::require(coef != 0.0 && std::abs(coef) <= c_,
                      ErrorKind::invalid_argument,
                      "SvmModel: coefficients must satisfy 0 < |coef| <= C");
    }
    if (kernel_.kind == KernelSpec::Kind::rbf) {
      detail::require(kernel_.gamma > 0.0, ErrorKind::invalid_argument,
                      "SvmModel: rbf gamma must be positive");
    }
  }

  [[nodiscard]] const KernelSpec& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const std::vector<std::vector<double>>& support_vectors() const noexcept {
    return support_vectors_;
  }
  [[nodiscard]] const std::vector<double>& coefs() const noexcept { return coefs_; }
  [[nodiscard]] double bias() const noexcept { return bias_; }
  [[nodiscard]] double c() const noexcept { return c_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

 private:
  KernelSpec kernel_;
  std::vector<std::vector<double>> support_vectors_;
  std::vector<double> coefs_;
  double bias_;
  double c_;
  std::size_t dim_ = 0;
};

inline double decision(const SvmModel& model, std::span<const double> x) {
  detail::require(x.size() == model.dim(), ErrorKind::dimension_mismatch,
                  "decision: query dimension does not match the model");
  double value = model.bias();
  const auto& svs = model.support_vectors();
  const auto& coefs = model.coefs();
  for (std::size_t j = 0; j < svs.size(); ++j) {
    value += coefs[j] * kernel_eval(model.kernel(), svs[j], x);
  }
  return value;
}

// Solver state captured when the iteration budget runs out.
struct SmoDiagnostics {
  std::vector<double> alpha;
  double bias = 0.0;
  double kkt_gap = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, SmoDiagnostics diagnostics)
      : Error(ErrorKind::non_convergence, message),
        diagnostics_(std::move(diagnostics)) {}

  [[nodiscard]] const SmoDiagnostics& diagnostics() const noexcept {
    return diagnostics_;
  }

 private:
  SmoDiagnostics diagnostics_;
};

namespace detail {

// Q_ij = y_i y_j K_ij rows, cached as a full matrix for small problems and
// recomputed per request above the cache limit.
class QProvider {
 public:
  QProvider(const std::vector<std::vector<double>>& features,
            const std::vector<int>& labels, const KernelSpec& kernel)
      : features_(features), labels_(labels), kernel_(kernel), n_(features.size()) {
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      diag_[i] = kernel_eval(kernel_, features_[i], features_[i]);
    }
    if (n_ <= kCacheLimit) {
      cache_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          const double q = static_cast<double>(labels_[i] * labels_[j]) *
                           kernel_eval(kernel_, features_[i], features_[j]);
          cache_[i * n_ + j] = q;
          cache_[j * n_ + i] = q;
        }
      }
    } else {
      scratch_a_.resize(n_);
      scratch_b_.resize(n_);
    }
  }

  [[nodiscard]] double diag_q(std::size_t i) const { return diag_[i]; }

  // Returns row i of Q; `slot` selects one of two scratch buffers so two
  // rows can be alive at once on the uncached path.
  std::span<const double> row(std::size_t i, int slot) {
    if (!cache_.empty()) {
      return std::span<const double>(cache_.data() + i * n_, n_);
    }
    auto& scratch = slot == 0 ? scratch_a_ : scratch_b_;
    for (std::size_t t = 0; t < n_; ++t) {
      scratch[t] = static_cast<double>(labels_[i] * labels_[t]) *
                   kernel_eval(kernel_, features_[i], features_[t]);
    }
    return std::span<const double>(scratch);
  }

 private:
  static constexpr std::size_t kCacheLimit = 2048;

  const std::vector<std::vector<double>>& features_;
  const std::vector<int>& labels_;
  KernelSpec kernel_;
  std::size_t n_;
  std::vector<double> diag_;
  std::vector<double> cache_;
  std::vector<double> scratch_a_;
  std::vector<double> scratch_b_;
};

}  // namespace detail

// Trains on features with labels in {-1, +1}. The iteration budget is
// max_passes * n working-set updates; exhausting it raises
// NonConvergenceError carrying the best iterate seen. alpha_cut is the
// retention threshold below which a dual variable is treated as zero.
inline SvmModel smo_train(const std::vector<std::vector<double>>& features,
                          const std::vector<int>& labels, double c,
                          const KernelSpec& kernel, double tol = 1e-3,
                          std::size_t max_passes = 200,
                          double alpha_cut = 1e-12) {
  const std::size_t n = features.size();
  detail::require(n >= 2, ErrorKind::invalid_argument,
                  "smo_train: needs at least 2 samples");
  detail::require(labels.size() == n, ErrorKind::length_mismatch,
                  "smo_train: one label per sample");
  detail::require(c > 0.0, ErrorKind::invalid_argument,
                  "smo_train: C must be positive");
  detail::require(tol > 0.0, ErrorKind::invalid_argument,
                  "smo_train: tol must be positive");
  const std::size_t dim = features.front().size();
  detail::require(dim > 0, ErrorKind::invalid_argument,
                  "smo_train: samples must be non-empty vectors");
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    detail::require(features[i].size() == dim, ErrorKind::dimension_mismatch,
                    "smo_train: all samples must share one dimension");
    detail::require(labels[i] == 1 || labels[i] == -1, ErrorKind::invalid_argument,
                    "smo_train: labels must be +1 or -1");
    (labels[i] == 1 ? has_pos : has_neg) = true;
  }
  detail::require(has_pos && has_neg, ErrorKind::single_class,
                  "smo_train: both classes must be present");

  detail::QProvider q(features, labels, kernel);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G_i at alpha = 0

  constexpr double kTau = 1e-12;
  const std::size_t budget = max_passes * n;
  std::size_t iterations = 0;

  SmoDiagnostics best;
  best.alpha = alpha;

  double m_up = 0.0;
  double m_low = 0.0;
  bool converged = false;

  for (;;) {
    // Maximal-violating-pair selection.
    std::ptrdiff_t i = -1;
    std::ptrdiff_t j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -static_cast<double>(labels[t]) * grad[t];
      const bool in_up = labels[t] == 1 ? alpha[t] < c : alpha[t] > 0.0;
      const bool in_low = labels[t] == 1 ? alpha[t] > 0.0 : alpha[t] < c;
      if (in_up && v > m_up) {
        m_up = v;
        i = static_cast<std::ptrdiff_t>(t);
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    const double gap = m_up - m_low;
    if (gap < best.kkt_gap) {
      best.alpha = alpha;
      best.bias = (m_up + m_low) / 2.0;
      best.kkt_gap = gap;
      best.iterations = iterations;
    }
    if (gap <= tol) {
      converged = true;
      break;
    }
    if (iterations >= budget) break;
    ++iterations;

    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    const auto q_i = q.row(ui, 0);
    const auto q_j = q.row(uj, 1);
    const double old_ai = alpha[ui];
    const double old_aj = alpha[uj];

    if (labels[ui] != labels[uj]) {
      double quad = q.diag_q(ui) + q.diag_q(uj) + 2.0 * q_i[uj];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[ui] - grad[uj]) / quad;
      const double diff = alpha[ui] - alpha[uj];
      alpha[ui] += delta;
      alpha[uj] += delta;
      if (diff > 0.0) {
        if (alpha[uj] < 0.0) {
          alpha[uj] = 0.0;
          alpha[ui] = diff;
        }
      } else {
        if (alpha[ui] < 0.0) {
          alpha[ui] = 0.0;
          alpha[uj] = -diff;
        }
      }
      if (diff > 0.0) {
        if (alpha[ui] > c) {
          alpha[ui] = c;
          alpha[uj] = c - diff;
        }
      } else {
        if (alpha[uj] > c) {
          alpha[uj] = c;
          alpha[ui] = c + diff;
        }
      }
    } else {
      double quad = q.diag_q(ui) + q.diag_q(uj) - 2.0 * q_i[uj];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[ui] - grad[uj]) / quad;
      const double sum = alpha[ui] + alpha[uj];
      alpha[ui] -= delta;
      alpha[uj] += delta;
      if (sum > c) {
        if (alpha[ui] > c) {
          alpha[ui] = c;
          alpha[uj] = sum - c;
        }
      } else {
        if (alpha[uj] < 0.0) {
          alpha[uj] = 0.0;
          alpha[ui] = sum;
        }
      }
      if (sum > c) {
        if (alpha[uj] > c) {
          alpha[uj] = c;
          alpha[ui] = sum - c;
        }
      } else {
        if (alpha[ui] < 0.0) {
          alpha[ui] = 0.0;
          alpha[uj] = sum;
        }
      }
    }

    const double delta_ai = alpha[ui] - old_ai;
    const double delta_aj = alpha[uj] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += q_i[t] * delta_ai + q_j[t] * delta_aj;
    }
  }

  if (!converged) {
    throw NonConvergenceError(
        "smo_train: no convergence within " + std::to_string(budget) +
            " updates (KKT gap " + std::to_string(best.kkt_gap) + ")",
        std::move(best));
  }

  // Every t in I_up demands b >= -y_t G_t and every t in I_low demands
  // b <= -y_t G_t; the midpoint violates neither by more than gap/2.
  const double bias = (m_up + m_low) / 2.0;
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> coefs;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > alpha_cut) {
      support_vectors.push_back(features[t]);
      coefs.push_back(alpha[t] * static_cast<double>(labels[t]));
    }
  }
  return SvmModel(kernel, std::move(support_vectors), std::move(coefs), bias, c);
}

// Maximum KKT violation of `model` over its own training set. Support
// vectors are matched back to training rows by exact value (the solver
// copies them unchanged); unmatched rows carry alpha = 0.
inline double kkt_max_violation(const SvmModel& model,
                                const std::vector<std::vector<double>>& features,
                                const std::vector<int>& labels, double c,
                                double tol) {
  (void)tol;
  detail::require(labels.size() == features.size(), ErrorKind::length_mismatch,
                  "kkt_max_violation: one label per sample");
  const auto& svs = model.support_vectors();
  const auto& coefs = model.coefs();
  std::vector<bool> consumed(svs.size(), false);

  double worst = 0.0;
  for (std::size_t t = 0; t < features.size(); ++t) {
    detail::require(features[t].size() == model.dim(),
                    ErrorKind::dimension_mismatch,
                    "kkt_max_violation: sample dimension does not match model");
    double alpha = 0.0;
    for (std::size_t s = 0; s < svs.size(); ++s) {
      const bool same_sign = (coefs[s] > 0.0) == (labels[t] > 0);
      if (!consumed[s] && same_sign && svs[s] == features[t]) {
        consumed[s] = true;
        alpha = std::abs(coefs[s]);
        break;
      }
    }
    const double margin = static_cast<double>(labels[t]) * decision(model, features[t]);
    double violation = 0.0;
    if (alpha <= 0.0) {
      violation = std::max(0.0, 1.0 - margin);  // requires y f(x) >= 1
    } else if (alpha >= c) {
      violation = std::max(0.0, margin - 1.0);  // requires y f(x) <= 1
    } else {
      violation = std::abs(margin - 1.0);  // free vector sits on the margin
    }
    worst = std::max(worst, violation);
  }
  // A support vector that matches no training row means the model was not
  // trained on this data.
  for (std::size_t s = 0; s < svs.size(); ++s) {
    detail::require(consumed[s], ErrorKind::invalid_argument,
                    "kkt_max_violation: model does not match the given data");
  }
  return worst;
}

}  // namespace mag

#endif  // MAG_SVM_HPP
