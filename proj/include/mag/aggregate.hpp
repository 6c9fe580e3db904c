// Patient-level aggregation: the counting and averaging baselines, the
// thresholded decision rule, and the histogram+SVM method with its
// grid-search training procedure.
//
// The SVM decision uses the raw margin sign (MSIMUT iff decision >= 0); the
// 0.5 threshold applies to the probability-valued baselines only.

#ifndef MAG_AGGREGATE_HPP
#define MAG_AGGREGATE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mag/domain.hpp"
#include "mag/features.hpp"
#include "mag/metrics.hpp"
#include "mag/svm.hpp"

namespace mag {

inline double counting_score(std::span<const double> probs,
                             double patch_threshold = 0.5) {
  detail::require(!probs.empty(), ErrorKind::empty_input,
                  "counting_score: probs must be non-empty");
  std::size_t count = 0;
  for (double p : probs) {
    if (p >= patch_threshold) ++count;  // ties count as MSI
  }
  return static_cast<double>(count) / static_cast<double>(probs.size());
}

inline double averaging_score(std::span<const double> probs) {
  detail::require(!probs.empty(), ErrorKind::empty_input,
                  "averaging_score: probs must be non-empty");
  double sum = 0.0;
  for (double p : probs) sum += p;
  return sum / static_cast<double>(probs.size());
}

inline ClassLabel threshold_decide(double score, double patient_threshold = 0.5) {
  return score >= patient_threshold ? ClassLabel::MSIMUT : ClassLabel::MSS;
}

class HyperGrid {
 public:
  HyperGrid(std::vector<double> c_values, std::vector<double> gamma_values,
            std::vector<KernelSpec::Kind> kernels)
      : c_values_(std::move(c_values)),
        gamma_values_(std::move(gamma_values)),
        kernels_(std::move(kernels)) {
    detail::require(!c_values_.empty() && !gamma_values_.empty() && !kernels_.empty(),
                    ErrorKind::invalid_argument,
                    "HyperGrid: value lists must be non-empty");
    for (double c : c_values_) {
      detail::require(c > 0.0, ErrorKind::invalid_argument,
                      "HyperGrid: C values must be positive");
    }
    for (double g : gamma_values_) {
      detail::require(g > 0.0, ErrorKind::invalid_argument,
                      "HyperGrid: gamma values must be positive");
    }
    // Canonical order makes enumeration and tie-breaking independent of how
    // the caller listed the values.
    std::sort(c_values_.begin(), c_values_.end());
    c_values_.erase(std::unique(c_values_.begin(), c_values_.end()), c_values_.end());
    std::sort(gamma_values_.begin(), gamma_values_.end());
    gamma_values_.erase(std::unique(gamma_values_.begin(), gamma_values_.end()),
                        gamma_values_.end());
    std::sort(kernels_.begin(), kernels_.end());
    kernels_.erase(std::unique(kernels_.begin(), kernels_.end()), kernels_.end());
  }

  static HyperGrid defaults() {
    return HyperGrid({0.1, 1.0, 10.0, 100.0}, {0.1, 1.0, 10.0},
                     {KernelSpec::Kind::linear, KernelSpec::Kind::rbf});
  }

  [[nodiscard]] const std::vector<double>& c_values() const noexcept { return c_values_; }
  [[nodiscard]] const std::vector<double>& gamma_values() const noexcept {
    return gamma_values_;
  }
  [[nodiscard]] const std::vector<KernelSpec::Kind>& kernels() const noexcept {
    return kernels_;
  }

 private:
  std::vector<double> c_values_;
  std::vector<double> gamma_values_;
  std::vector<KernelSpec::Kind> kernels_;
};

struct SelectedHyperparams {
  KernelSpec::Kind kernel = KernelSpec::Kind::rbf;
  double c = 1.0;
  double gamma = 0.0;  // 0 when the kernel is linear
};

class MagModel {
 public:
  MagModel(SvmModel svm, std::size_t bin_count, SelectedHyperparams selected,
           double validation_bacc)
      : svm_(std::move(svm)),
        bin_count_(bin_count),
        selected_(selected),
        validation_bacc_(validation_bacc) {
    detail::require(svm_.dim() == bin_count_, ErrorKind::dimension_mismatch,
                    "MagModel: SVM dimension must equal the bin count");
    detail::require(validation_bacc_ >= 0.0 && validation_bacc_ <= 1.0,
                    ErrorKind::invalid_argument,
                    "MagModel: validation BACC must lie in [0,1]");
  }

  [[nodiscard]] const SvmModel& svm() const noexcept { return svm_; }
  [[nodiscard]] std::size_t bin_count() const noexcept { return bin_count_; }
  [[nodiscard]] const SelectedHyperparams& selected() const noexcept { return selected_; }
  [[nodiscard]] double validation_bacc() const noexcept { return validation_bacc_; }

 private:
  SvmModel svm_;
  std::size_t bin_count_;
  SelectedHyperparams selected_;
  double validation_bacc_;
};

namespace detail {

struct LabeledFeatures {
  std::vector<std::vector<double>> x;
  std::vector<int> y;  // MSIMUT -> +1, MSS -> -1
  std::vector<ClassLabel> truths;
};

inline LabeledFeatures featurize_labeled(const std::vector<PatientRecord>& records,
                                         std::size_t bin_count,
                                         const char* which_set) {
  LabeledFeatures out;
  out.x.reserve(records.size());
  out.y.reserve(records.size());
  for (const auto& record : records) {
    require(record.label().has_value(), ErrorKind::unlabeled_record,
            std::string("mag_train: unlabeled patient '") + record.patient_id() +
                "' in the " + which_set + " set");
    out.x.push_back(featurize(record, bin_count).bins());
    out.y.push_back(*record.label() == ClassLabel::MSIMUT ? 1 : -1);
    out.truths.push_back(*record.label());
  }
  return out;
}

}  // namespace detail

// Grid search over (kernel, C, gamma): one SVM per grid point, selection by
// highest validation BACC with ties broken by higher validation F1, then
// smaller C, then smaller gamma (linear counts as gamma 0), then linear
// before rbf. The winning model is returned as trained. A grid point whose
// solver fails to converge is skipped (reported through `warnings`); if all
// fail, AllCandidatesFailed. The seed parameter is part of the training
// contract but currently unused: the solver has no randomized state.
inline MagModel mag_train(const std::vector<PatientRecord>& train,
                          const std::vector<PatientRecord>& val,
                          const HyperGrid& grid, std::size_t bin_count,
                          std::uint64_t seed,
                          std::vector<std::string>* warnings = nullptr,
                          double smo_tol = 1e-3, std::size_t smo_max_passes = 200) {
  (void)seed;
  detail::require(!train.empty(), ErrorKind::empty_input,
                  "mag_train: training set must be non-empty");
  detail::require(!val.empty(), ErrorKind::empty_validation,
                  "mag_train: validation set must be non-empty");

  const auto train_data = detail::featurize_labeled(train, bin_count, "training");
  const auto val_data = detail::featurize_labeled(val, bin_count, "validation");

  const bool has_pos = std::count(train_data.y.begin(), train_data.y.end(), 1) > 0;
  const bool has_neg = std::count(train_data.y.begin(), train_data.y.end(), -1) > 0;
  detail::require(has_pos && has_neg, ErrorKind::single_class,
                  "mag_train: both classes must be present in the training set");

  struct Candidate {
    double bacc;
    double f1;
    SelectedHyperparams params;
    SvmModel model;
  };
  std::optional<Candidate> best;

  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.bacc != b.bacc) return a.bacc > b.bacc;
    if (a.f1 != b.f1) return a.f1 > b.f1;
    if (a.params.c != b.params.c) return a.params.c < b.params.c;
    if (a.params.gamma != b.params.gamma) return a.params.gamma < b.params.gamma;
    return a.params.kernel == KernelSpec::Kind::linear &&
           b.params.kernel != KernelSpec::Kind::linear;
  };

  auto evaluate = [&](const KernelSpec& spec, const SelectedHyperparams& params) {
    SvmModel model = smo_train(train_data.x, train_data.y, params.c, spec,
                               smo_tol, smo_max_passes);
    std::vector<ClassLabel> preds;
    preds.reserve(val_data.x.size());
    for (const auto& fx : val_data.x) {
      preds.push_back(decision(model, fx) >= 0.0 ? ClassLabel::MSIMUT
                                                 : ClassLabel::MSS);
    }
    const ConfusionMatrix cm = confusion(preds, val_data.truths);
    Candidate candidate{bacc(cm), f1(cm).value, params, std::move(model)};
    if (!best || better(candidate, *best)) best = std::move(candidate);
  };

  for (KernelSpec::Kind kind : grid.kernels()) {
    for (double c : grid.c_values()) {
      // For a linear kernel gamma is irrelevant, so each C maps to a single
      // candidate with gamma recorded as 0.
      std::vector<double> gammas =
          kind == KernelSpec::Kind::linear ? std::vector<double>{0.0}
                                           : grid.gamma_values();
      for (double gamma : gammas) {
        const KernelSpec spec = kind == KernelSpec::Kind::linear
                                    ? KernelSpec::linear()
                                    : KernelSpec::rbf(gamma);
        try {
          evaluate(spec, SelectedHyperparams{kind, c, gamma});
        } catch (const NonConvergenceError& err) {
          if (warnings != nullptr) {
            warnings->push_back(std::string("grid point (") + kernel_name(kind) +
                                ", c=" + std::to_string(c) +
                                ", gamma=" + std::to_string(gamma) +
                                ") skipped: " + err.what());
          }
        }
      }
    }
  }

  detail::require(best.has_value(), ErrorKind::all_candidates_failed,
                  "mag_train: every grid point failed to converge");
  return MagModel(std::move(best->model), bin_count, best->params, best->bacc);
}

// Featurizes the record with the model's bin count and applies the SVM;
// MSIMUT iff the decision value is >= 0.
inline std::pair<ClassLabel, double> mag_predict(const MagModel& model,
                                                 const PatientRecord& record) {
  const HistogramFeature feature = featurize(record, model.bin_count());
  const double value = decision(model.svm(), feature.bins());
  return {value >= 0.0 ? ClassLabel::MSIMUT : ClassLabel::MSS, value};
}

}  // namespace mag

#endif  // MAG_AGGREGATE_HPP
