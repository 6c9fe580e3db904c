// Core value types shared by every other header: class labels, patch
// predictions, patient records, histogram features, split assignments and
// confusion matrices. All types validate their invariants at construction
// and are immutable afterwards, so an instance that exists is a valid one.

#ifndef MAG_DOMAIN_HPP
#define MAG_DOMAIN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mag {

enum class ErrorKind {
  invalid_argument,
  malformed_row,
  out_of_range_prob,
  duplicate_patch,
  unknown_label,
  duplicate_patient,
  missing_label,
  unlabeled_record,
  empty_class,
  empty_input,
  zero_patches,
  dimension_mismatch,
  single_class,
  non_convergence,
  empty_validation,
  all_candidates_failed,
  length_mismatch,
  missing_class,
  invalid_spec,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// MSIMUT is the positive class everywhere (metrics, SVM labels, thresholds).
enum class ClassLabel { MSS, MSIMUT };

inline const char* label_name(ClassLabel label) {
  return label == ClassLabel::MSIMUT ? "MSIMUT" : "MSS";
}

// Case-insensitive: the public datasets use inconsistent folder-name casing.
inline std::optional<ClassLabel> parse_label(std::string_view text) {
  std::string folded;
  folded.reserve(text.size());
  for (char ch : text) {
    folded.push_back(static_cast<char>(
        ch >= 'a' && ch <= 'z' ? ch - ('a' - 'A') : ch));
  }
  if (folded == "MSS") return ClassLabel::MSS;
  if (folded == "MSIMUT") return ClassLabel::MSIMUT;
  return std::nullopt;
}

namespace detail {

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

inline bool valid_prob(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace detail

// One patch's MSI probability. prob values of exactly 0 and 1 are legal
// (saturated softmax outputs occur in practice).
class PatchPrediction {
 public:
  PatchPrediction(std::string patient_id, std::string patch_id, double prob)
      : patient_id_(std::move(patient_id)),
        patch_id_(std::move(patch_id)),
        prob_(prob) {
    detail::require(!patient_id_.empty(), ErrorKind::invalid_argument,
                    "PatchPrediction: patient_id must be non-empty");
    detail::require(!patch_id_.empty(), ErrorKind::invalid_argument,
                    "PatchPrediction: patch_id must be non-empty");
    detail::require(detail::valid_prob(prob_), ErrorKind::out_of_range_prob,
                    "PatchPrediction: prob must lie in [0,1]");
  }

  [[nodiscard]] const std::string& patient_id() const noexcept { return patient_id_; }
  [[nodiscard]] const std::string& patch_id() const noexcept { return patch_id_; }
  [[nodiscard]] double prob() const noexcept { return prob_; }

 private:
  std::string patient_id_;
  std::string patch_id_;
  double prob_;
};

// A patient's label (optional for unlabeled inference) and the ordered list
// of its patch probabilities (N_i = probs().size() >= 1).
class PatientRecord {
 public:
  PatientRecord(std::string patient_id, std::optional<ClassLabel> label,
                std::vector<double> probs)
      : patient_id_(std::move(patient_id)),
        label_(label),
        probs_(std::move(probs)) {
    detail::require(!patient_id_.empty(), ErrorKind::invalid_argument,
                    "PatientRecord: patient_id must be non-empty");
    detail::require(!probs_.empty(), ErrorKind::invalid_argument,
                    "PatientRecord: probs must be non-empty");
    for (double p : probs_) {
      detail::require(detail::valid_prob(p), ErrorKind::out_of_range_prob,
                      "PatientRecord: every prob must lie in [0,1]");
    }
  }

  [[nodiscard]] const std::string& patient_id() const noexcept { return patient_id_; }
  [[nodiscard]] const std::optional<ClassLabel>& label() const noexcept { return label_; }
  [[nodiscard]] const std::vector<double>& probs() const noexcept { return probs_; }
  [[nodiscard]] std::size_t patch_count() const noexcept { return probs_.size(); }

 private:
  std::string patient_id_;
  std::optional<ClassLabel> label_;
  std::vector<double> probs_;
};

// Normalized B-bin distribution of a patient's patch scores. Entries are
// non-negative and sum to 1 within 1e-9.
class HistogramFeature {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit HistogramFeature(std::vector<double> bins) : bins_(std::move(bins)) {
    detail::require(bins_.size() >= 2, ErrorKind::invalid_argument,
                    "HistogramFeature: needs at least 2 bins");
    double sum = 0.0;
    for (double b : bins_) {
      detail::require(b >= 0.0, ErrorKind::invalid_argument,
                      "HistogramFeature: entries must be non-negative");
      sum += b;
    }
    detail::require(sum > 1.0 - kSumTolerance && sum < 1.0 + kSumTolerance,
                    ErrorKind::invalid_argument,
                    "HistogramFeature: entries must sum to 1 within 1e-9");
  }

  [[nodiscard]] const std::vector<double>& bins() const noexcept { return bins_; }
  [[nodiscard]] std::size_t bin_count() const noexcept { return bins_.size(); }

  friend bool operator==(const HistogramFeature& a, const HistogramFeature& b) {
    return a.bins_ == b.bins_;
  }

 private:
  std::vector<double> bins_;
};

// Patient-id partition into train/val/test. Sets are pairwise disjoint; the
// union is checked against the input patient set by the split routine.
class SplitAssignment {
 public:
  SplitAssignment(std::set<std::string> train, std::set<std::string> val,
                  std::set<std::string> test)
      : train_(std::move(train)), val_(std::move(val)), test_(std::move(test)) {
    for (const auto& id : train_) {
      detail::require(!val_.count(id) && !test_.count(id),
                      ErrorKind::invalid_argument,
                      "SplitAssignment: splits must be pairwise disjoint");
    }
    for (const auto& id : val_) {
      detail::require(!test_.count(id), ErrorKind::invalid_argument,
                      "SplitAssignment: splits must be pairwise disjoint");
    }
  }

  [[nodiscard]] const std::set<std::string>& train() const noexcept { return train_; }
  [[nodiscard]] const std::set<std::string>& val() const noexcept { return val_; }
  [[nodiscard]] const std::set<std::string>& test() const noexcept { return test_; }
  [[nodiscard]] std::size_t total() const noexcept {
    return train_.size() + val_.size() + test_.size();
  }

 private:
  std::set<std::string> train_;
  std::set<std::string> val_;
  std::set<std::string> test_;
};

// Counts with MSIMUT as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  [[nodiscard]] std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

}  // namespace mag

#endif  // MAG_DOMAIN_HPP
