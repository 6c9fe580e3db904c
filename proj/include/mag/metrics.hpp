// Confusion matrices, F1 and balanced accuracy, MSIMUT positive throughout.

#ifndef MAG_METRICS_HPP
#define MAG_METRICS_HPP

#include <cstddef>
#include <vector>

#include "mag/domain.hpp"

namespace mag {

inline ConfusionMatrix confusion(const std::vector<ClassLabel>& preds,
                                 const std::vector<ClassLabel>& truths) {
  detail::require(preds.size() == truths.size(), ErrorKind::length_mismatch,
                  "confusion: preds and truths must have equal length");
  detail::require(!preds.empty(), ErrorKind::empty_input,
                  "confusion: inputs must be non-empty");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool pred_pos = preds[i] == ClassLabel::MSIMUT;
    const bool true_pos = truths[i] == ClassLabel::MSIMUT;
    if (pred_pos && true_pos) ++cm.tp;
    else if (pred_pos && !true_pos) ++cm.fp;
    else if (!pred_pos && true_pos) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

// 2*tp / (2*tp + fp + fn). A cohort with no positives anywhere (zero
// denominator) yields 0 with the degenerate flag set instead of an error.
struct F1Result {
  double value = 0.0;
  bool degenerate = false;
};

inline F1Result f1(const ConfusionMatrix& cm) {
  const std::size_t denom = 2 * cm.tp + cm.fp + cm.fn;
  if (denom == 0) return {0.0, true};
  return {2.0 * static_cast<double>(cm.tp) / static_cast<double>(denom), false};
}

// (sensitivity + specificity) / 2; both truth classes must be present.
inline double bacc(const ConfusionMatrix& cm) {
  detail::require(cm.tp + cm.fn >= 1, ErrorKind::missing_class,
                  "bacc: no MSIMUT patients in the truth");
  detail::require(cm.tn + cm.fp >= 1, ErrorKind::missing_class,
                  "bacc: no MSS patients in the truth");
  const double sens = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  const double spec = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
  return (sens + spec) / 2.0;
}

}  // namespace mag

#endif  // MAG_METRICS_HPP
