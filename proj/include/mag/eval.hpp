// Per-method evaluation over a labeled test cohort: counting, averaging and
// the histogram+SVM method side by side, each with F1, BACC and a confusion
// matrix.

#ifndef MAG_EVAL_HPP
#define MAG_EVAL_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mag/aggregate.hpp"
#include "mag/domain.hpp"
#include "mag/metrics.hpp"

namespace mag {

struct MethodResult {
  double f1 = 0.0;
  bool f1_degenerate = false;
  double bacc = 0.0;
  ConfusionMatrix confusion;
};

struct EvalReport {
  // Keys: "counting", "averaging", "mag"; all computed over the identical
  // patient set.
  std::map<std::string, MethodResult> per_method;
  std::size_t cohort_size = 0;
  std::size_t positive_count = 0;
};

inline EvalReport compare(const std::vector<PatientRecord>& test,
                          const MagModel& model, double patch_threshold = 0.5,
                          double patient_threshold = 0.5) {
  detail::require(!test.empty(), ErrorKind::empty_input,
                  "compare: test set must be non-empty");

  std::vector<ClassLabel> truths;
  std::vector<ClassLabel> counting_preds;
  std::vector<ClassLabel> averaging_preds;
  std::vector<ClassLabel> mag_preds;
  truths.reserve(test.size());
  for (const auto& record : test) {
    detail::require(record.label().has_value(), ErrorKind::unlabeled_record,
                    "compare: unlabeled patient '" + record.patient_id() + "'");
    truths.push_back(*record.label());
    counting_preds.push_back(threshold_decide(
        counting_score(record.probs(), patch_threshold), patient_threshold));
    averaging_preds.push_back(threshold_decide(averaging_score(record.probs()),
                                               patient_threshold));
    mag_preds.push_back(mag_predict(model, record).first);
  }

  std::size_t positives = 0;
  for (ClassLabel t : truths) {
    if (t == ClassLabel::MSIMUT) ++positives;
  }
  detail::require(positives > 0 && positives < truths.size(),
                  ErrorKind::missing_class,
                  "compare: both classes must be present in the test set");

  EvalReport report;
  report.cohort_size = test.size();
  report.positive_count = positives;
  const auto add = [&](const std::string& name,
                       const std::vector<ClassLabel>& preds) {
    const ConfusionMatrix cm = confusion(preds, truths);
    const F1Result f = f1(cm);
    report.per_method[name] = MethodResult{f.value, f.degenerate, bacc(cm), cm};
  };
  add("counting", counting_preds);
  add("averaging", averaging_preds);
  add("mag", mag_preds);
  return report;
}

}  // namespace mag

#endif  // MAG_EVAL_HPP
