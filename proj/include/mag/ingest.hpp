// CSV ingestion and patient splitting.
//
// File formats (UTF-8, '.' decimal point, LF or CRLF):
//   predictions: header exactly "patient_id,patch_id,prob"
//   labels:      header exactly "patient_id,label"
// Parse errors carry 1-based line numbers in their message.
//
// split_patients is stratified by class label: within each class, patient
// ids are sorted, shuffled by a seeded generator (mt19937_64 driving a
// Fisher-Yates pass, see rng.hpp) and allocated by the largest-remainder
// rule over (ratio x class size) with ties broken train > val > test.
// Classes are processed in the fixed order MSS, MSIMUT from one shared
// engine, so identical (records, ratios, seed) always reproduce the same
// assignment.

#ifndef MAG_INGEST_HPP
#define MAG_INGEST_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mag/domain.hpp"
#include "mag/rng.hpp"

namespace mag {

class SplitRatios {
 public:
  SplitRatios(double train, double val, double test)
      : train_(train), val_(val), test_(test) {
    const char* msg = "SplitRatios: each ratio must lie in (0,1) and sum to 1";
    for (double r : {train_, val_, test_}) {
      detail::require(r > 0.0 && r < 1.0, ErrorKind::invalid_argument, msg);
    }
    const double sum = train_ + val_ + test_;
    detail::require(sum > 1.0 - 1e-9 && sum < 1.0 + 1e-9,
                    ErrorKind::invalid_argument, msg);
  }

  [[nodiscard]] double train() const noexcept { return train_; }
  [[nodiscard]] double val() const noexcept { return val_; }
  [[nodiscard]] double test() const noexcept { return test_; }

 private:
  double train_;
  double val_;
  double test_;
};

namespace detail {

inline std::string line_msg(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

// Splits on ',' with no quoting; the ids in this domain never contain commas.
inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

inline bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

inline double parse_prob_field(std::string_view text, std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  require(ec == std::errc() && ptr == last, ErrorKind::malformed_row,
          line_msg(line, "unparsable probability '" + std::string(text) + "'"));
  require(valid_prob(value), ErrorKind::out_of_range_prob,
          line_msg(line, "probability " + std::string(text) + " outside [0,1]"));
  return value;
}

}  // namespace detail

inline std::vector<PatchPrediction> parse_predictions(std::istream& source) {
  std::string line;
  detail::require(detail::read_line(source, line), ErrorKind::malformed_row,
                  "line 1: missing header 'patient_id,patch_id,prob'");
  detail::require(line == "patient_id,patch_id,prob", ErrorKind::malformed_row,
                  "line 1: header must be exactly 'patient_id,patch_id,prob'");

  std::vector<PatchPrediction> predictions;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (detail::read_line(source, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    detail::require(fields.size() == 3, ErrorKind::malformed_row,
                    detail::line_msg(line_no, "expected 3 columns, got " +
                                                  std::to_string(fields.size())));
    detail::require(!fields[0].empty() && !fields[1].empty(),
                    ErrorKind::malformed_row,
                    detail::line_msg(line_no, "empty patient_id or patch_id"));
    const double prob = detail::parse_prob_field(fields[2], line_no);
    std::string key = std::string(fields[0]) + '\x1f' + std::string(fields[1]);
    detail::require(seen.insert(std::move(key)).second, ErrorKind::duplicate_patch,
                    detail::line_msg(line_no, "duplicate patch (" +
                                                  std::string(fields[0]) + ", " +
                                                  std::string(fields[1]) + ")"));
    predictions.emplace_back(std::string(fields[0]), std::string(fields[1]), prob);
  }
  return predictions;
}

inline std::map<std::string, ClassLabel> parse_labels(std::istream& source) {
  std::string line;
  detail::require(detail::read_line(source, line), ErrorKind::malformed_row,
                  "line 1: missing header 'patient_id,label'");
  detail::require(line == "patient_id,label", ErrorKind::malformed_row,
                  "line 1: header must be exactly 'patient_id,label'");

  std::map<std::string, ClassLabel> labels;
  std::size_t line_no = 1;
  while (detail::read_line(source, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    detail::require(fields.size() == 2, ErrorKind::malformed_row,
                    detail::line_msg(line_no, "expected 2 columns, got " +
                                                  std::to_string(fields.size())));
    detail::require(!fields[0].empty(), ErrorKind::malformed_row,
                    detail::line_msg(line_no, "empty patient_id"));
    const auto label = parse_label(fields[1]);
    detail::require(label.has_value(), ErrorKind::unknown_label,
                    detail::line_msg(line_no, "unknown label '" +
                                                  std::string(fields[1]) +
                                                  "' (expected MSS or MSIMUT)"));
    const bool inserted =
        labels.emplace(std::string(fields[0]), *label).second;
    detail::require(inserted, ErrorKind::duplicate_patient,
                    detail::line_msg(line_no, "duplicate patient '" +
                                                  std::string(fields[0]) + "'"));
  }
  return labels;
}

// Groups predictions per patient (probs kept in file order, records sorted by
// patient_id). strict = true turns a missing label into an error instead of
// an unlabeled record.
inline std::vector<PatientRecord> group_by_patient(
    const std::vector<PatchPrediction>& preds,
    const std::map<std::string, ClassLabel>& labels, bool strict = false) {
  std::map<std::string, std::vector<double>> grouped;
  for (const auto& pred : preds) {
    grouped[pred.patient_id()].push_back(pred.prob());
  }
  std::vector<PatientRecord> records;
  records.reserve(grouped.size());
  for (auto& [patient_id, probs] : grouped) {
    const auto it = labels.find(patient_id);
    std::optional<ClassLabel> label;
    if (it != labels.end()) {
      label = it->second;
    } else {
      detail::require(!strict, ErrorKind::missing_label,
                      "patient '" + patient_id + "' has predictions but no label");
    }
    records.emplace_back(patient_id, label, std::move(probs));
  }
  return records;
}

namespace detail {

// Largest-remainder allocation of m slots to the three ratios; ties go to
// the earlier split in (train, val, test) order.
inline std::array<std::size_t, 3> largest_remainder_counts(
    std::size_t m, const SplitRatios& ratios) {
  const std::array<double, 3> targets = {ratios.train() * static_cast<double>(m),
                                         ratios.val() * static_cast<double>(m),
                                         ratios.test() * static_cast<double>(m)};
  std::array<std::size_t, 3> counts{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    counts[k] = static_cast<std::size_t>(targets[k]);
    assigned += counts[k];
  }
  std::size_t leftover = m - assigned;
  std::array<std::size_t, 3> order = {0, 1, 2};
  // Stable ordering by descending remainder keeps the train > val > test
  // tie-break.
  for (std::size_t a = 0; a < 3 && leftover > 0; ++a) {
    std::size_t best = a;
    for (std::size_t b = a + 1; b < 3; ++b) {
      const double ra = targets[order[best]] - static_cast<double>(counts[order[best]]);
      const double rb = targets[order[b]] - static_cast<double>(counts[order[b]]);
      if (rb > ra) best = b;
    }
    std::swap(order[a], order[best]);
  }
  for (std::size_t a = 0; a < leftover; ++a) ++counts[order[a]];
  return counts;
}

}  // namespace detail

inline SplitAssignment split_patients(const std::vector<PatientRecord>& records,
                                      const SplitRatios& ratios,
                                      std::uint64_t seed) {
  std::map<ClassLabel, std::vector<std::string>> by_class;
  std::unordered_set<std::string> ids;
  for (const auto& record : records) {
    detail::require(record.label().has_value(), ErrorKind::unlabeled_record,
                    "split_patients: patient '" + record.patient_id() +
                        "' is unlabeled");
    detail::require(ids.insert(record.patient_id()).second,
                    ErrorKind::invalid_argument,
                    "split_patients: duplicate patient '" + record.patient_id() +
                        "'");
    by_class[*record.label()].push_back(record.patient_id());
  }
  for (ClassLabel label : {ClassLabel::MSS, ClassLabel::MSIMUT}) {
    detail::require(by_class.count(label) > 0, ErrorKind::empty_class,
                    std::string("split_patients: no patients with label ") +
                        label_name(label));
  }

  Rng rng(seed);
  std::set<std::string> train;
  std::set<std::string> val;
  std::set<std::string> test;
  for (ClassLabel label : {ClassLabel::MSS, ClassLabel::MSIMUT}) {
    auto& members = by_class[label];
    std::sort(members.begin(), members.end());
    rng.shuffle(members);
    const auto counts = detail::largest_remainder_counts(members.size(), ratios);
    std::size_t index = 0;
    for (std::size_t k = 0; k < counts[0]; ++k) train.insert(members[index++]);
    for (std::size_t k = 0; k < counts[1]; ++k) val.insert(members[index++]);
    for (std::size_t k = 0; k < counts[2]; ++k) test.insert(members[index++]);
  }
  return SplitAssignment(std::move(train), std::move(val), std::move(test));
}

}  // namespace mag

#endif  // MAG_INGEST_HPP
