// CSV writers for the file formats consumed by ingest.hpp, plus the
// featurized-cohort export. Probabilities in prediction files use shortest
// round-trip formatting; feature bins are printed with 9 significant digits.

#ifndef MAG_CSV_EXPORT_HPP
#define MAG_CSV_EXPORT_HPP

#include <charconv>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "mag/domain.hpp"
#include "mag/features.hpp"

namespace mag {
namespace detail {

inline std::string format_shortest(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string format_sig9(double value) {
  char buf[32];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

inline std::string synth_patch_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "p%04zu", index);
  return buf;
}

}  // namespace detail

inline void write_predictions_csv(std::ostream& out,
                                  const std::vector<PatientRecord>& records) {
  out << "patient_id,patch_id,prob\n";
  for (const auto& record : records) {
    for (std::size_t k = 0; k < record.probs().size(); ++k) {
      out << record.patient_id() << ',' << detail::synth_patch_id(k + 1) << ','
          << detail::format_shortest(record.probs()[k]) << '\n';
    }
  }
}

inline void write_labels_csv(std::ostream& out,
                             const std::vector<PatientRecord>& records) {
  out << "patient_id,label\n";
  for (const auto& record : records) {
    if (record.label().has_value()) {
      out << record.patient_id() << ',' << label_name(*record.label()) << '\n';
    }
  }
}

// Header: patient_id,label,b0,...,b{B-1}; the label cell is empty for
// unlabeled records.
inline void write_features_csv(std::ostream& out,
                               const std::vector<PatientRecord>& records,
                               std::size_t bin_count) {
  out << "patient_id,label";
  for (std::size_t k = 0; k < bin_count; ++k) out << ",b" << k;
  out << '\n';
  for (const auto& record : records) {
    out << record.patient_id() << ',';
    if (record.label().has_value()) out << label_name(*record.label());
    const HistogramFeature feature = featurize(record, bin_count);
    for (double bin : feature.bins()) {
      out << ',' << detail::format_sig9(bin);
    }
    out << '\n';
  }
}

}  // namespace mag

#endif  // MAG_CSV_EXPORT_HPP
