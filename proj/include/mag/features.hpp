// Histogram featurization: a patient's patch probabilities become a B-bin
// count vector (exact integer arithmetic) that is normalized by the patch
// count into the patient's feature array.
//
// Bin k covers [k/B, (k+1)/B) for k < B-1; the last bin is closed at 1.0, so
// every legal probability lands in a bin and a 0.5 score falls in the upper
// half at B = 10 (bin index min(floor(p*B), B-1)).

#ifndef MAG_FEATURES_HPP
#define MAG_FEATURES_HPP

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "mag/domain.hpp"

namespace mag {

inline std::vector<std::int64_t> raw_histogram(std::span<const double> probs,
                                               std::size_t bin_count) {
  detail::require(bin_count >= 2, ErrorKind::invalid_argument,
                  "raw_histogram: bin_count must be at least 2");
  detail::require(!probs.empty(), ErrorKind::empty_input,
                  "raw_histogram: probs must be non-empty");
  std::vector<std::int64_t> counts(bin_count, 0);
  for (double p : probs) {
    detail::require(detail::valid_prob(p), ErrorKind::out_of_range_prob,
                    "raw_histogram: every prob must lie in [0,1]");
    auto k = static_cast<std::size_t>(p * static_cast<double>(bin_count));
    if (k >= bin_count) k = bin_count - 1;
    ++counts[k];
  }
  return counts;
}

inline HistogramFeature normalize_histogram(const std::vector<std::int64_t>& raw,
                                            std::int64_t n) {
  detail::require(n > 0, ErrorKind::zero_patches,
                  "normalize_histogram: patch count must be positive");
  const std::int64_t sum = std::accumulate(raw.begin(), raw.end(), std::int64_t{0});
  detail::require(sum == n, ErrorKind::invalid_argument,
                  "normalize_histogram: n does not match the histogram sum");
  std::vector<double> bins(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    bins[k] = static_cast<double>(raw[k]) / static_cast<double>(n);
  }
  return HistogramFeature(std::move(bins));
}

inline HistogramFeature featurize(std::span<const double> probs,
                                  std::size_t bin_count) {
  return normalize_histogram(raw_histogram(probs, bin_count),
                             static_cast<std::int64_t>(probs.size()));
}

inline HistogramFeature featurize(const PatientRecord& record,
                                  std::size_t bin_count) {
  return featurize(std::span<const double>(record.probs()), bin_count);
}

}  // namespace mag

#endif  // MAG_FEATURES_HPP
