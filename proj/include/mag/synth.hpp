// Seeded synthetic cohorts: per-class Beta-distributed patch probabilities
// with patch counts drawn uniformly from a range. One generator stream per
// cohort (MSIMUT patients first, then MSS), so a spec with the same seed
// reproduces the same cohort.

#ifndef MAG_SYNTH_HPP
#define MAG_SYNTH_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "mag/domain.hpp"
#include "mag/rng.hpp"

namespace mag {

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

class CohortSpec {
 public:
  CohortSpec(std::size_t n_msi, std::size_t n_mss, std::size_t patches_min,
             std::size_t patches_max, BetaParams msi_dist, BetaParams mss_dist,
             std::uint64_t seed)
      : n_msi_(n_msi),
        n_mss_(n_mss),
        patches_min_(patches_min),
        patches_max_(patches_max),
        msi_dist_(msi_dist),
        mss_dist_(mss_dist),
        seed_(seed) {
    detail::require(n_msi_ > 0 && n_mss_ > 0, ErrorKind::invalid_spec,
                    "CohortSpec: both class counts must be positive");
    detail::require(patches_min_ > 0 && patches_min_ <= patches_max_,
                    ErrorKind::invalid_spec,
                    "CohortSpec: need 0 < patches_min <= patches_max");
    for (double v : {msi_dist_.alpha, msi_dist_.beta, mss_dist_.alpha,
                     mss_dist_.beta}) {
      detail::require(v > 0.0, ErrorKind::invalid_spec,
                      "CohortSpec: Beta parameters must be positive");
    }
  }

  [[nodiscard]] std::size_t n_msi() const noexcept { return n_msi_; }
  [[nodiscard]] std::size_t n_mss() const noexcept { return n_mss_; }
  [[nodiscard]] std::size_t patches_min() const noexcept { return patches_min_; }
  [[nodiscard]] std::size_t patches_max() const noexcept { return patches_max_; }
  [[nodiscard]] const BetaParams& msi_dist() const noexcept { return msi_dist_; }
  [[nodiscard]] const BetaParams& mss_dist() const noexcept { return mss_dist_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t n_msi_;
  std::size_t n_mss_;
  std::size_t patches_min_;
  std::size_t patches_max_;
  BetaParams msi_dist_;
  BetaParams mss_dist_;
  std::uint64_t seed_;
};

namespace detail {

inline std::string synth_patient_id(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04zu", prefix, index);
  return buf;
}

}  // namespace detail

inline std::vector<PatientRecord> generate_cohort(const CohortSpec& spec) {
  Rng rng(spec.seed());
  std::vector<PatientRecord> records;
  records.reserve(spec.n_msi() + spec.n_mss());
  const std::size_t span = spec.patches_max() - spec.patches_min() + 1;

  const auto emit = [&](const char* prefix, ClassLabel label, std::size_t count,
                        const BetaParams& dist) {
    for (std::size_t p = 1; p <= count; ++p) {
      const std::size_t n_patches =
          spec.patches_min() + static_cast<std::size_t>(rng.uniform_below(span));
      std::vector<double> probs;
      probs.reserve(n_patches);
      for (std::size_t k = 0; k < n_patches; ++k) {
        probs.push_back(rng.beta(dist.alpha, dist.beta));
      }
      records.emplace_back(detail::synth_patient_id(prefix, p), label,
                           std::move(probs));
    }
  };
  emit("msi", ClassLabel::MSIMUT, spec.n_msi(), spec.msi_dist());
  emit("mss", ClassLabel::MSS, spec.n_mss(), spec.mss_dist());
  return records;
}

// Both classes share the patch-probability mean 0.5, so averaging and
// counting carry no signal while the histogram shape does: MSIMUT patches
// are bimodal Beta(0.5, 0.5), MSS patches unimodal Beta(5, 5).
inline CohortSpec equal_mean_scenario(std::uint64_t seed) {
  return CohortSpec(60, 60, 100, 300, BetaParams{0.5, 0.5}, BetaParams{5.0, 5.0},
                    seed);
}

// Extreme Betas concentrate MSIMUT patches near 1 and MSS patches near 0;
// the classes are separable for every aggregation method.
inline CohortSpec separable_scenario(std::uint64_t seed) {
  return CohortSpec(40, 40, 30, 60, BetaParams{99.0, 1.0}, BetaParams{1.0, 99.0},
                    seed);
}

}  // namespace mag

#endif  // MAG_SYNTH_HPP
