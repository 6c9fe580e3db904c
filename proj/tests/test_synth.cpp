#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "mag/features.hpp"
#include "mag/rng.hpp"
#include "mag/synth.hpp"
#include "support/testutil.hpp"

using mag::ClassLabel;
using mag::ErrorKind;
using testutil::error_kind;

TEST_CASE("uniform01 stays in [0,1) and fills bins", "[rng]") {
  mag::Rng rng(1);
  std::vector<std::size_t> hits(10, 0);
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    ++hits[static_cast<std::size_t>(u * 10.0)];
  }
  for (std::size_t h : hits) CHECK(h > 1500);
}

TEST_CASE("uniform_below covers its range", "[rng]") {
  mag::Rng rng(2);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.uniform_below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK(rng.uniform_below(1) == 0);
  CHECK(error_kind([&] { rng.uniform_below(0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("shuffle produces a permutation", "[rng]") {
  mag::Rng rng(3);
  std::vector<int> items(50);
  std::iota(items.begin(), items.end(), 0);
  auto shuffled = items;
  rng.shuffle(shuffled);
  CHECK(shuffled != items);  // 50! permutations; identity is astronomically unlikely
  auto sorted = shuffled;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == items);
}

TEST_CASE("beta draws match their analytic means", "[rng]") {
  // pooled draws per parameter pair, LLN tolerance 0.01
  const struct {
    double a, b;
  } params[] = {{0.5, 0.5}, {5.0, 5.0}, {2.0, 8.0}, {99.0, 1.0}};
  for (const auto& p : params) {
    mag::Rng rng(11);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double x = rng.beta(p.a, p.b);
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
      sum += x;
    }
    CHECK(std::abs(sum / n - p.a / (p.a + p.b)) <= 0.01);
  }
}

TEST_CASE("gamma rejects non-positive shapes", "[rng]") {
  mag::Rng rng(4);
  CHECK(error_kind([&] { rng.gamma(0.0); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([&] { rng.gamma(-1.0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("cohort specs validate", "[synth]") {
  CHECK(error_kind([] {
          mag::CohortSpec(0, 5, 10, 20, {1, 1}, {1, 1}, 1);
        }) == ErrorKind::invalid_spec);
  CHECK(error_kind([] {
          mag::CohortSpec(5, 5, 20, 10, {1, 1}, {1, 1}, 1);
        }) == ErrorKind::invalid_spec);
  CHECK(error_kind([] {
          mag::CohortSpec(5, 5, 10, 20, {0, 1}, {1, 1}, 1);
        }) == ErrorKind::invalid_spec);
}

TEST_CASE("cohorts are deterministic in their spec", "[synth]") {
  const auto spec = mag::CohortSpec(6, 7, 5, 30, {0.5, 0.5}, {5, 5}, 123);
  const auto a = mag::generate_cohort(spec);
  const auto b = mag::generate_cohort(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].patient_id() == b[i].patient_id());
    CHECK(a[i].label() == b[i].label());
    CHECK(testutil::bitwise_equal(a[i].probs(), b[i].probs()));
  }

  const auto c = mag::generate_cohort(
      mag::CohortSpec(6, 7, 5, 30, {0.5, 0.5}, {5, 5}, 124));
  CHECK_FALSE(testutil::bitwise_equal(a[0].probs(), c[0].probs()));
}

TEST_CASE("cohorts respect counts, ranges and label prefixes", "[synth]") {
  const auto records = mag::generate_cohort(
      mag::CohortSpec(4, 9, 3, 11, {2, 2}, {3, 1}, 9));
  REQUIRE(records.size() == 13);
  std::size_t msi = 0;
  for (const auto& r : records) {
    REQUIRE(r.label().has_value());
    if (*r.label() == ClassLabel::MSIMUT) {
      ++msi;
      CHECK(r.patient_id().rfind("msi_", 0) == 0);
    } else {
      CHECK(r.patient_id().rfind("mss_", 0) == 0);
    }
    CHECK(r.patch_count() >= 3);
    CHECK(r.patch_count() <= 11);
    for (double p : r.probs()) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
  CHECK(msi == 4);
}

TEST_CASE("uniform patches flatten per-patient histograms", "[synth]") {
  // Beta(1,1) is uniform; with >= 500 patches every bin sits within 0.1 of
  // 0.1 (frozen seed; the worst deviation observed is ~0.034).
  const auto records = mag::generate_cohort(
      mag::CohortSpec(5, 5, 500, 800, {1.0, 1.0}, {1.0, 1.0}, 7));
  for (const auto& r : records) {
    const auto h = mag::featurize(r, 10);
    for (double b : h.bins()) CHECK(std::abs(b - 0.1) <= 0.1);
  }
}

TEST_CASE("equal-mean scenario pins the documented preset", "[synth]") {
  const auto spec = mag::equal_mean_scenario(42);
  CHECK(spec.n_msi() == 60);
  CHECK(spec.n_mss() == 60);
  CHECK(spec.patches_min() == 100);
  CHECK(spec.patches_max() == 300);
  CHECK(spec.msi_dist().alpha == 0.5);
  CHECK(spec.msi_dist().beta == 0.5);
  CHECK(spec.mss_dist().alpha == 5.0);
  CHECK(spec.mss_dist().beta == 5.0);
  CHECK(spec.seed() == 42);

  // both classes share the patch mean 0.5
  const auto records = mag::generate_cohort(spec);
  double msi_sum = 0.0;
  double mss_sum = 0.0;
  std::size_t msi_n = 0;
  std::size_t mss_n = 0;
  for (const auto& r : records) {
    for (double p : r.probs()) {
      if (*r.label() == ClassLabel::MSIMUT) {
        msi_sum += p;
        ++msi_n;
      } else {
        mss_sum += p;
        ++mss_n;
      }
    }
  }
  CHECK(std::abs(msi_sum / static_cast<double>(msi_n) - 0.5) <= 0.02);
  CHECK(std::abs(mss_sum / static_cast<double>(mss_n) - 0.5) <= 0.02);
}

TEST_CASE("separable scenario concentrates the classes", "[synth]") {
  const auto records = mag::generate_cohort(mag::separable_scenario(7));
  for (const auto& r : records) {
    for (double p : r.probs()) {
      if (*r.label() == ClassLabel::MSIMUT) {
        CHECK(p >= 0.5);
      } else {
        CHECK(p < 0.5);
      }
    }
  }
}
