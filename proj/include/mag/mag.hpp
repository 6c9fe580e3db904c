// Umbrella header.

#ifndef MAG_MAG_HPP
#define MAG_MAG_HPP

#include "mag/aggregate.hpp"
#include "mag/csv_export.hpp"
#include "mag/domain.hpp"
#include "mag/eval.hpp"
#include "mag/features.hpp"
#include "mag/ingest.hpp"
#include "mag/metrics.hpp"
#include "mag/model_io.hpp"
#include "mag/report_io.hpp"
#include "mag/rng.hpp"
#include "mag/svm.hpp"
#include "mag/synth.hpp"

#endif  // MAG_MAG_HPP
