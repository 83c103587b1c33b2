#pragma once

#include <vector>

#include "rescade/cascade.hpp"
#include "rescade/corpus.hpp"
#include "rescade/layernet.hpp"
#include "rescade/report.hpp"
#include "rescade/shallow.hpp"

namespace rescade {

struct StudyOptions {
  int grid_points = 0;  // 0 = per-dimension default
  FitConfig fit;
  double tau = kDefaultSingularFloor;  // hilbert_k studies only
  // Wall-clock times are not deterministic, so they are only written into
  // rows on request; default runs keep runtime_ms = 0 and stay byte-stable
  // across reruns.
  bool record_timings = false;
};

// Error against width, one warm-started fit per entry (widths strictly
// increasing): the best previous net, zero-padded, seeds each next fit and
// competes with the fresh restarts, so the reported errors never increase.
// Row i runs with seed fit.rng_seed + i; rows whose training faults are
// recorded in failed_axis_values and skipped.
RateReport rate_study_shallow(const TargetFunction& f,
                              const std::vector<int>& widths,
                              const StudyOptions& opt);

// Error against depth from a single residual-cascade run: row l is the
// measured error of the depth-l prefix.
RateReport depth_study(const TargetFunction& f, int max_depth, int width,
                       FeatureMode mode, const StudyOptions& opt);

// Error against the curve level k for reduced-input training; also records
// the projection/reduced split per row. Row i runs with seed
// fit.rng_seed + i.
RateReport hilbert_k_study(const TargetFunction& f, int width,
                           const std::vector<int>& levels, int depth,
                           const StudyOptions& opt);

}  // namespace rescade
