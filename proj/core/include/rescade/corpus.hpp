#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rescade/grid.hpp"

namespace rescade {

// A named target with the metadata the studies need. The oracle must be
// deterministic; smoothness order m and the Lipschitz constant are declared
// metadata (they feed reports and bounds, they are never inferred).
struct TargetFunction {
  std::string name;
  int dims = 1;
  Oracle oracle;
  int smoothness = 1;                  // declared order m
  std::optional<double> lipschitz;     // analytic constant, if known
  bool sobolev_scaled = false;         // sup of f and derivatives up to m <= 1
};

// Built-in corpus. Every entry has sup |f| <= 1 on [-1,1]^n and an analytic
// Lipschitz constant.
const std::vector<TargetFunction>& builtin_corpus();

// Lookup by name; throws InvalidArgumentError with the list of known names.
const TargetFunction& find_function(const std::string& name);

// Default measurement resolution per dimension count: 1025 (1D), 129 (2D),
// 33 (3D), 9 beyond.
int default_grid_points(int dims);

Grid default_grid(const TargetFunction& f);

}  // namespace rescade
