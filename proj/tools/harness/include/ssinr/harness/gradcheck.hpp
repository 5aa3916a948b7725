#pragma once

#include <string>
#include <vector>

#include "ssinr/backbones.hpp"

namespace ssinr::harness {

inline constexpr double kGradcheckTolerance = 1e-4;

struct GradcheckRow {
  BackboneKind backbone;
  std::string input_transform;
  std::string output_transform;
  double max_relative_error = 0.0;
  bool pass = false;

  std::string label() const;
};

// Analytic gradients of the full pipeline loss against central differences
// (double precision, h = 1e-5) for every backbone × input × output transform
// class on a 2→8→8→1 model with 32 random coordinates. `options` injects a
// faulty derivative; `step` overrides h.
std::vector<GradcheckRow> run_gradcheck(const BackwardOptions& options = {},
                                        double tolerance = kGradcheckTolerance,
                                        double step = kFiniteDiffStep);

}  // namespace ssinr::harness
