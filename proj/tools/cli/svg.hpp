#pragma once

#include <string>
#include <vector>

#include "landmark2vec/measurement.hpp"

namespace landmark2vec::cli {

struct PlotPanel {
  std::string title;
  LandmarkMap map;
};

/// Scatter plot of one or more 2-D maps (3-D maps are drawn on x/y), panels
/// side by side, each scaled independently to fit. Output is a pure function
/// of the input.
std::string render_svg(const std::vector<PlotPanel>& panels);

}  // namespace landmark2vec::cli
