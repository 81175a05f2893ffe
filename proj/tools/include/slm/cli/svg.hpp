#pragma once

#include <string>
#include <vector>

#include "slm/experiments.hpp"
#include "slm/measure.hpp"

namespace slm::cli {

struct Marker {
    double value;
    std::string label;
    std::string color = "#c0392b";
};

struct SvgStyle {
    std::string title;
    std::string x_label = "x";
    std::string y_label;
    std::vector<Marker> markers;  // vertical lines at x = value
    int width = 800;
    int height = 500;
};

/// Step plot of histogram densities. Throws EmptyDataError for an empty histogram.
std::string render_histogram_svg(const measure::Histogram& h, const SvgStyle& style);

/// Terminal states as a point cloud, binned to one mark per occupied pixel.
/// Throws EmptyDataError when there are no rows or no states.
std::string render_bifurcation_svg(const experiments::BifurcationDataset& ds, const SvgStyle& style);

}  // namespace slm::cli
