#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pvfc/errors.hpp"

namespace pvfc::cli {

class UnknownFigure : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> lo;  ///< optional shaded band, same length as y
    std::vector<double> hi;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Panels laid out side by side in one SVG document.
std::string render_svg(const std::string& title, const std::vector<Panel>& panels);

/// fig4, fig6, fig9, fig10, fig11, fig12.
const std::vector<std::string>& figure_ids();

/// Builds the SVG for one figure from the tables under `report_dir`.
/// Throws UnknownFigure or MissingInput.
std::string render_figure(const std::filesystem::path& report_dir, const std::string& figure);

/// Writes <figure>.svg into `out_dir` for one figure or for "all"; returns the files written.
std::vector<std::filesystem::path> plot(const std::filesystem::path& report_dir, const std::string& figure,
                                        const std::filesystem::path& out_dir);

} // namespace pvfc::cli
