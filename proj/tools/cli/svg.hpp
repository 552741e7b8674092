#pragma once

#include <optional>
#include <string>
#include <vector>

namespace physattn::cli {

struct Series {
  std::string name;
  std::string color;
  std::vector<double> y;
};

/// Line plot of several series over shared x values. Each series is min-max
/// normalized to [0,1] on its own (a flat series sits at 0.5). One polyline
/// per series, numbers printed with six significant digits.
[[nodiscard]] std::string line_plot(const std::string& title, const std::string& x_label,
                                    const std::vector<double>& x, const std::vector<Series>& series);

struct BarGroup {
  std::string label;
  std::vector<std::optional<double>> values;  ///< one per panel; nullopt draws "diverged"
};

/// One panel per metric, side by side, bars scaled to the panel maximum.
[[nodiscard]] std::string bar_chart(const std::string& title, const std::vector<std::string>& panels,
                                    const std::vector<BarGroup>& groups);

}  // namespace physattn::cli
