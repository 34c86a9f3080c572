#pragma once

#include <string>
#include <vector>

namespace levycouple {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Static line chart with linear axes; callers pass log values if wanted.
void write_line_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series);

}  // namespace levycouple
