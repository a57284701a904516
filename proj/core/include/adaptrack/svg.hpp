#pragma once

#include <string>
#include <vector>

namespace adaptrack {

// Minimal deterministic SVG line chart used for the post-run figures.
class LineChart {
 public:
  LineChart(std::string title, std::string x_label, std::string y_label);

  void add_series(std::string name, std::vector<double> x, std::vector<double> y);
  void add_hline(double y, std::string name = "");
  void set_log_y(bool log_y) { log_y_ = log_y; }

  void write(const std::string& path) const;
  std::string render() const;

 private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
  };
  struct HLine {
    double y;
    std::string name;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<HLine> hlines_;
  bool log_y_ = false;
};

}  // namespace adaptrack
