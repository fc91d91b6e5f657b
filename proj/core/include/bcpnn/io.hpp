#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bcpnn {

// Grayscale PGM (P5) dump; values clamped to [0,1].
void write_pgm(const std::string& path,
               const Eigen::Ref<const Eigen::MatrixXd>& image);
void write_pgm_mask(const std::string& path, const Eigen::MatrixXi& mask);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void save(const std::string& path) const;
  static CsvTable load(const std::string& path);
};

// Minimal SVG plotting for the report command.
struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series);

void write_svg_heatmap(const std::string& path, const std::string& title,
                       const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels,
                       const Eigen::MatrixXd& values);

}  // namespace bcpnn
