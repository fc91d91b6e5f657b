#include "bcpnn/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcpnn {

void write_pgm(const std::string& path,
               const Eigen::Ref<const Eigen::MatrixXd>& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  for (long r = 0; r < image.rows(); ++r)
    for (long c = 0; c < image.cols(); ++c) {
      double v = std::min(1.0, std::max(0.0, image(r, c)));
      unsigned char b = static_cast<unsigned char>(std::lround(v * 255.0));
      out.write(reinterpret_cast<char*>(&b), 1);
    }
}

void write_pgm_mask(const std::string& path, const Eigen::MatrixXi& mask) {
  write_pgm(path, mask.cast<double>());
}

void CsvTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

CsvTable CsvTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

namespace {
constexpr int kW = 640, kH = 420, kMargin = 60;
const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string svg_header(const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW
     << "' height='" << kH << "'>\n"
     << "<rect width='100%' height='100%' fill='white'/>\n"
     << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' "
     << "font-family='sans-serif' font-size='14'>" << title << "</text>\n";
  return os.str();
}
}  // namespace

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (xmin > xmax) xmin = 0, xmax = 1;
  if (ymin > ymax) ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) {
    return kMargin + (x - xmin) / (xmax - xmin) * (kW - 2 * kMargin);
  };
  auto py = [&](double y) {
    return kH - kMargin - (y - ymin) / (ymax - ymin) * (kH - 2 * kMargin);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << svg_header(title);
  out << "<line x1='" << kMargin << "' y1='" << kH - kMargin << "' x2='"
      << kW - kMargin << "' y2='" << kH - kMargin
      << "' stroke='black'/>\n<line x1='" << kMargin << "' y1='" << kMargin
      << "' x2='" << kMargin << "' y2='" << kH - kMargin
      << "' stroke='black'/>\n";
  out << "<text x='" << kW / 2 << "' y='" << kH - 15
      << "' text-anchor='middle' font-family='sans-serif' font-size='12'>"
      << xlabel << "</text>\n";
  out << "<text x='15' y='" << kH / 2
      << "' text-anchor='middle' font-family='sans-serif' font-size='12' "
      << "transform='rotate(-90 15 " << kH / 2 << ")'>" << ylabel
      << "</text>\n";
  // axis extents
  out << "<text x='" << kMargin << "' y='" << kH - kMargin + 15
      << "' font-family='sans-serif' font-size='10'>" << xmin << "</text>\n";
  out << "<text x='" << kW - kMargin << "' y='" << kH - kMargin + 15
      << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
      << xmax << "</text>\n";
  out << "<text x='" << kMargin - 5 << "' y='" << kH - kMargin
      << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
      << ymin << "</text>\n";
  out << "<text x='" << kMargin - 5 << "' y='" << kMargin
      << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
      << ymax << "</text>\n";
  int k = 0;
  for (const auto& s : series) {
    const char* color = kPalette[k % 8];
    out << "<polyline fill='none' stroke='" << color << "' points='";
    for (size_t i = 0; i < s.x.size(); ++i)
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    out << "'/>\n";
    out << "<text x='" << kW - kMargin + 5 << "' y='" << kMargin + 15 * k
        << "' font-family='sans-serif' font-size='10' fill='" << color << "'>"
        << s.label << "</text>\n";
    ++k;
  }
  out << "</svg>\n";
}

void write_svg_heatmap(const std::string& path, const std::string& title,
                       const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels,
                       const Eigen::MatrixXd& values) {
  const int rows = static_cast<int>(values.rows());
  const int cols = static_cast<int>(values.cols());
  double vmin = values.minCoeff(), vmax = values.maxCoeff();
  if (vmax == vmin) vmax = vmin + 1;
  double cw = static_cast<double>(kW - 2 * kMargin) / cols;
  double ch = static_cast<double>(kH - 2 * kMargin) / rows;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << svg_header(title);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double t = (values(r, c) - vmin) / (vmax - vmin);
      int red = static_cast<int>(255 * t);
      int blue = static_cast<int>(255 * (1 - t));
      out << "<rect x='" << kMargin + c * cw << "' y='" << kMargin + r * ch
          << "' width='" << cw << "' height='" << ch << "' fill='rgb(" << red
          << ",64," << blue << ")'/>\n";
      out << "<text x='" << kMargin + c * cw + cw / 2 << "' y='"
          << kMargin + r * ch + ch / 2
          << "' text-anchor='middle' font-family='sans-serif' "
             "font-size='9' fill='white'>"
          << static_cast<int>(std::lround(values(r, c) * 100)) << "</text>\n";
    }
  }
  for (int r = 0; r < rows && r < static_cast<int>(row_labels.size()); ++r)
    out << "<text x='" << kMargin - 5 << "' y='" << kMargin + r * ch + ch / 2
        << "' text-anchor='end' font-family='sans-serif' font-size='10'>"
        << row_labels[r] << "</text>\n";
  for (int c = 0; c < cols && c < static_cast<int>(col_labels.size()); ++c)
    out << "<text x='" << kMargin + c * cw + cw / 2 << "' y='"
        << kMargin - 8
        << "' text-anchor='middle' font-family='sans-serif' font-size='10'>"
        << col_labels[c] << "</text>\n";
  out << "</svg>\n";
}

}  // namespace bcpnn
