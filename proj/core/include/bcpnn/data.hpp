#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bcpnn {

// Images are column vectors of intensities in [0,1], 28x28 row-major.
struct ImageSet {
  Eigen::MatrixXd images;  // 784 x N
  std::vector<int> labels;
  std::string provenance = "clean";  // clean|completion|rivalry|distortion
  double difficulty = 0.0;

  long count() const { return images.cols(); }
  void validate() const;
};

// IDX readers/writers (big-endian, magic 0x803 images / 0x801 labels).
ImageSet load_mnist(const std::string& images_path,
                    const std::string& labels_path);
void save_idx_images(const std::string& path,
                     const Eigen::Ref<const Eigen::MatrixXd>& images);
void save_idx_labels(const std::string& path, const std::vector<int>& labels);
std::vector<int> load_idx_labels(const std::string& path);

// Task generators. Pure functions of (set, difficulty, seed): a fixed seed
// reproduces bit-identical sets. Labels pass through untouched.
ImageSet make_completion(const ImageSet& set, double difficulty);
ImageSet make_rivalry(const ImageSet& set, double difficulty);
ImageSet make_distortion(const ImageSet& set, double difficulty,
                         uint64_t seed);

// Calibration constants for the distortion family, kept in one place for
// retuning. kFormulasVersion tags generated manifests.
struct DistortionParams {
  double noise_flip_prob_scale = 0.3;    // flip probability = scale * D
  double line_count_scale = 8.0;         // clutter/deletion lines = round(8D)
  double occlusion_side_scale = 16.0;    // square side = round(16D)
  double bar_half_image = 14.0;          // completion/rivalry bar = 14D
};
constexpr int kFormulasVersion = 1;

std::string task_file_stem(const std::string& task, double difficulty);
void write_task_manifest(const std::string& path, const std::string& task,
                         double difficulty, uint64_t seed);

}  // namespace bcpnn
