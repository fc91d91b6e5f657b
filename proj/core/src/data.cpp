#include "bcpnn/data.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bcpnn/rng.hpp"

namespace bcpnn {

namespace {
constexpr int kSide = 28;
constexpr int kPixels = kSide * kSide;
constexpr uint32_t kImageMagic = 0x00000803;
constexpr uint32_t kLabelMagic = 0x00000801;

uint32_t read_u32_be(std::istream& in, const std::string& field) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("truncated IDX file while reading " + field);
  return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) |
         (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

void write_u32_be(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<char*>(b), 4);
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

enum Position { kTop = 0, kBottom, kLeft, kRight };

// Pattern-index blocks fix the bar position deterministically.
Position bar_position(long index, long n) {
  return static_cast<Position>((index * 4) / n);
}

template <typename Fn>
void for_bar_pixels(Position pos, int width, Fn&& fn) {
  if (width <= 0) return;
  for (int r = 0; r < kSide; ++r) {
    for (int c = 0; c < kSide; ++c) {
      bool in_bar = (pos == kTop && r < width) ||
                    (pos == kBottom && r >= kSide - width) ||
                    (pos == kLeft && c < width) ||
                    (pos == kRight && c >= kSide - width);
      if (in_bar) fn(r * kSide + c);
    }
  }
}
}  // namespace

void ImageSet::validate() const {
  if (images.rows() != kPixels)
    throw std::invalid_argument("image set must hold 28x28 images");
  if (static_cast<long>(labels.size()) != images.cols())
    throw std::invalid_argument("image/label count mismatch");
}

ImageSet load_mnist(const std::string& images_path,
                    const std::string& labels_path) {
  std::ifstream im(images_path, std::ios::binary);
  if (!im) throw std::runtime_error("cannot open image file: " + images_path);
  uint32_t magic = read_u32_be(im, "image magic");
  if (magic != kImageMagic) {
    std::ostringstream os;
    os << "bad image magic in " << images_path << ": 0x" << std::hex << magic;
    throw std::runtime_error(os.str());
  }
  uint32_t n = read_u32_be(im, "image count");
  uint32_t rows = read_u32_be(im, "image rows");
  uint32_t cols = read_u32_be(im, "image cols");
  if (rows != kSide || cols != kSide)
    throw std::runtime_error("image dimensions are not 28x28 in " +
                             images_path);
  std::vector<unsigned char> buf(static_cast<size_t>(n) * kPixels);
  if (!im.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size())))
    throw std::runtime_error("truncated image data in " + images_path);

  std::ifstream lb(labels_path, std::ios::binary);
  if (!lb) throw std::runtime_error("cannot open label file: " + labels_path);
  uint32_t lmagic = read_u32_be(lb, "label magic");
  if (lmagic != kLabelMagic) {
    std::ostringstream os;
    os << "bad label magic in " << labels_path << ": 0x" << std::hex << lmagic;
    throw std::runtime_error(os.str());
  }
  uint32_t ln = read_u32_be(lb, "label count");
  if (ln != n)
    throw std::runtime_error("image/label count mismatch: " +
                             std::to_string(n) + " vs " + std::to_string(ln));
  std::vector<unsigned char> lbuf(ln);
  if (!lb.read(reinterpret_cast<char*>(lbuf.data()), ln))
    throw std::runtime_error("truncated label data in " + labels_path);

  ImageSet set;
  set.images.resize(kPixels, n);
  for (uint32_t i = 0; i < n; ++i)
    for (int p = 0; p < kPixels; ++p)
      set.images(p, i) = buf[static_cast<size_t>(i) * kPixels + p] / 255.0;
  set.labels.assign(lbuf.begin(), lbuf.end());
  return set;
}

void save_idx_images(const std::string& path,
                     const Eigen::Ref<const Eigen::MatrixXd>& images) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_u32_be(out, kImageMagic);
  write_u32_be(out, static_cast<uint32_t>(images.cols()));
  write_u32_be(out, kSide);
  write_u32_be(out, kSide);
  std::vector<unsigned char> buf(images.rows());
  for (long i = 0; i < images.cols(); ++i) {
    for (long p = 0; p < images.rows(); ++p)
      buf[p] = static_cast<unsigned char>(
          std::lround(std::min(1.0, std::max(0.0, images(p, i))) * 255.0));
    out.write(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  }
}

void save_idx_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_u32_be(out, kLabelMagic);
  write_u32_be(out, static_cast<uint32_t>(labels.size()));
  for (int l : labels) {
    unsigned char b = static_cast<unsigned char>(l);
    out.write(reinterpret_cast<char*>(&b), 1);
  }
}

std::vector<int> load_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open label file: " + path);
  uint32_t magic = read_u32_be(in, "label magic");
  if (magic != kLabelMagic)
    throw std::runtime_error("bad label magic in " + path);
  uint32_t n = read_u32_be(in, "label count");
  std::vector<unsigned char> buf(n);
  if (!in.read(reinterpret_cast<char*>(buf.data()), n))
    throw std::runtime_error("truncated label data in " + path);
  return std::vector<int>(buf.begin(), buf.end());
}

ImageSet make_completion(const ImageSet& set, double difficulty) {
  set.validate();
  ImageSet out = set;
  out.provenance = "completion";
  out.difficulty = difficulty;
  if (difficulty <= 0.0) return out;
  DistortionParams par;
  int width = round_half_up(par.bar_half_image * difficulty);
  for (long i = 0; i < out.count(); ++i) {
    Position pos = bar_position(i, out.count());
    for_bar_pixels(pos, width, [&](int p) { out.images(p, i) = 0.5; });
  }
  return out;
}

ImageSet make_rivalry(const ImageSet& set, double difficulty) {
  set.validate();
  ImageSet out = set;
  out.provenance = "rivalry";
  out.difficulty = difficulty;
  if (difficulty <= 0.0) return out;
  DistortionParams par;
  int width = round_half_up(par.bar_half_image * difficulty);
  const long block = 250;
  for (long i = 0; i < out.count(); ++i) {
    long base = (i / block) * block;
    long j = i - base;
    // ordinals within a block pair up to 250 (8th <-> 242nd); the wrap
    // keeps the 250th image, like the 125th, paired with itself
    long rival = base + ((block - 2 - j) % block + block) % block;
    if (rival >= out.count()) rival = i;
    Position pos = bar_position(i, out.count());
    for_bar_pixels(pos, width,
                   [&](int p) { out.images(p, i) = set.images(p, rival); });
  }
  return out;
}

ImageSet make_distortion(const ImageSet& set, double difficulty,
                         uint64_t seed) {
  set.validate();
  ImageSet out = set;
  out.provenance = "distortion";
  out.difficulty = difficulty;
  if (difficulty <= 0.0) return out;
  DistortionParams par;
  const long n = out.count();
  const long block = (n + 4) / 5;
  for (long i = 0; i < n; ++i) {
    int type = static_cast<int>(i / block);
    auto img = out.images.col(i);
    switch (type) {
      case 0: {  // noise: pixel flips u -> 1-u
        double flip_p = par.noise_flip_prob_scale * difficulty;
        for (int p = 0; p < kPixels; ++p)
          if (rng::uniform(seed, rng::Stream::tasks, 0,
                           static_cast<uint64_t>(i),
                           static_cast<uint64_t>(p)) < flip_p)
            img[p] = 1.0 - img[p];
        break;
      }
      case 1: {  // grid: regularly spaced ink lines
        // power-of-two spacings nest across difficulty levels, which keeps
        // the corruption monotone in D regardless of image content
        int expo = std::min(5, std::max(1, 6 - round_half_up(5.0 * difficulty)));
        int spacing = 1 << expo;
        for (int r = 0; r < kSide; r += spacing)
          for (int c = 0; c < kSide; ++c) img[r * kSide + c] = 1.0;
        for (int c = 0; c < kSide; c += spacing)
          for (int r = 0; r < kSide; ++r) img[r * kSide + c] = 1.0;
        break;
      }
      case 2:    // clutter: random ink lines
      case 3: {  // deletion: random blank lines
        int count = round_half_up(par.line_count_scale * difficulty);
        double value = (type == 2) ? 1.0 : 0.0;
        for (int k = 0; k < count; ++k) {
          uint64_t draw = rng::key(seed, rng::Stream::tasks,
                                   static_cast<uint64_t>(type),
                                   static_cast<uint64_t>(i),
                                   static_cast<uint64_t>(k));
          bool horizontal = (draw & 1) != 0;
          int idx = static_cast<int>((draw >> 1) % kSide);
          if (horizontal)
            for (int c = 0; c < kSide; ++c) img[idx * kSide + c] = value;
          else
            for (int r = 0; r < kSide; ++r) img[r * kSide + idx] = value;
        }
        break;
      }
      default: {  // occlusion: centered gray square
        int side = round_half_up(par.occlusion_side_scale * difficulty);
        int start = (kSide - side) / 2;
        for (int r = start; r < start + side; ++r)
          for (int c = start; c < start + side; ++c)
            if (r >= 0 && r < kSide && c >= 0 && c < kSide)
              img[r * kSide + c] = 0.5;
        break;
      }
    }
  }
  return out;
}

std::string task_file_stem(const std::string& task, double difficulty) {
  std::ostringstream os;
  os << task << "-d";
  os << round_half_up(difficulty * 100);
  return os.str();
}

void write_task_manifest(const std::string& path, const std::string& task,
                         double difficulty, uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "task=" << task << "\n";
  out << "difficulty=" << difficulty << "\n";
  out << "seed=" << seed << "\n";
  out << "formulas_version=" << kFormulasVersion << "\n";
}

}  // namespace bcpnn
