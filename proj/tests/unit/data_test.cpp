#include <cstdio>
#include <fstream>

#include "bcpnn/data.hpp"
#include "bcpnn/rng.hpp"
#include "doctest.h"

using namespace bcpnn;

namespace {

ImageSet synthetic_set(long n, uint64_t seed) {
  ImageSet set;
  set.images.resize(784, n);
  rng::Sequence seq(seed, rng::Stream::test);
  for (long i = 0; i < n; ++i) {
    set.images.col(i).setZero();
    // a blurry blob, vaguely digit-like statistics
    int cr = 8 + static_cast<int>(seq.next_below(12));
    int cc = 8 + static_cast<int>(seq.next_below(12));
    for (int r = 0; r < 28; ++r)
      for (int c = 0; c < 28; ++c) {
        double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
        if (d2 < 30) set.images(r * 28 + c, i) = std::exp(-d2 / 16.0);
      }
    set.labels.push_back(static_cast<int>(i % 10));
  }
  return set;
}

double mean_abs_diff(const ImageSet& a, const ImageSet& b, long lo, long hi) {
  double acc = 0.0;
  for (long i = lo; i < hi; ++i)
    acc += (a.images.col(i) - b.images.col(i)).cwiseAbs().sum();
  return acc / ((hi - lo) * 784.0);
}

}  // namespace

TEST_CASE("idx round trip and validation errors") {
  ImageSet set = synthetic_set(12, 1);
  save_idx_images("t_img.idx", set.images);
  save_idx_labels("t_lbl.idx", set.labels);
  ImageSet back = load_mnist("t_img.idx", "t_lbl.idx");
  CHECK(back.count() == 12);
  CHECK(back.labels == set.labels);
  // intensities quantized to 1/255 steps on disk
  CHECK((back.images - set.images).cwiseAbs().maxCoeff() < 0.5 / 255.0);

  // corrupt the image magic
  {
    std::fstream f("t_img.idx",
                   std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    char junk[4] = {0, 0, 9, 9};
    f.write(junk, 4);
  }
  CHECK_THROWS_WITH_AS(load_mnist("t_img.idx", "t_lbl.idx"),
                       doctest::Contains("image magic"), std::runtime_error);

  save_idx_images("t_img.idx", set.images);
  // truncate the image payload
  {
    std::ofstream f("t_trunc.idx", std::ios::binary);
    std::ifstream in("t_img.idx", std::ios::binary);
    std::vector<char> buf(1000);
    in.read(buf.data(), 1000);
    f.write(buf.data(), 1000);
  }
  CHECK_THROWS_WITH_AS(load_mnist("t_trunc.idx", "t_lbl.idx"),
                       doctest::Contains("truncated"), std::runtime_error);

  // count mismatch between images and labels
  save_idx_labels("t_lbl.idx", std::vector<int>(11, 0));
  CHECK_THROWS_WITH_AS(load_mnist("t_img.idx", "t_lbl.idx"),
                       doctest::Contains("count mismatch"),
                       std::runtime_error);

  std::remove("t_img.idx");
  std::remove("t_lbl.idx");
  std::remove("t_trunc.idx");
}

TEST_CASE("completion: bar width, value and position blocks") {
  ImageSet set = synthetic_set(1000, 2);
  ImageSet full = make_completion(set, 1.0);
  ImageSet faint = make_completion(set, 0.2);

  // width 14 at D=1.0: top block images lose their upper half
  for (int r = 0; r < 14; ++r)
    for (int c = 0; c < 28; ++c) CHECK(full.images(r * 28 + c, 0) == 0.5);
  // untouched below the bar
  CHECK(full.images.col(0).segment(14 * 28, 14 * 28) ==
        set.images.col(0).segment(14 * 28, 14 * 28));

  // width round(2.8) = 3 at D=0.2
  for (int c = 0; c < 28; ++c) {
    CHECK(faint.images(2 * 28 + c, 0) == 0.5);
    CHECK(faint.images(3 * 28 + c, 0) == set.images(3 * 28 + c, 0));
  }

  // position blocks: bottom for index 250, left for 500, right for 750
  CHECK(full.images(27 * 28 + 0, 250) == 0.5);
  CHECK(full.images(0 * 28 + 0, 500) == 0.5);
  CHECK(full.images(0 * 28 + 27, 750) == 0.5);
  CHECK(full.images(0 * 28 + 27, 500) == set.images(0 * 28 + 27, 500));

  CHECK(full.labels == set.labels);
  CHECK(full.provenance == "completion");
}

TEST_CASE("rivalry: deterministic reverse pairing") {
  ImageSet set = synthetic_set(1000, 3);
  ImageSet riv = make_rivalry(set, 1.0);
  // the 8th image carries the 242nd image inside the bar (0-based 7 / 241)
  for (int r = 0; r < 14; ++r)
    for (int c = 0; c < 28; ++c)
      CHECK(riv.images(r * 28 + c, 7) == set.images(r * 28 + c, 241));
  // the 1st pairs with the 249th
  CHECK(riv.images(0, 0) == set.images(0, 248));
  // the middle image is its own rival: unchanged
  CHECK((riv.images.col(124) - set.images.col(124)).norm() == 0.0);
  // zero difficulty leaves images untouched
  ImageSet same = make_rivalry(set, 0.0);
  CHECK((same.images - set.images).norm() == 0.0);
}

TEST_CASE("distortion: block formulas at fixed difficulties") {
  ImageSet set = synthetic_set(1000, 4);
  ImageSet hard = make_distortion(set, 1.0, 99);

  SUBCASE("noise: flip fraction approximately 0.30 at D=1") {
    long flipped = 0;
    for (long i = 0; i < 200; ++i)
      for (int p = 0; p < 784; ++p)
        if (hard.images(p, i) != set.images(p, i)) ++flipped;
    double frac = static_cast<double>(flipped) / (200.0 * 784.0);
    CHECK(frac == doctest::Approx(0.30).epsilon(0.07));
  }

  SUBCASE("grid: D=1 draws ink lines every 2 pixels") {
    for (int r = 0; r < 28; r += 2)
      for (int c = 0; c < 28; ++c) CHECK(hard.images(r * 28 + c, 200) == 1.0);
  }

  SUBCASE("occlusion: D=0.5 covers a centered 8x8 square") {
    ImageSet mid = make_distortion(set, 0.5, 99);
    for (int r = 10; r < 18; ++r)
      for (int c = 10; c < 18; ++c)
        CHECK(mid.images(r * 28 + c, 900) == 0.5);
    CHECK(mid.images(9 * 28 + 10, 900) == set.images(9 * 28 + 10, 900));
  }

  SUBCASE("deletion block only blanks pixels") {
    for (long i = 600; i < 800; ++i)
      for (int p = 0; p < 784; ++p)
        CHECK(hard.images(p, i) <= set.images(p, i) + 1e-12);
  }
}

TEST_CASE("generators: purity, bounds, labels, monotonicity") {
  ImageSet set = synthetic_set(1000, 5);
  const double grid[] = {0.2, 0.4, 0.6, 0.8, 1.0};

  ImageSet again = make_distortion(set, 0.6, 7);
  ImageSet again2 = make_distortion(set, 0.6, 7);
  CHECK((again.images - again2.images).norm() == 0.0);
  ImageSet other_seed = make_distortion(set, 0.6, 8);
  CHECK((again.images - other_seed.images).norm() != 0.0);

  double prev_c = -1.0, prev_r = -1.0;
  std::vector<double> prev_block(5, -1.0);
  for (double d : grid) {
    ImageSet c = make_completion(set, d);
    ImageSet r = make_rivalry(set, d);
    ImageSet x = make_distortion(set, d, 7);
    for (const ImageSet* s : {&c, &r, &x}) {
      CHECK(s->images.minCoeff() >= 0.0);
      CHECK(s->images.maxCoeff() <= 1.0);
      CHECK(s->labels == set.labels);
    }
    double dc = mean_abs_diff(c, set, 0, 1000);
    double dr = mean_abs_diff(r, set, 0, 1000);
    CHECK(dc >= prev_c);
    CHECK(dr >= prev_r - 1e-12);
    prev_c = dc;
    prev_r = dr;
    for (int b = 0; b < 5; ++b) {
      double db = mean_abs_diff(x, set, b * 200, (b + 1) * 200);
      CHECK(db >= prev_block[b] - 1e-12);
      prev_block[b] = db;
    }
  }
}

TEST_CASE("task manifest records the generation parameters") {
  write_task_manifest("t_manifest.txt", "completion", 0.6, 42);
  std::ifstream in("t_manifest.txt");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("task=completion") != std::string::npos);
  CHECK(text.find("difficulty=0.6") != std::string::npos);
  CHECK(text.find("seed=42") != std::string::npos);
  std::remove("t_manifest.txt");
}
