// End-to-end checks of the command-line tool: files, determinism, exit
// codes. Shells out to the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kSim = BCPNN_SIM_PATH;
const std::string kData = BCPNN_DATA_DIR;

int run(const std::string& args) {
  std::string cmd = kSim + " " + args + " > cli_test_stdout.log 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

bool same_bytes(const std::string& a, const std::string& b) {
  return slurp(a) == slurp(b);
}

// a deliberately small model so train/eval finish in seconds
std::string tiny_overrides(const std::string& preset, int seed) {
  return " -s variant=" + preset +
         " -s H_HID=4 -s M_HID=8 -s N_conn_ffwd=24 -s N_conn_rec=4"
         " -s N_conn_fb=2 -s N_train=12 -s N_test=20 -s N_epoch=1 -s N_intv=4"
         " -s seed=" + std::to_string(seed) + " -s data_dir=" + kData;
}

}  // namespace

TEST_CASE("gen-tasks writes deterministic task files") {
  fs::remove_all("cli_tasks_a");
  fs::remove_all("cli_tasks_b");
  REQUIRE(run("gen-tasks -s data_dir=" + kData + " -s seed=5 --out-dir cli_tasks_a") == 0);
  int files = 0;
  for (auto& e : fs::directory_iterator("cli_tasks_a")) {
    (void)e;
    ++files;
  }
  CHECK(files == 45);  // 3 tasks x 5 levels x (images, labels, manifest)
  REQUIRE(run("gen-tasks -s data_dir=" + kData + " -s seed=5 --out-dir cli_tasks_b") == 0);
  CHECK(same_bytes("cli_tasks_a/completion-d60-images-idx3-ubyte",
                   "cli_tasks_b/completion-d60-images-idx3-ubyte"));
  CHECK(same_bytes("cli_tasks_a/distortion-d100-images-idx3-ubyte",
                   "cli_tasks_b/distortion-d100-images-idx3-ubyte"));

  fs::remove_all("cli_tasks_c");
  REQUIRE(run("gen-tasks -s data_dir=" + kData +
              " --difficulties 0.5 --out-dir cli_tasks_c") == 0);
  files = 0;
  for (auto& e : fs::directory_iterator("cli_tasks_c")) {
    (void)e;
    ++files;
  }
  CHECK(files == 9);
}

TEST_CASE("train/eval round trip with collision guard") {
  fs::remove_all("cli_run");
  REQUIRE(run("train" + tiny_overrides("RateFull", 3) +
              " --out-dir cli_run") == 0);
  CHECK(fs::exists("cli_run/checkpoint.bcp"));
  CHECK(fs::exists("cli_run/config.txt"));
  CHECK(fs::exists("cli_run/training_log.csv"));

  // collision without --force refuses
  CHECK(run("train" + tiny_overrides("RateFull", 3) + " --out-dir cli_run") ==
        1);
  CHECK(run("train" + tiny_overrides("RateFull", 3) +
            " --out-dir cli_run --force") == 0);

  REQUIRE(run("eval --checkpoint cli_run/checkpoint.bcp -s data_dir=" + kData +
              " --out-dir cli_eval --dataset clean --dump-rf") == 0);
  CHECK(fs::exists("cli_eval/accuracy.csv"));
  CHECK(fs::exists("cli_eval/sortho.csv"));
  CHECK(fs::exists("cli_eval/receptive_fields/ffwd_h0.pgm"));

  // config mismatch is refused with a diff
  CHECK(run("eval --checkpoint cli_run/checkpoint.bcp -s data_dir=" + kData +
            " -s M_HID=16 --out-dir cli_eval2") == 1);

  // report renders the CSVs
  REQUIRE(run("report --run-dir cli_eval") == 0);
  CHECK(fs::exists("cli_eval/plots"));
  REQUIRE(run("report --run-dir cli_run") == 0);
  CHECK(fs::exists("cli_run/plots/rewiring_flips.svg"));
}

TEST_CASE("resume continues the uninterrupted trajectory bitwise") {
  fs::remove_all("cli_two");
  fs::remove_all("cli_one");
  std::string base = tiny_overrides("SpspkFull", 7);
  REQUIRE(run("train" + base + " -s N_epoch=2 --out-dir cli_two") == 0);
  REQUIRE(run("train" + base + " -s N_epoch=1 --out-dir cli_one") == 0);
  REQUIRE(run("train" + base +
              " -s N_epoch=2 --out-dir cli_one --force --resume "
              "cli_one/checkpoint.bcp") == 0);
  CHECK(same_bytes("cli_two/checkpoint.bcp", "cli_one/checkpoint.bcp"));
}

TEST_CASE("spike rasters are dumped on request") {
  fs::remove_all("cli_spk");
  REQUIRE(run("train" + tiny_overrides("SpspkFull", 9) +
              " --out-dir cli_spk") == 0);
  REQUIRE(run("eval --checkpoint cli_spk/checkpoint.bcp -s data_dir=" + kData +
              " -s N_test=3 --out-dir cli_spk_eval --raster") == 0);
  std::string raster = slurp("cli_spk_eval/raster_clean-d0.csv");
  CHECK(raster.find("t_ms,population,unit_index") == 0);
  CHECK(raster.find("HID") != std::string::npos);
}

TEST_CASE("sweep runs cells and merges results") {
  fs::remove_all("cli_sweep");
  REQUIRE(run("sweep" + tiny_overrides("SpkFull", 11) +
              " --fmax-grid 100 --tauz-grid 0.02 --taum-grid 0.005"
              " --out-dir cli_sweep") == 0);
  std::string csv = slurp("cli_sweep/sweep.csv");
  CHECK(csv.find("f_max,tau_z,tau_m,accuracy,seconds,status") == 0);
  CHECK(csv.find("ok") != std::string::npos);
  REQUIRE(run("sweep" + tiny_overrides("SpkFull", 11) +
              " --fmax-grid 100,1000 --tauz-grid 0.02 --taum-grid 0.005"
              " --jobs 2 --out-dir cli_sweep2") == 0);
  auto merged = slurp("cli_sweep2/sweep.csv");
  CHECK(std::count(merged.begin(), merged.end(), '\n') == 3);
}

TEST_CASE("missing data directory yields an actionable validation error") {
  CHECK(run("train" + tiny_overrides("RateFf", 1) +
            " -s data_dir=/nonexistent --out-dir cli_nodata") == 1);
  CHECK(run("gen-tasks -s data_dir=/nonexistent --out-dir cli_nodata") == 1);
}
