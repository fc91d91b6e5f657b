// Command-line front end: dataset generation, training, evaluation,
// parameter sweeps and report rendering for the columnar BCPNN simulator.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bcpnn/analysis.hpp"
#include "bcpnn/checkpoint.hpp"
#include "bcpnn/data.hpp"
#include "bcpnn/io.hpp"
#include "bcpnn/network.hpp"

namespace fs = std::filesystem;
using namespace bcpnn;

namespace {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig build_config(const std::string& config_path,
                       const std::vector<std::string>& overrides) {
  RunConfig cfg;
  cfg.apply_variant_preset("SpspkFull");
  if (!config_path.empty()) cfg = RunConfig::from_file(config_path);
  for (const auto& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ValidationError("override must be key=value: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void echo_config(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream out(out_dir + "/config.txt");
  out << cfg.serialize();
}

ImageSet load_clean(const RunConfig& cfg, bool train_split) {
  std::string dir = cfg.resolved_data_dir();
  std::string img = dir + (train_split ? "/train-images-idx3-ubyte"
                                       : "/test-images-idx3-ubyte");
  std::string lbl = dir + (train_split ? "/train-labels-idx1-ubyte"
                                       : "/test-labels-idx1-ubyte");
  if (!fs::exists(img) || !fs::exists(lbl)) {
    throw ValidationError(
        "MNIST IDX files not found; expected\n  " + img + "\n  " + lbl +
        "\nPoint data_dir= or $BCPNN_DATA_DIR at a directory holding the "
        "IDX files (see README for how to obtain them).");
  }
  return load_mnist(img, lbl);
}

const std::vector<std::string> kTasks = {"completion", "rivalry",
                                         "distortion"};

ImageSet generate_task(const std::string& task, const ImageSet& base,
                       double difficulty, uint64_t seed) {
  if (task == "completion") return make_completion(base, difficulty);
  if (task == "rivalry") return make_rivalry(base, difficulty);
  if (task == "distortion") return make_distortion(base, difficulty, seed);
  throw ValidationError("unknown task: " + task);
}

int cmd_gen_tasks(const RunConfig& cfg, const std::string& out_dir,
                  const std::vector<double>& difficulties) {
  ImageSet test = load_clean(cfg, false);
  long n = std::min<long>(1000, test.count());
  ImageSet base;
  base.images = test.images.leftCols(n);
  base.labels.assign(test.labels.begin(), test.labels.begin() + n);
  fs::create_directories(out_dir);
  for (const auto& task : kTasks) {
    for (double d : difficulties) {
      ImageSet set = generate_task(task, base, d, cfg.seed);
      std::string stem = out_dir + "/" + task_file_stem(task, d);
      save_idx_images(stem + "-images-idx3-ubyte", set.images);
      save_idx_labels(stem + "-labels-idx1-ubyte", set.labels);
      write_task_manifest(stem + ".manifest", task, d, cfg.seed);
    }
  }
  std::cout << "wrote " << kTasks.size() * difficulties.size()
            << " task sets to " << out_dir << "\n";
  return 0;
}

int cmd_train(RunConfig cfg, const std::string& resume, bool force) {
  std::string out_dir = cfg.out_dir;
  if (fs::exists(out_dir + "/checkpoint.bcp") && !force && resume.empty())
    throw ValidationError(out_dir +
                          "/checkpoint.bcp already exists; pass --force to "
                          "overwrite or --resume to continue");
  echo_config(cfg, out_dir);

  std::unique_ptr<Network> net;
  if (!resume.empty()) {
    RunConfig stored = peek_checkpoint_config(resume);
    if (stored.model_signature() != cfg.model_signature()) {
      std::ostringstream os;
      os << "checkpoint/config mismatch; differing keys:\n";
      std::istringstream a(stored.model_signature()),
          b(cfg.model_signature());
      std::string la, lb;
      while (std::getline(a, la) && std::getline(b, lb))
        if (la != lb)
          os << "  checkpoint: " << la << "\n  requested:  " << lb << "\n";
      throw ValidationError(os.str());
    }
    net = load_checkpoint(resume, &cfg);
  } else {
    net = std::make_unique<Network>(cfg);
  }

  ImageSet train = load_clean(cfg, true);
  long n = std::min<long>(cfg.N_train, train.count());
  int epochs_left = cfg.N_epoch - net->epochs_done();
  if (epochs_left < 0) epochs_left = 0;
  TrainLog log = net->train(train.images.leftCols(n), epochs_left);

  CsvTable csv;
  csv.header = {"pattern", "projection", "flips", "score_mean", "score_std"};
  for (const auto& r : log.rows)
    csv.rows.push_back({std::to_string(r.pattern), r.projection,
                        std::to_string(r.flips), std::to_string(r.score_mean),
                        std::to_string(r.score_std)});
  csv.save(out_dir + "/training_log.csv");

  save_checkpoint(*net, out_dir + "/checkpoint.bcp");
  std::ofstream summary(out_dir + "/summary.txt");
  summary << "patterns=" << net->patterns_seen() << "\n"
          << "epochs=" << net->epochs_done() << "\n"
          << "wall_seconds=" << log.wall_seconds << "\n";
  std::cout << "trained " << net->patterns_seen() << " patterns in "
            << log.wall_seconds << " s -> " << out_dir << "\n";
  return 0;
}

struct ProbeBundle {
  LinearProbe probe;
  int offset_steps = 0;
  int offset_index = 0;
};

ProbeBundle fit_probe(Network& net, const RunConfig& cfg,
                      const ImageSet& train) {
  long n = std::min<long>(cfg.N_train, train.count());
  EvalOptions opt;
  EvalResult res = net.evaluate(train.images.leftCols(n), opt);
  ProbeBundle out;
  out.offset_index = static_cast<int>(res.offsets.size()) - 1;
  out.offset_steps = res.offsets[out.offset_index];
  std::vector<int> labels(train.labels.begin(), train.labels.begin() + n);
  ProbeOptions popt;
  popt.seed = cfg.seed;
  out.probe = train_probe(res.hid[out.offset_index], labels, popt);
  return out;
}

int cmd_eval(const std::string& config_path,
             const std::vector<std::string>& overrides,
             const std::string& cli_out_dir, const std::string& ckpt_path,
             const std::string& dataset, const std::string& task_dir,
             std::vector<double> difficulties, bool raster, bool dump_rf) {
  RunConfig stored = peek_checkpoint_config(ckpt_path);
  // requested = stored model + user's file/overrides; a config that changes
  // the model identity is refused with the differing keys
  RunConfig cfg = stored;
  if (!config_path.empty()) cfg = RunConfig::from_file(config_path);
  for (const auto& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ValidationError("override must be key=value: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (stored.model_signature() != cfg.model_signature()) {
    std::ostringstream os;
    os << "variant/checkpoint mismatch; differing keys:\n";
    std::istringstream sa(stored.model_signature()),
        sb(cfg.model_signature());
    std::string la, lb;
    while (std::getline(sa, la) && std::getline(sb, lb))
      if (la != lb)
        os << "  checkpoint: " << la << "\n  requested:  " << lb << "\n";
    throw ValidationError(os.str());
  }
  if (!cli_out_dir.empty()) cfg.out_dir = cli_out_dir;
  std::string out_dir = cfg.out_dir;
  echo_config(cfg, out_dir);

  auto net = load_checkpoint(ckpt_path);
  ImageSet train = load_clean(cfg, true);
  ImageSet test = load_clean(cfg, false);
  long n_test = std::min<long>(cfg.N_test, test.count());

  ProbeBundle pb = fit_probe(*net, cfg, train);

  CsvTable acc;
  acc.header = {"variant", "task", "difficulty", "seed", "offset_ms",
                "accuracy"};
  CsvTable ortho;
  ortho.header = {"population", "offset_ms", "s_ortho", "task", "difficulty"};

  auto eval_set = [&](const std::string& task, double difficulty,
                      const ImageSet& set) {
    EvalOptions opt;
    std::ofstream raster_file;
    if (raster) {
      fs::create_directories(out_dir);
      raster_file.open(out_dir + "/raster_" + task_file_stem(task, difficulty) +
                       ".csv");
      raster_file << "t_ms,population,unit_index\n";
      opt.raster = &raster_file;
    }
    EvalResult res = net->evaluate(set.images, opt);
    double a = eval_probe(pb.probe, res.hid[pb.offset_index], set.labels);
    double off_ms = pb.offset_steps * cfg.dt * 1e3;
    acc.rows.push_back({cfg.variant, task, std::to_string(difficulty),
                        std::to_string(cfg.seed), std::to_string(off_ms),
                        std::to_string(a)});
    for (size_t k = 0; k < res.offsets.size(); ++k) {
      double ms = res.offsets[k] * cfg.dt * 1e3;
      ortho.rows.push_back(
          {"INP", std::to_string(ms),
           std::to_string(orthogonality_ratio(res.inp[k], set.labels)), task,
           std::to_string(difficulty)});
      ortho.rows.push_back(
          {"HID", std::to_string(ms),
           std::to_string(orthogonality_ratio(res.hid[k], set.labels)), task,
           std::to_string(difficulty)});
      if (net->has_inprc())
        ortho.rows.push_back(
            {"INPRC", std::to_string(ms),
             std::to_string(orthogonality_ratio(res.inprc[k], set.labels)),
             task, std::to_string(difficulty)});
    }
  };

  ImageSet clean;
  clean.images = test.images.leftCols(n_test);
  clean.labels.assign(test.labels.begin(), test.labels.begin() + n_test);
  if (dataset == "clean" || dataset == "all")
    eval_set("clean", 0.0, clean);
  if (dataset != "clean") {
    long n_base = std::min<long>(1000, test.count());
    ImageSet base;
    base.images = test.images.leftCols(n_base);
    base.labels.assign(test.labels.begin(), test.labels.begin() + n_base);
    for (const auto& task : kTasks) {
      if (dataset != "all" && dataset != task) continue;
      for (double d : difficulties) {
        if (!task_dir.empty()) {
          std::string stem = task_dir + "/" + task_file_stem(task, d);
          ImageSet set = load_mnist(stem + "-images-idx3-ubyte",
                                    stem + "-labels-idx1-ubyte");
          set.provenance = task;
          set.difficulty = d;
          eval_set(task, d, set);
        } else {
          eval_set(task, d, generate_task(task, base, d, cfg.seed));
        }
      }
    }
  }

  acc.save(out_dir + "/accuracy.csv");
  ortho.save(out_dir + "/sortho.csv");

  if (dump_rf) {
    fs::create_directories(out_dir + "/receptive_fields");
    int n_dump = std::min(10, net->hid().shape().n_hypercolumns);
    for (int h = 0; h < n_dump; ++h) {
      write_pgm_mask(out_dir + "/receptive_fields/ffwd_h" +
                         std::to_string(h) + ".pgm",
                     receptive_field_mask(net->ffwd().connectivity(), h,
                                          false));
      if (net->full())
        write_pgm_mask(out_dir + "/receptive_fields/feedback_h" +
                           std::to_string(h) + ".pgm",
                       receptive_field_mask(net->feedback().connectivity(), h,
                                            true));
    }
  }
  std::cout << "wrote " << acc.rows.size() << " accuracy rows to " << out_dir
            << "\n";
  return 0;
}

int run_sweep_cell(RunConfig cfg, double fmax, double tau_z, double tau_m,
                   const std::string& cell_csv) {
  cfg.set("f_max", std::to_string(fmax));
  cfg.set("tau_z", std::to_string(tau_z));
  cfg.set("tau_m", std::to_string(tau_m));
  Network net(cfg);
  ImageSet train = load_clean(cfg, true);
  ImageSet test = load_clean(cfg, false);
  long n_train = std::min<long>(cfg.N_train, train.count());
  long n_test = std::min<long>(cfg.N_test, test.count());
  auto t0 = std::chrono::steady_clock::now();
  net.train(train.images.leftCols(n_train), cfg.N_epoch);
  ProbeBundle pb = fit_probe(net, cfg, train);
  EvalResult res = net.evaluate(test.images.leftCols(n_test));
  std::vector<int> labels(test.labels.begin(), test.labels.begin() + n_test);
  double acc = eval_probe(pb.probe, res.hid[pb.offset_index], labels);
  auto t1 = std::chrono::steady_clock::now();
  CsvTable cell;
  cell.header = {"f_max", "tau_z", "tau_m", "accuracy", "seconds", "status"};
  cell.rows.push_back({std::to_string(fmax), std::to_string(tau_z),
                       std::to_string(tau_m), std::to_string(acc),
                       std::to_string(std::chrono::duration<double>(t1 - t0)
                                          .count()),
                       "ok"});
  cell.save(cell_csv);
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::vector<double>& fmaxes,
              const std::vector<double>& tauzs,
              const std::vector<double>& taums, int jobs,
              const std::string& self_exe, const std::string& config_path,
              const std::vector<std::string>& overrides) {
  std::string out_dir = cfg.out_dir;
  fs::create_directories(out_dir);
  echo_config(cfg, out_dir);
  struct Cell {
    double f, z, m;
    std::string csv;
  };
  std::vector<Cell> cells;
  int idx = 0;
  for (double f : fmaxes)
    for (double z : tauzs)
      for (double m : taums)
        cells.push_back(
            {f, z, m, out_dir + "/cell_" + std::to_string(idx++) + ".csv"});

  auto run_inline = [&](const Cell& c) {
    try {
      run_sweep_cell(cfg, c.f, c.z, c.m, c.csv);
    } catch (const std::exception& e) {
      CsvTable cell;
      cell.header = {"f_max", "tau_z", "tau_m", "accuracy", "seconds",
                     "status"};
      cell.rows.push_back({std::to_string(c.f), std::to_string(c.z),
                           std::to_string(c.m), "nan", "0",
                           std::string("error: ") + e.what()});
      cell.save(c.csv);
    }
  };

  if (jobs <= 1) {
    for (const auto& c : cells) run_inline(c);
  } else {
    // cells run in separate worker processes, outputs merged afterwards
    size_t next = 0;
    int running = 0;
    while (next < cells.size() || running > 0) {
      while (running < jobs && next < cells.size()) {
        const Cell& c = cells[next++];
        pid_t pid = fork();
        if (pid == 0) {
          std::vector<std::string> args = {self_exe, "sweep-cell",
                                           "--f_max", std::to_string(c.f),
                                           "--tau_z", std::to_string(c.z),
                                           "--tau_m", std::to_string(c.m),
                                           "--cell-csv", c.csv};
          if (!config_path.empty()) {
            args.push_back("--config");
            args.push_back(config_path);
          }
          for (const auto& o : overrides) {
            args.push_back("--set");
            args.push_back(o);
          }
          std::vector<char*> argv;
          for (auto& a : args) argv.push_back(a.data());
          argv.push_back(nullptr);
          execv(self_exe.c_str(), argv.data());
          _exit(2);
        }
        ++running;
      }
      int status = 0;
      if (wait(&status) > 0) --running;
    }
    for (const auto& c : cells)
      if (!fs::exists(c.csv)) {
        CsvTable cell;
        cell.header = {"f_max", "tau_z", "tau_m", "accuracy", "seconds",
                       "status"};
        cell.rows.push_back({std::to_string(c.f), std::to_string(c.z),
                             std::to_string(c.m), "nan", "0",
                             "error: worker died"});
        cell.save(c.csv);
      }
  }

  CsvTable merged;
  merged.header = {"f_max", "tau_z", "tau_m", "accuracy", "seconds", "status"};
  for (const auto& c : cells) {
    CsvTable cell = CsvTable::load(c.csv);
    for (auto& r : cell.rows) merged.rows.push_back(r);
    fs::remove(c.csv);
  }
  merged.save(out_dir + "/sweep.csv");
  std::cout << "sweep finished: " << merged.rows.size() << " cells -> "
            << out_dir << "/sweep.csv\n";
  return 0;
}

int cmd_report(const std::string& run_dir) {
  fs::create_directories(run_dir + "/plots");
  bool any = false;
  if (fs::exists(run_dir + "/accuracy.csv")) {
    CsvTable acc = CsvTable::load(run_dir + "/accuracy.csv");
    any = true;
    // accuracy vs difficulty per task; clean points plot at difficulty 0
    std::map<std::string, SvgSeries> per_task;
    for (const auto& r : acc.rows) {
      auto& s = per_task[r[1]];
      s.label = r[1];
      s.x.push_back(r[1] == "clean" ? 0.0 : std::stod(r[2]));
      s.y.push_back(std::stod(r[5]));
    }
    if (!per_task.empty()) {
      std::vector<SvgSeries> series;
      for (auto& [k, v] : per_task) series.push_back(v);
      write_svg_lines(run_dir + "/plots/accuracy_vs_difficulty.svg",
                      "Probe accuracy vs difficulty", "difficulty",
                      "accuracy", series);
    }
  }
  if (fs::exists(run_dir + "/training_log.csv")) {
    CsvTable log = CsvTable::load(run_dir + "/training_log.csv");
    any = true;
    std::map<std::string, SvgSeries> flips, scores;
    for (const auto& r : log.rows) {
      auto& f = flips[r[1]];
      f.label = r[1];
      f.x.push_back(std::stod(r[0]));
      f.y.push_back(std::stod(r[2]));
      auto& s = scores[r[1]];
      s.label = r[1];
      s.x.push_back(std::stod(r[0]));
      s.y.push_back(std::stod(r[3]));
    }
    std::vector<SvgSeries> fs_, ss_;
    for (auto& [k, v] : flips) fs_.push_back(v);
    for (auto& [k, v] : scores) ss_.push_back(v);
    if (!fs_.empty()) {
      write_svg_lines(run_dir + "/plots/rewiring_flips.svg",
                      "Rewiring flips per step", "training pattern", "flips",
                      fs_);
      write_svg_lines(run_dir + "/plots/rewiring_score.svg",
                      "Mean patch score per step", "training pattern",
                      "score", ss_);
    }
  }
  if (fs::exists(run_dir + "/sweep.csv")) {
    CsvTable sw = CsvTable::load(run_dir + "/sweep.csv");
    // one heatmap (tau_m x tau_z) per f_max
    std::map<double, std::map<std::pair<double, double>, double>> grids;
    for (const auto& r : sw.rows) {
      if (r[5] != "ok") continue;
      grids[std::stod(r[0])][{std::stod(r[2]), std::stod(r[1])}] =
          std::stod(r[3]);
    }
    for (auto& [fmax, cells] : grids) {
      std::vector<double> taums, tauzs;
      for (auto& [key, v] : cells) {
        taums.push_back(key.first);
        tauzs.push_back(key.second);
      }
      std::sort(taums.begin(), taums.end());
      taums.erase(std::unique(taums.begin(), taums.end()), taums.end());
      std::sort(tauzs.begin(), tauzs.end());
      tauzs.erase(std::unique(tauzs.begin(), tauzs.end()), tauzs.end());
      Eigen::MatrixXd grid(taums.size(), tauzs.size());
      grid.setZero();
      std::vector<std::string> rl, cl;
      for (double m : taums) rl.push_back("tau_m " + std::to_string(m));
      for (double z : tauzs) cl.push_back("tau_z " + std::to_string(z));
      for (size_t i = 0; i < taums.size(); ++i)
        for (size_t j = 0; j < tauzs.size(); ++j)
          if (cells.count({taums[i], tauzs[j]}))
            grid(i, j) = cells[{taums[i], tauzs[j]}];
      std::ostringstream name;
      name << run_dir << "/plots/sweep_fmax" << fmax << ".svg";
      write_svg_heatmap(name.str(), "Accuracy, f_max " + std::to_string(fmax),
                        rl, cl, grid);
    }
    any = true;
  }
  if (!any)
    throw ValidationError("no known CSV files found in " + run_dir);
  std::cout << "plots written to " << run_dir << "/plots\n";
  return 0;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Columnar BCPNN spiking associative-memory simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, resume_path, ckpt_path, dataset = "clean";
  std::string task_dir, run_dir, cell_csv;
  std::vector<std::string> overrides;
  std::string difficulties = "0.2,0.4,0.6,0.8,1.0";
  bool force = false, raster = false, dump_rf = false;
  int jobs = 1;
  double cell_f = 0, cell_z = 0, cell_m = 0;
  std::string fmax_list = "20,50,100,200,500,1000";
  std::string tauz_list = "0.001,0.002,0.005,0.010,0.020,0.050,0.100";
  std::string taum_list = "0.001,0.002,0.005,0.010,0.020";

  auto add_cfg_opts = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (key=value lines)");
    cmd->add_option("--set,-s", overrides,
                    "config override key=value (repeatable)");
    cmd->add_option("--out-dir", out_dir, "output directory");
  };

  CLI::App* gen = app.add_subcommand("gen-tasks",
                                     "generate the corrupted task datasets");
  add_cfg_opts(gen);
  gen->add_option("--difficulties", difficulties, "comma list of levels");

  CLI::App* train = app.add_subcommand("train", "train a model variant");
  add_cfg_opts(train);
  train->add_flag("--force", force, "overwrite an existing checkpoint");
  train->add_option("--resume", resume_path, "continue from a checkpoint");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_cfg_opts(eval);
  eval->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
  eval->add_option("--dataset", dataset,
                   "clean | completion | rivalry | distortion | all");
  eval->add_option("--task-dir", task_dir,
                   "read task sets from IDX files instead of regenerating");
  eval->add_option("--difficulties", difficulties, "comma list of levels");
  eval->add_flag("--raster", raster, "dump spike rasters");
  eval->add_flag("--dump-rf", dump_rf, "dump receptive-field masks (PGM)");

  CLI::App* sweep = app.add_subcommand("sweep",
                                       "train/eval a f_max x tau_z x tau_m grid");
  add_cfg_opts(sweep);
  sweep->add_option("--fmax-grid", fmax_list, "comma list of f_max (Hz)");
  sweep->add_option("--tauz-grid", tauz_list, "comma list of tau_z (s)");
  sweep->add_option("--taum-grid", taum_list, "comma list of tau_m (s)");
  sweep->add_option("--jobs", jobs, "parallel worker processes");

  CLI::App* cell = app.add_subcommand("sweep-cell", "internal: one sweep cell");
  cell->group("");  // hidden
  add_cfg_opts(cell);
  cell->add_option("--f_max", cell_f)->required();
  cell->add_option("--tau_z", cell_z)->required();
  cell->add_option("--tau_m", cell_m)->required();
  cell->add_option("--cell-csv", cell_csv)->required();

  CLI::App* report = app.add_subcommand("report", "render run CSVs as SVG");
  report->add_option("--run-dir", run_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = build_config(config_path, overrides);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    Eigen::setNbThreads(cfg.n_threads);
    if (gen->parsed())
      return cmd_gen_tasks(cfg,
                           out_dir.empty() ? cfg.resolved_data_dir() + "/tasks"
                                           : out_dir,
                           parse_list(difficulties));
    if (train->parsed()) return cmd_train(cfg, resume_path, force);
    if (eval->parsed())
      return cmd_eval(config_path, overrides, out_dir, ckpt_path, dataset,
                      task_dir, parse_list(difficulties), raster, dump_rf);
    if (sweep->parsed())
      return cmd_sweep(cfg, parse_list(fmax_list), parse_list(tauz_list),
                       parse_list(taum_list), jobs, argv[0], config_path,
                       overrides);
    if (cell->parsed())
      return run_sweep_cell(cfg, cell_f, cell_z, cell_m, cell_csv);
    if (report->parsed()) return cmd_report(run_dir);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
