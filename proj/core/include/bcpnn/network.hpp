#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bcpnn/config.hpp"
#include "bcpnn/population.hpp"
#include "bcpnn/projection.hpp"
#include "bcpnn/schedule.hpp"

namespace bcpnn {

struct TrainLogRow {
  long pattern = 0;
  std::string projection;
  int flips = 0;
  double score_mean = 0.0;
  double score_std = 0.0;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;
  double wall_seconds = 0.0;
};

struct EvalOptions {
  int batch = 0;                    // 0: config / mode default
  std::vector<int> offsets;         // steps after pattern onset; empty: config
  std::ostream* raster = nullptr;   // "t_ms,population,unit_index" lines
};

// Per-offset z-trace captures for a set of patterns (one column each).
struct EvalResult {
  std::vector<int> offsets;
  std::vector<Eigen::MatrixXd> inp, hid, inprc;
  int offset_index(int steps) const;
};

struct RunSnapshot {
  std::vector<int> offsets;
  std::vector<Eigen::VectorXd> inp, hid, inprc;
};

enum class RunMode { train, eval };

// INP -> HID -> INPRC network with feedforward, recurrent and feedback
// projections, running the phase-gated protocol.
class Network {
 public:
  explicit Network(const RunConfig& cfg);

  const RunConfig& config() const { return cfg_; }
  const ModelVariant& variant() const { return variant_; }
  bool full() const { return variant_.full(); }
  bool spiking() const { return variant_.spiking(); }
  const SpikeScale& spike_scale() const { return scale_; }

  Population& inp() { return *inp_; }
  Population& hid() { return *hid_; }
  Population& inprc() { return *inprc_; }
  Projection& ffwd() { return *ffwd_; }
  Projection& recurrent() { return *rec_; }
  Projection& feedback() { return *fb_; }
  bool has_inprc() const { return inprc_ != nullptr; }

  const PhaseSchedule& train_schedule() const { return train_sched_; }
  const PhaseSchedule& eval_schedule() const { return eval_sched_; }

  // Runs one pattern in the given mode. Training mode consumes the pattern
  // for plasticity (p-trace updates in the ffwd phase, weight/bias refresh
  // at the end); eval mode starts from a cleared state and only observes.
  RunSnapshot run_pattern(const Eigen::Ref<const Eigen::VectorXd>& image,
                          RunMode mode, bool want_snapshots = true);

  // Full training protocol: shuffled pattern order per epoch, structural
  // plasticity every N_intv patterns on the rewiring projections.
  TrainLog train(const Eigen::Ref<const Eigen::MatrixXd>& images,
                 int n_epochs,
                 const std::function<void(long, int)>& progress = nullptr);

  EvalResult evaluate(const Eigen::Ref<const Eigen::MatrixXd>& images,
                      const EvalOptions& opt = {});

  // The per-population support assembled for the current step; exposed for
  // gating and bias accounting tests.
  const Eigen::MatrixXd& last_support(const Population& pop) const;

  // Invoked right after support assembly of every step; gives tests and
  // instrumentation a consistent view of the quantities a step reads.
  void set_step_observer(std::function<void(const Phase&)> obs) {
    step_observer_ = std::move(obs);
  }

  // checkpoint plumbing
  long long global_step() const { return global_step_; }
  long patterns_seen() const { return patterns_seen_; }
  int epochs_done() const { return epochs_done_; }
  void restore_progress(long long global_step, long patterns_seen,
                        int epochs_done);
  void refresh_all_parameters();

  // HID snapshots use the recurrent projection's presynaptic trace; the
  // feedforward post trace is the same filter for feedforward-only models.
  int hid_snapshot_slot() const {
    return rec_ ? rec_->pre_trace_slot() : ffwd_->post_trace_slot();
  }

 private:
  void validate_offsets(const std::vector<int>& offsets,
                        const PhaseSchedule& sched) const;
  void set_batch(int b);
  void assemble_supports(const Phase& phase);
  void step(const Phase& phase, RunMode mode,
            const std::vector<uint64_t>& step_keys);
  void end_training_pattern();
  void maybe_rewire(TrainLog* log);

  RunConfig cfg_;
  ModelVariant variant_;
  SpikeScale scale_;
  PhaseSchedule train_sched_, eval_sched_;
  std::vector<int> snapshot_steps_;

  std::unique_ptr<Population> inp_, hid_, inprc_;
  std::unique_ptr<Projection> ffwd_, rec_, fb_;

  Eigen::MatrixXd ext_current_;  // 2*H_INP x batch, for INP and INPRC
  Eigen::MatrixXd sup_inp_, sup_hid_, sup_inprc_;

  long long global_step_ = 0;
  long patterns_seen_ = 0;
  int epochs_done_ = 0;
  int rate_flush_interval_ = 32;
  std::function<void(const Phase&)> step_observer_;
};

}  // namespace bcpnn
