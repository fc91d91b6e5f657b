#include "bcpnn/network.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace bcpnn {

namespace {
// Offset separating eval spike streams from the training stream.
constexpr uint64_t kEvalStepBase = 1ULL << 40;
}  // namespace

Network::Network(const RunConfig& cfg) : cfg_(cfg), variant_(cfg.to_variant()) {
  if (cfg_.H_INP != cfg_.H_INPRC || cfg_.M_INP != cfg_.M_INPRC)
    throw std::invalid_argument("INP and INPRC must share the input shape");
  if (cfg_.M_INP != 2)
    throw std::invalid_argument("image injection needs ON/OFF pixel pairs");

  scale_ = variant_.spiking() ? SpikeScale{variant_.f_max, cfg_.dt}
                              : SpikeScale{1.0 / cfg_.dt, cfg_.dt};
  scale_.validate();

  inp_ = std::make_unique<Population>(
      "INP", 0, PopulationShape{cfg_.H_INP, cfg_.M_INP}, variant_.tau_m,
      cfg_.dt);
  hid_ = std::make_unique<Population>(
      "HID", 1, PopulationShape{cfg_.H_HID, cfg_.M_HID}, variant_.tau_m,
      cfg_.dt);

  Projection::Options fopt;
  fopt.name = "ffwd";
  fopt.n_conn = cfg_.N_conn_ffwd;
  fopt.tau_zi = variant_.tau_zi;
  fopt.tau_zj = variant_.tau_zj;
  fopt.tau_p = cfg_.tau_p;
  fopt.eps = cfg_.eps;
  fopt.dt = cfg_.dt;
  fopt.rewire = true;
  ffwd_ = std::make_unique<Projection>(0, *inp_, *hid_, fopt, cfg_.seed);

  if (variant_.full()) {
    inprc_ = std::make_unique<Population>(
        "INPRC", 2, PopulationShape{cfg_.H_INPRC, cfg_.M_INPRC},
        variant_.tau_m, cfg_.dt);
    Projection::Options ropt = fopt;
    ropt.name = "recurrent";
    ropt.n_conn = cfg_.N_conn_rec;
    ropt.rewire = false;  // fully connected by default; Figs. show only
                          // feedforward and feedback rewiring
    rec_ = std::make_unique<Projection>(1, *hid_, *hid_, ropt, cfg_.seed);
    Projection::Options bopt = fopt;
    bopt.name = "feedback";
    bopt.n_conn = cfg_.N_conn_fb;
    bopt.rewire = true;
    fb_ = std::make_unique<Projection>(2, *hid_, *inprc_, bopt, cfg_.seed);
  }

  train_sched_ = make_train_schedule(variant_, cfg_.dt);
  eval_sched_ = make_eval_schedule(variant_, cfg_.dt);
  snapshot_steps_ = cfg_.snapshot_offset_steps();
  validate_offsets(snapshot_steps_, eval_sched_);

  // Propagation path: event-driven sums pay one column add per spike, the
  // dense path one matrix product per step. Expected spikes per step is
  // H*mu_spk (softmax mass is 1 per hypercolumn).
  auto pick_path = [this](Projection& p) {
    double expected = p.pre().shape().n_hypercolumns * scale_.mu_spk();
    bool event = variant_.spiking() && expected < p.pre().units() / 8.0;
    p.configure_propagation(event ? Projection::PropagationPath::event
                                  : Projection::PropagationPath::dense,
                            scale_.mu_spk());
  };
  pick_path(*ffwd_);
  if (rec_) pick_path(*rec_);
  if (fb_) pick_path(*fb_);

  set_batch(1);
  refresh_all_parameters();
}

void Network::validate_offsets(const std::vector<int>& offsets,
                               const PhaseSchedule& sched) const {
  for (int s : offsets)
    if (s <= 0 || s > sched.steps_after_onset())
      throw std::invalid_argument("snapshot offset outside the schedule");
}

void Network::set_batch(int b) {
  inp_->set_batch(b);
  hid_->set_batch(b);
  if (inprc_) inprc_->set_batch(b);
  ffwd_->reset_support(b);
  if (rec_) rec_->reset_support(b);
  if (fb_) fb_->reset_support(b);
  ext_current_.setZero(inp_->units(), b);
  sup_inp_.setZero(inp_->units(), b);
  sup_hid_.setZero(hid_->units(), b);
  if (inprc_) sup_inprc_.setZero(inprc_->units(), b);
}

void Network::refresh_all_parameters() {
  ffwd_->ensure_weights();
  if (rec_) rec_->ensure_weights();
  if (fb_) fb_->ensure_weights();
}

const Eigen::MatrixXd& Network::last_support(const Population& pop) const {
  if (&pop == inp_.get()) return sup_inp_;
  if (&pop == hid_.get()) return sup_hid_;
  return sup_inprc_;
}

void Network::assemble_supports(const Phase& phase) {
  // Gated dense-path supports are recomputed on read; supports of event-path
  // projections track the traces incrementally in step().
  auto contribution = [](Projection& p) -> const Eigen::MatrixXf& {
    if (p.propagation_path() == Projection::PropagationPath::dense)
      p.step_support();
    return p.support();
  };

  // INP: external current only; a uniform bias would cancel in the softmax.
  sup_inp_.setZero();
  if (phase.input_on) sup_inp_ = ext_current_;

  // HID: bias from its primary afferent projection, counted once.
  sup_hid_.colwise() = ffwd_->bias();
  if (phase.ffwd.propagate) sup_hid_ += contribution(*ffwd_).cast<double>();
  if (rec_ && phase.recurrent.propagate)
    sup_hid_ += contribution(*rec_).cast<double>();

  if (inprc_) {
    sup_inprc_.colwise() = fb_->bias();
    if (phase.input_on) sup_inprc_ += ext_current_;
    if (phase.feedback.propagate)
      sup_inprc_ += contribution(*fb_).cast<double>();
  }
}

void Network::step(const Phase& phase, RunMode mode,
                   const std::vector<uint64_t>& step_keys) {
  assemble_supports(phase);
  if (step_observer_) step_observer_(phase);

  inp_->update_voltage(sup_inp_);
  hid_->update_voltage(sup_hid_);
  if (inprc_) inprc_->update_voltage(sup_inprc_);

  inp_->softmax();
  hid_->softmax();
  if (inprc_) inprc_->softmax();

  const bool spk = variant_.spiking();
  inp_->emit(spk, scale_, cfg_.seed, step_keys);
  hid_->emit(spk, scale_, cfg_.seed, step_keys);
  if (inprc_) inprc_->emit(spk, scale_, cfg_.seed, step_keys);

  inp_->update_traces(scale_, spk);
  hid_->update_traces(scale_, spk);
  if (inprc_) inprc_->update_traces(scale_, spk);

  auto advance_event = [&](Projection* p, bool used) {
    if (p && used && p->propagation_path() == Projection::PropagationPath::event)
      p->step_support();
  };
  // in training only the feedforward projection ever propagates
  advance_event(ffwd_.get(), true);
  advance_event(rec_.get(), mode == RunMode::eval);
  advance_event(fb_.get(), mode == RunMode::eval);

  if (mode == RunMode::train) {
    if (phase.ffwd.learn) ffwd_->learn_step();
    if (rec_ && phase.recurrent.learn) rec_->learn_step();
    if (fb_ && phase.feedback.learn) fb_->learn_step();
  }
}

RunSnapshot Network::run_pattern(
    const Eigen::Ref<const Eigen::VectorXd>& image, RunMode mode,
    bool want_snapshots) {
  const PhaseSchedule& sched =
      mode == RunMode::train ? train_sched_ : eval_sched_;
  std::vector<int> offsets;
  if (want_snapshots) {
    for (int s : snapshot_steps_)
      if (s <= sched.steps_after_onset()) offsets.push_back(s);
    if (mode == RunMode::eval) offsets = snapshot_steps_;
    validate_offsets(offsets, sched);
  }

  if (mode == RunMode::eval) {
    set_batch(1);  // evaluation starts from the cleared rest state
  } else {
    if (inp_->batch() != 1)
      set_batch(1);
    ffwd_->rebuild_support();  // weights changed at the last pattern end
  }
  ext_current_.col(0) = inject_image(image);

  RunSnapshot snap;
  snap.offsets = offsets;
  snap.inp.resize(offsets.size());
  snap.hid.resize(offsets.size());
  snap.inprc.resize(offsets.size());

  int onset_step = 0, since_onset = 0;
  std::vector<uint64_t> keys(1);
  for (const auto& phase : sched.phases) {
    for (int t = 0; t < phase.steps; ++t) {
      keys[0] = mode == RunMode::train
                    ? static_cast<uint64_t>(global_step_++)
                    : kEvalStepBase + static_cast<uint64_t>(onset_step);
      step(phase, mode, keys);
      ++onset_step;
      if (phase.name != "no-input") {
        ++since_onset;
        for (size_t k = 0; k < offsets.size(); ++k) {
          if (offsets[k] == since_onset) {
            snap.inp[k] = inp_->trace(ffwd_->pre_trace_slot()).col(0);
            snap.hid[k] = hid_->trace(hid_snapshot_slot()).col(0);
            if (inprc_)
              snap.inprc[k] = inprc_->trace(fb_->post_trace_slot()).col(0);
          }
        }
      }
    }
  }

  if (mode == RunMode::train) end_training_pattern();
  return snap;
}

void Network::end_training_pattern() {
  ++patterns_seen_;
  const bool spk = variant_.spiking();
  // spiking activity flushes per pattern while the active sets are small;
  // dense rate panels amortize the joint-matrix traffic over a fixed
  // pattern interval (weight reads see buffered panels either way)
  if (spk || patterns_seen_ % rate_flush_interval_ == 0) {
    ffwd_->flush_joint();
    if (rec_) rec_->flush_joint();
    if (fb_) fb_->flush_joint();
  }
  // weights and biases follow the traces once per pattern; feedback weights
  // are only read at rewiring and evaluation, its bias every step
  ffwd_->recompute_weights();
  if (fb_) fb_->recompute_bias();
}

void Network::maybe_rewire(TrainLog* log) {
  if (patterns_seen_ % cfg_.N_intv != 0) return;
  auto run = [&](Projection& p) {
    if (!p.options().rewire || p.fully_connected()) return;
    RewireResult r = p.rewire_step(cfg_.N_flip);
    if (log)
      log->rows.push_back(
          {patterns_seen_, p.name(), r.flips, r.score_mean, r.score_std});
  };
  run(*ffwd_);
  if (fb_) run(*fb_);
}

TrainLog Network::train(const Eigen::Ref<const Eigen::MatrixXd>& images,
                        int n_epochs,
                        const std::function<void(long, int)>& progress) {
  if (images.cols() == 0) throw std::invalid_argument("empty training set");
  TrainLog log;
  auto t0 = std::chrono::steady_clock::now();
  std::vector<int> order(images.cols());
  for (int e = epochs_done_; e < epochs_done_ + n_epochs; ++e) {
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng::Sequence shuffle_seq(cfg_.seed, rng::Stream::shuffle,
                              static_cast<uint64_t>(e));
    shuffle_seq.shuffle(order);
    for (int idx : order) {
      run_pattern(images.col(idx), RunMode::train, false);
      maybe_rewire(&log);
      if (progress) progress(patterns_seen_, e);
    }
    // epoch boundary: fold pending panels so checkpoints are cut cleanly
    ffwd_->flush_joint();
    if (rec_) rec_->flush_joint();
    if (fb_) fb_->flush_joint();
  }
  epochs_done_ += n_epochs;
  refresh_all_parameters();
  auto t1 = std::chrono::steady_clock::now();
  log.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return log;
}

int EvalResult::offset_index(int steps) const {
  for (size_t i = 0; i < offsets.size(); ++i)
    if (offsets[i] == steps) return static_cast<int>(i);
  throw std::out_of_range("no snapshot at requested offset");
}

EvalResult Network::evaluate(const Eigen::Ref<const Eigen::MatrixXd>& images,
                             const EvalOptions& opt) {
  EvalResult res;
  res.offsets = opt.offsets.empty() ? snapshot_steps_ : opt.offsets;
  validate_offsets(res.offsets, eval_sched_);

  const long n = images.cols();
  int batch = opt.batch > 0 ? opt.batch
              : cfg_.eval_batch > 0 ? cfg_.eval_batch
                                    : (variant_.spiking() ? 16 : 128);
  batch = static_cast<int>(std::min<long>(batch, n));

  for (size_t k = 0; k < res.offsets.size(); ++k) {
    res.inp.emplace_back(inp_->units(), n);
    res.hid.emplace_back(hid_->units(), n);
    if (inprc_) res.inprc.emplace_back(inprc_->units(), n);
  }

  // weights are fixed during evaluation; make sure they are current
  refresh_all_parameters();

  const int steps_per_pattern = eval_sched_.total_steps();
  std::vector<uint64_t> keys;
  for (long start = 0; start < n; start += batch) {
    int b = static_cast<int>(std::min<long>(batch, n - start));
    set_batch(b);
    for (int c = 0; c < b; ++c)
      ext_current_.col(c) = inject_image(images.col(start + c));
    keys.assign(b, 0);
    int step_idx = 0, since_onset = 0;
    for (const auto& phase : eval_sched_.phases) {
      for (int t = 0; t < phase.steps; ++t) {
        for (int c = 0; c < b; ++c)
          keys[c] = kEvalStepBase +
                    static_cast<uint64_t>(start + c) *
                        static_cast<uint64_t>(steps_per_pattern) +
                    static_cast<uint64_t>(step_idx);
        step(phase, RunMode::eval, keys);
        if (opt.raster && variant_.spiking()) {
          auto dump = [&](const Population& p) {
            for (int c = 0; c < b; ++c) {
              double t_ms =
                  (static_cast<double>(start + c) * steps_per_pattern +
                   step_idx + 1) *
                  cfg_.dt * 1e3;
              for (int u : p.spike_list(c))
                (*opt.raster) << t_ms << ',' << p.name() << ',' << u << '\n';
            }
          };
          dump(*inp_);
          dump(*hid_);
          if (inprc_) dump(*inprc_);
        }
        ++step_idx;
        if (phase.name != "no-input") {
          ++since_onset;
          for (size_t k = 0; k < res.offsets.size(); ++k) {
            if (res.offsets[k] == since_onset) {
              res.inp[k].middleCols(start, b) =
                  inp_->trace(ffwd_->pre_trace_slot());
              res.hid[k].middleCols(start, b) =
                  hid_->trace(hid_snapshot_slot());
              if (inprc_)
                res.inprc[k].middleCols(start, b) =
                    inprc_->trace(fb_->post_trace_slot());
            }
          }
        }
      }
    }
  }
  return res;
}

void Network::restore_progress(long long global_step, long patterns_seen,
                               int epochs_done) {
  global_step_ = global_step;
  patterns_seen_ = patterns_seen;
  epochs_done_ = epochs_done;
}

}  // namespace bcpnn
