#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bcpnn/population.hpp"

namespace bcpnn {

using ConnMatrix =
    Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;  // receiver x sender

struct RewireResult {
  int flips = 0;
  double score_mean = 0.0;  // over active patches, after the step
  double score_std = 0.0;
};

// Greedy flip pass over frozen patch numerators: picks, across all
// receivers, the (silent, active) incoming pair with the largest positive
// score gap and swaps their roles, refreshing sender out-degrees after each
// flip. Scores are numerator / out-degree; a sender without active outgoing
// patches is evaluated with denominator 1.
int rewire_greedy(const Eigen::MatrixXd& numerators, ConnMatrix& conn,
                  std::vector<int>& out_degree, int n_flips,
                  std::vector<double>* flip_gains = nullptr);

// A directed bundle of hypercolumn-to-hypercolumn patches. Active patches
// propagate; silent patches only accumulate probe statistics. All
// minicolumn pairs of a patch share its gate.
class Projection {
 public:
  struct Options {
    std::string name;
    int n_conn = 1;
    double tau_zi = 0.020;
    double tau_zj = 0.020;
    double tau_p = 5.0;
    double eps = 1e-8;
    double dt = 1e-3;
    bool rewire = true;
  };

  Projection(int id, Population& pre, Population& post, const Options& opt,
             uint64_t seed);

  const std::string& name() const { return name_; }
  int id() const { return id_; }
  const Options& options() const { return opt_; }
  Population& pre() { return pre_; }
  Population& post() { return post_; }
  const Population& pre() const { return pre_; }
  const Population& post() const { return post_; }
  bool symmetric() const { return symmetric_; }
  int pre_trace_slot() const { return slot_pre_; }
  int post_trace_slot() const { return slot_post_; }

  // --- connectivity ---------------------------------------------------
  const ConnMatrix& connectivity() const { return conn_; }
  void set_connectivity(const ConnMatrix& conn);
  int in_degree(int receiver_hc) const;
  int out_degree(int sender_hc) const { return out_degree_[sender_hc]; }
  bool fully_connected() const;

  // --- plasticity -----------------------------------------------------
  // One Euler step of the long-term statistics, driven by the current unit
  // traces. Only called while the learn gate is open (batch column 0).
  void learn_step();
  // Folds buffered trace panels into the joint matrix. Called on a fixed
  // pattern cadence and before any read of the joint statistics.
  void flush_joint();
  bool has_pending_panels() const { return panel_cols_ > 0; }
  // Symmetric joints update only the lower triangle on the hot path; the
  // upper triangle is refreshed before any full-matrix read.
  void ensure_mirror();

  // Derives bias and the masked propagation weights from the traces.
  void recompute_weights();
  // Bias alone follows the (always current) post marginal; used by
  // populations whose afferent weights are not read every pattern.
  void recompute_bias();
  void mark_weights_dirty() { weights_dirty_ = true; }
  bool weights_dirty() const { return weights_dirty_; }
  void ensure_weights();

  const Eigen::VectorXd& bias() const { return bias_; }
  const Eigen::MatrixXf& weights() const { return w_prop_; }  // post x pre

  const Eigen::VectorXd& p_pre() const { return p_pre_; }
  const Eigen::VectorXd& p_post() const { return p_post_; }
  double p_joint(int pre_unit, int post_unit);
  Eigen::MatrixXd joint_matrix();  // post x pre, decays applied
  double weight(int pre_unit, int post_unit);  // unmasked, from traces

  // --- propagation ------------------------------------------------------
  enum class PropagationPath { dense, event };
  // The event path needs the spike jump of the shared pre trace,
  // (dt/tau_zi)/mu_spk.
  void configure_propagation(PropagationPath p, double mu_spk) {
    path_ = p;
    event_jump_ = (opt_.dt / opt_.tau_zi) / mu_spk;
  }
  PropagationPath propagation_path() const { return path_; }

  void reset_support(int batch);
  // Recomputes support = W * z_pre from scratch (pattern boundaries, weight
  // changes).
  void rebuild_support();
  // Advances the support one timestep after the pre population's traces
  // were updated. The event path folds the shared trace decay and the
  // spike jumps into the running sum instead of touching every synapse.
  void step_support();
  const Eigen::MatrixXf& support() const { return support_; }

  // --- structural plasticity -------------------------------------------
  // Normalized mutual-information numerator per (receiver, sender) patch.
  Eigen::MatrixXd patch_numerators();
  // Eq.-style normalized score; senders without active outgoing patches
  // score 0.
  double patch_score(int sender_hc, int receiver_hc);
  Eigen::MatrixXd patch_scores();
  // Greedy flips of (silent, active) incoming pairs by largest positive
  // score gap, in-degree preserving; sender denominators refresh after
  // each flip.
  RewireResult rewire_step(int n_flips);

  // --- bookkeeping -------------------------------------------------------
  long long learn_steps() const { return learn_steps_; }
  double joint_scale() const { return qscale_; }
  // raw accessors for checkpointing
  Eigen::MatrixXd& joint_storage() { return q_joint_; }
  Eigen::VectorXd& p_pre_storage() { return p_pre_; }
  Eigen::VectorXd& p_post_storage() { return p_post_; }
  ConnMatrix& conn_storage() { return conn_; }
  void restore_counters(long long learn_steps, double qscale);
  void init_traces_uniform();

 private:
  void append_panels();
  void flush_packed(const std::vector<int>& pre_rows,
                    const std::vector<int>& post_rows);
  void flush_full();
  void expand_mask_column(int pre_unit, Eigen::VectorXf& mask) const;

  std::string name_;
  int id_;
  Population& pre_;
  Population& post_;
  Options opt_;
  uint64_t seed_;
  bool symmetric_;
  int slot_pre_, slot_post_;
  int Ni_, Nj_, Hi_, Hj_, Mi_, Mj_;
  double gamma_;   // 1 - dt/tau_p
  double lambda_;  // dt/tau_p

  ConnMatrix conn_;  // Hj x Hi
  std::vector<int> out_degree_;

  Eigen::VectorXd p_pre_, p_post_;
  Eigen::MatrixXd q_joint_;  // Nj x Ni, true p = q * qscale_
  double qscale_ = 1.0;
  long long learn_steps_ = 0;
  bool mirror_dirty_ = false;

  // buffered z panels awaiting the joint update
  Eigen::MatrixXd pre_panel_, post_panel_;
  Eigen::VectorXd panel_coeff_;
  int panel_cols_ = 0;

  Eigen::VectorXd bias_;
  Eigen::MatrixXf w_prop_;  // Nj x Ni, masked by connectivity
  bool weights_dirty_ = true;

  PropagationPath path_ = PropagationPath::dense;
  double event_jump_ = 0.0;
  Eigen::MatrixXf support_;  // Nj x batch
  Eigen::MatrixXf z_pre_f_;  // scratch for the dense path
};

}  // namespace bcpnn
