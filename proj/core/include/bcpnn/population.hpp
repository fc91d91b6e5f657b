#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bcpnn/rng.hpp"
#include "bcpnn/trace.hpp"

namespace bcpnn {

struct PopulationShape {
  int n_hypercolumns = 1;   // H
  int n_minicolumns = 2;    // M per hypercolumn
  int units() const { return n_hypercolumns * n_minicolumns; }
  void validate() const;
};

// Per-hypercolumn softmax with max subtraction; writes probabilities in
// place. One column = one simulated pattern.
void softmax_hypercolumn(const Eigen::Ref<const Eigen::VectorXd>& v,
                         const PopulationShape& shape,
                         Eigen::Ref<Eigen::VectorXd> pi);

// Log-intensity currents for a binary ON/OFF pixel population. Pixel j maps
// to minicolumns 2j (ON, log u) and 2j+1 (OFF, log(1-u)), both clipped at
// -10 nats.
constexpr double kInputCurrentFloor = -10.0;
Eigen::VectorXd inject_image(const Eigen::Ref<const Eigen::VectorXd>& pixels);

// A modular grid of minicolumn units holding membrane voltages, softmax
// activations, emitted activity and the shared per-unit z-traces. State is
// kept per batch column so evaluation can run many patterns in lockstep.
class Population {
 public:
  Population(std::string name, int id, PopulationShape shape, double tau_m,
             double dt);

  const std::string& name() const { return name_; }
  int id() const { return id_; }
  const PopulationShape& shape() const { return shape_; }
  int units() const { return shape_.units(); }
  int batch() const { return static_cast<int>(v_.cols()); }
  double tau_m() const { return tau_m_; }

  // Registers a shared unit trace for a filter constant; projections using
  // the same tau_z reuse the same trace. Returns the trace slot index.
  int add_trace(double tau_z);
  int trace_index(double tau_z) const;
  int n_traces() const { return static_cast<int>(traces_.size()); }
  double trace_tau(int slot) const { return traces_[slot].tau_z; }

  void set_batch(int n_cols);
  void reset_state();

  // v' = v + (dt/tau_m)(support - v)
  void update_voltage(const Eigen::Ref<const Eigen::MatrixXd>& support);
  void softmax();

  // Emits the per-step activity: the softmax output itself (rate mode) or
  // Bernoulli spikes with probability pi*mu_spk. step_keys holds one RNG
  // timestep key per batch column.
  void emit(bool spiking, const SpikeScale& scale, uint64_t seed,
            const std::vector<uint64_t>& step_keys);

  // z += (dt/tau_z)(act/mu_spk - z) for every registered trace; values below
  // the snap threshold become exact zeros so downstream sparse paths can
  // skip them.
  void update_traces(const SpikeScale& scale, bool spiking);

  const Eigen::MatrixXd& voltage() const { return v_; }
  Eigen::MatrixXd& voltage() { return v_; }
  const Eigen::MatrixXd& activation() const { return pi_; }
  const Eigen::MatrixXd& activity() const { return act_; }
  const Eigen::MatrixXd& trace(int slot) const { return traces_[slot].z; }
  Eigen::MatrixXd& trace(int slot) { return traces_[slot].z; }
  const std::vector<int>& spike_list(int col) const { return spikes_[col]; }

  static constexpr double kSnapThreshold = 1e-9;

 private:
  struct UnitTrace {
    double tau_z;
    Eigen::MatrixXd z;  // units x batch
  };

  std::string name_;
  int id_;
  PopulationShape shape_;
  double tau_m_;
  double dt_;
  Eigen::MatrixXd v_, pi_, act_;
  std::vector<UnitTrace> traces_;
  std::vector<std::vector<int>> spikes_;  // per-column spike lists
};

}  // namespace bcpnn
