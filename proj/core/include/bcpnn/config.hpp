#pragma once

#include <map>
#include <string>
#include <vector>

#include "bcpnn/schedule.hpp"

namespace bcpnn {

// Flat key=value run configuration. Keys follow the protocol symbol names
// (H_HID, tau_z, N_intv, ...) so the parameter tables double as the config
// reference. Every field carries the default for the SpspkFull model; a
// `variant=` line loads one of the six presets before other keys apply.
struct RunConfig {
  std::string variant = "SpspkFull";
  bool custom = false;  // set when any preset-covered key was overridden

  // network architecture
  int H_INP = 784, M_INP = 2;
  int H_HID = 100, M_HID = 100;
  int H_INPRC = 784, M_INPRC = 2;
  int N_conn_ffwd = 78;
  int N_conn_rec = 100;
  int N_conn_fb = 10;

  // neural and synaptic constants
  std::string activity = "spiking";  // rate | spiking
  std::string architecture = "full";  // ff | full
  double f_max = 100.0;
  double tau_zi = 0.020, tau_zj = 0.020;
  double tau_m = 0.005;
  double tau_p = 5.0;
  double eps = 1e-8;

  // stimulation protocol
  double dt = 0.001;
  double T_spk = 0.001;
  double T_no_input = 0.100;
  double T_ffwd = 0.100;
  double T_overlap = 0.050;
  double T_recl = 0.150;

  // data setup
  long N_train = 60000;
  long N_test = 10000;
  int N_epoch = 20;
  int N_intv = 200;  // training patterns between rewiring steps
  int N_flip = 100;  // flip budget per rewiring step

  // run plumbing
  uint64_t seed = 1;
  std::string data_dir;  // falls back to $BCPNN_DATA_DIR, then ./data
  std::string out_dir = "runs/out";
  std::string snapshot_offsets = "auto";  // "auto" or comma list of ms
  int eval_batch = 0;  // 0 = pick by activity mode
  int n_threads = 2;

  ModelVariant to_variant() const;
  void apply_variant_preset(const std::string& name);
  std::vector<int> snapshot_offset_steps() const;  // from pattern onset
  std::string resolved_data_dir() const;

  std::string serialize() const;
  // Identity of the trained model: the serialized config without run
  // plumbing (paths, dataset-scale flags, epochs, batching, threads).
  std::string model_signature() const;
  static RunConfig parse(const std::string& text);
  static RunConfig from_file(const std::string& path);
  // Applies one key=value assignment; throws on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  bool operator==(const RunConfig& other) const {
    return serialize() == other.serialize();
  }
};

}  // namespace bcpnn
