#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bcpnn {

enum class Activity { rate, spiking };
enum class Architecture { feedforward_only, full };

// One of the six reference configurations, or a custom override of one.
struct ModelVariant {
  std::string name = "SpspkFull";
  Activity activity = Activity::spiking;
  Architecture architecture = Architecture::full;
  double f_max = 100.0;  // Hz; ignored for rate activity
  double tau_zi = 0.020;
  double tau_zj = 0.020;
  double tau_m = 0.005;
  double T_no_input = 0.100;
  double T_ffwd = 0.100;
  double T_overlap = 0.050;
  double T_recl = 0.150;

  bool spiking() const { return activity == Activity::spiking; }
  bool full() const { return architecture == Architecture::full; }
  void validate() const;
};

// The six models under comparison, keyed by name.
ModelVariant variant_preset(const std::string& name);
const std::vector<std::string>& variant_names();

struct ProjectionGate {
  bool propagate = false;
  bool learn = false;
};

struct Phase {
  std::string name;
  double duration = 0.0;  // s
  int steps = 0;
  bool input_on = false;
  ProjectionGate ffwd, recurrent, feedback;
};

struct PhaseSchedule {
  std::vector<Phase> phases;
  int total_steps() const;
  int steps_after_onset() const;  // steps following the no-input phase
  bool any_learning() const;
};

PhaseSchedule make_train_schedule(const ModelVariant& v, double dt);
PhaseSchedule make_eval_schedule(const ModelVariant& v, double dt);

}  // namespace bcpnn
