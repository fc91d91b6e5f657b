#include "bcpnn/schedule.hpp"

#include <cmath>

namespace bcpnn {

void ModelVariant::validate() const {
  if (activity == Activity::spiking && !(f_max > 0.0))
    throw std::invalid_argument("spiking variant needs f_max > 0");
  if (architecture == Architecture::feedforward_only &&
      (T_overlap != 0.0 || T_recl != 0.0))
    throw std::invalid_argument(
        "feedforward-only variants must have T_overlap = T_recl = 0");
}

ModelVariant variant_preset(const std::string& name) {
  ModelVariant v;
  v.name = name;
  if (name == "RateFf" || name == "RateFull") {
    v.activity = Activity::rate;
    v.f_max = 0.0;
    v.tau_zi = v.tau_zj = 0.001;
    v.tau_m = 0.001;
    v.T_no_input = 0.0;
    v.T_ffwd = 0.005;
    v.T_overlap = 0.0;
    v.T_recl = (name == "RateFull") ? 0.020 : 0.0;
  } else if (name == "SpkFf" || name == "SpkFull") {
    v.activity = Activity::spiking;
    v.f_max = 1000.0;
    v.tau_zi = v.tau_zj = 0.005;
    v.tau_m = 0.001;
    v.T_no_input = 0.025;
    v.T_ffwd = 0.025;
    v.T_overlap = (name == "SpkFull") ? 0.025 : 0.0;
    v.T_recl = (name == "SpkFull") ? 0.050 : 0.0;
  } else if (name == "SpspkFf" || name == "SpspkFull") {
    v.activity = Activity::spiking;
    v.f_max = 100.0;
    v.tau_zi = v.tau_zj = 0.020;
    v.tau_m = 0.005;
    v.T_no_input = 0.100;
    v.T_ffwd = 0.100;
    v.T_overlap = (name == "SpspkFull") ? 0.050 : 0.0;
    v.T_recl = (name == "SpspkFull") ? 0.150 : 0.0;
  } else {
    throw std::invalid_argument("unknown variant preset: " + name);
  }
  v.architecture = (name.size() >= 4 && name.substr(name.size() - 4) == "Full")
                       ? Architecture::full
                       : Architecture::feedforward_only;
  return v;
}

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {
      "RateFf", "RateFull", "SpkFf", "SpkFull", "SpspkFf", "SpspkFull"};
  return names;
}

static int duration_steps(double T, double dt) {
  return static_cast<int>(std::llround(T / dt));
}

int PhaseSchedule::total_steps() const {
  int n = 0;
  for (const auto& p : phases) n += p.steps;
  return n;
}

int PhaseSchedule::steps_after_onset() const {
  int n = 0;
  for (const auto& p : phases)
    if (p.name != "no-input") n += p.steps;
  return n;
}

bool PhaseSchedule::any_learning() const {
  for (const auto& p : phases)
    if (p.ffwd.learn || p.recurrent.learn || p.feedback.learn) return true;
  return false;
}

PhaseSchedule make_train_schedule(const ModelVariant& v, double dt) {
  PhaseSchedule s;
  Phase no_input{"no-input", v.T_no_input, duration_steps(v.T_no_input, dt),
                 false, {}, {}, {}};
  Phase ffwd{"ffwd", v.T_ffwd, duration_steps(v.T_ffwd, dt), true, {}, {}, {}};
  ffwd.ffwd = {true, true};
  if (v.full()) {
    ffwd.recurrent = {false, true};
    ffwd.feedback = {false, true};
  }
  s.phases = {no_input, ffwd};
  return s;
}

PhaseSchedule make_eval_schedule(const ModelVariant& v, double dt) {
  PhaseSchedule s;
  Phase no_input{"no-input", v.T_no_input, duration_steps(v.T_no_input, dt),
                 false, {}, {}, {}};
  Phase ffwd{"ffwd", v.T_ffwd, duration_steps(v.T_ffwd, dt), true, {}, {}, {}};
  ffwd.ffwd = {true, false};
  if (v.full()) ffwd.feedback = {true, false};
  s.phases = {no_input, ffwd};
  if (v.full()) {
    Phase overlap{"overlap", v.T_overlap, duration_steps(v.T_overlap, dt),
                  true, {}, {}, {}};
    overlap.ffwd = {true, false};
    overlap.recurrent = {true, false};
    overlap.feedback = {true, false};
    Phase recl{"recl", v.T_recl, duration_steps(v.T_recl, dt), false, {}, {},
               {}};
    recl.recurrent = {true, false};
    recl.feedback = {true, false};
    s.phases.push_back(overlap);
    s.phases.push_back(recl);
  }
  return s;
}

}  // namespace bcpnn
