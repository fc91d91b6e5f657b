#include "bcpnn/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcpnn {

ModelVariant RunConfig::to_variant() const {
  ModelVariant v;
  v.name = variant + (custom ? " (custom)" : "");
  if (activity == "rate")
    v.activity = Activity::rate;
  else if (activity == "spiking")
    v.activity = Activity::spiking;
  else
    throw std::invalid_argument("activity must be rate or spiking");
  if (architecture == "ff")
    v.architecture = Architecture::feedforward_only;
  else if (architecture == "full")
    v.architecture = Architecture::full;
  else
    throw std::invalid_argument("architecture must be ff or full");
  v.f_max = f_max;
  v.tau_zi = tau_zi;
  v.tau_zj = tau_zj;
  v.tau_m = tau_m;
  v.T_no_input = T_no_input;
  v.T_ffwd = T_ffwd;
  v.T_overlap = T_overlap;
  v.T_recl = T_recl;
  v.validate();
  return v;
}

void RunConfig::apply_variant_preset(const std::string& name) {
  ModelVariant v = variant_preset(name);
  variant = name;
  custom = false;
  activity = v.activity == Activity::rate ? "rate" : "spiking";
  architecture = v.architecture == Architecture::full ? "full" : "ff";
  f_max = v.f_max;
  tau_zi = v.tau_zi;
  tau_zj = v.tau_zj;
  tau_m = v.tau_m;
  T_no_input = v.T_no_input;
  T_ffwd = v.T_ffwd;
  T_overlap = v.T_overlap;
  T_recl = v.T_recl;
}

std::vector<int> RunConfig::snapshot_offset_steps() const {
  std::vector<int> steps;
  auto push_unique = [&steps](int s) {
    for (int x : steps)
      if (x == s) return;
    steps.push_back(s);
  };
  if (snapshot_offsets == "auto") {
    int ffwd = static_cast<int>(std::llround(T_ffwd / dt));
    int full = static_cast<int>(
        std::llround((T_ffwd + T_overlap + T_recl) / dt));
    if (ffwd > 0) push_unique(ffwd);
    if (full > 0) push_unique(full);
  } else {
    std::stringstream ss(snapshot_offsets);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      double ms = std::stod(tok);
      push_unique(static_cast<int>(std::llround(ms * 1e-3 / dt)));
    }
  }
  return steps;
}

std::string RunConfig::resolved_data_dir() const {
  if (!data_dir.empty()) return data_dir;
  if (const char* env = std::getenv("BCPNN_DATA_DIR")) return env;
  return "data";
}

static std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os << "variant=" << variant << "\n";
  os << "custom=" << (custom ? 1 : 0) << "\n";
  os << "activity=" << activity << "\n";
  os << "architecture=" << architecture << "\n";
  os << "H_INP=" << H_INP << "\nM_INP=" << M_INP << "\n";
  os << "H_HID=" << H_HID << "\nM_HID=" << M_HID << "\n";
  os << "H_INPRC=" << H_INPRC << "\nM_INPRC=" << M_INPRC << "\n";
  os << "N_conn_ffwd=" << N_conn_ffwd << "\n";
  os << "N_conn_rec=" << N_conn_rec << "\n";
  os << "N_conn_fb=" << N_conn_fb << "\n";
  os << "f_max=" << fmt(f_max) << "\n";
  os << "tau_zi=" << fmt(tau_zi) << "\ntau_zj=" << fmt(tau_zj) << "\n";
  os << "tau_m=" << fmt(tau_m) << "\ntau_p=" << fmt(tau_p) << "\n";
  os << "eps=" << fmt(eps) << "\n";
  os << "dt=" << fmt(dt) << "\nT_spk=" << fmt(T_spk) << "\n";
  os << "T_no_input=" << fmt(T_no_input) << "\nT_ffwd=" << fmt(T_ffwd) << "\n";
  os << "T_overlap=" << fmt(T_overlap) << "\nT_recl=" << fmt(T_recl) << "\n";
  os << "N_train=" << N_train << "\nN_test=" << N_test << "\n";
  os << "N_epoch=" << N_epoch << "\n";
  os << "N_intv=" << N_intv << "\nN_flip=" << N_flip << "\n";
  os << "seed=" << seed << "\n";
  os << "data_dir=" << data_dir << "\n";
  os << "out_dir=" << out_dir << "\n";
  os << "snapshot_offsets=" << snapshot_offsets << "\n";
  os << "eval_batch=" << eval_batch << "\n";
  os << "n_threads=" << n_threads << "\n";
  return os.str();
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto as_int = [&value, &key]() {
    size_t pos = 0;
    long v = std::stol(value, &pos);
    if (pos != value.size())
      throw std::invalid_argument("bad integer for " + key + ": " + value);
    return v;
  };
  auto as_double = [&value, &key]() {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size())
      throw std::invalid_argument("bad number for " + key + ": " + value);
    return v;
  };
  bool preset_field = true;
  if (key == "variant") {
    apply_variant_preset(value);
    return;
  } else if (key == "activity") {
    activity = value;
  } else if (key == "architecture") {
    architecture = value;
  } else if (key == "f_max") {
    f_max = as_double();
  } else if (key == "tau_z") {
    tau_zi = tau_zj = as_double();
  } else if (key == "tau_zi") {
    tau_zi = as_double();
  } else if (key == "tau_zj") {
    tau_zj = as_double();
  } else if (key == "tau_m") {
    tau_m = as_double();
  } else if (key == "T_no_input") {
    T_no_input = as_double();
  } else if (key == "T_ffwd") {
    T_ffwd = as_double();
  } else if (key == "T_overlap") {
    T_overlap = as_double();
  } else if (key == "T_recl") {
    T_recl = as_double();
  } else {
    preset_field = false;
  }
  if (preset_field) {
    custom = true;
    return;
  }

  if (key == "custom")
    custom = as_int() != 0;
  else if (key == "H_INP")
    H_INP = static_cast<int>(as_int());
  else if (key == "M_INP")
    M_INP = static_cast<int>(as_int());
  else if (key == "H_HID")
    H_HID = static_cast<int>(as_int());
  else if (key == "M_HID")
    M_HID = static_cast<int>(as_int());
  else if (key == "H_INPRC")
    H_INPRC = static_cast<int>(as_int());
  else if (key == "M_INPRC")
    M_INPRC = static_cast<int>(as_int());
  else if (key == "N_conn_ffwd")
    N_conn_ffwd = static_cast<int>(as_int());
  else if (key == "N_conn_rec")
    N_conn_rec = static_cast<int>(as_int());
  else if (key == "N_conn_fb")
    N_conn_fb = static_cast<int>(as_int());
  else if (key == "tau_p")
    tau_p = as_double();
  else if (key == "eps")
    eps = as_double();
  else if (key == "dt")
    dt = as_double();
  else if (key == "T_spk")
    T_spk = as_double();
  else if (key == "N_train")
    N_train = as_int();
  else if (key == "N_test")
    N_test = as_int();
  else if (key == "N_epoch")
    N_epoch = static_cast<int>(as_int());
  else if (key == "N_intv")
    N_intv = static_cast<int>(as_int());
  else if (key == "N_flip")
    N_flip = static_cast<int>(as_int());
  else if (key == "seed")
    seed = std::stoull(value);
  else if (key == "data_dir")
    data_dir = value;
  else if (key == "out_dir")
    out_dir = value;
  else if (key == "snapshot_offsets")
    snapshot_offsets = value;
  else if (key == "eval_batch")
    eval_batch = static_cast<int>(as_int());
  else if (key == "n_threads")
    n_threads = static_cast<int>(as_int());
  else
    throw std::invalid_argument("unknown config key: " + key);
}

std::string RunConfig::model_signature() const {
  RunConfig c = *this;
  c.out_dir.clear();
  c.data_dir.clear();
  c.N_train = 0;
  c.N_test = 0;
  c.N_epoch = 0;
  c.eval_batch = 0;
  c.n_threads = 0;
  c.snapshot_offsets = "auto";
  return c.serialize();
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  cfg.apply_variant_preset("SpspkFull");
  std::istringstream is(text);
  std::string line;
  bool explicit_custom = false;
  bool custom_value = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config lines must be key=value: " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "custom") {
      explicit_custom = true;
      custom_value = value != "0";
      continue;
    }
    cfg.set(key, value);
  }
  // a round-tripped echo restores the recorded flag
  if (explicit_custom) cfg.custom = custom_value;
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

}  // namespace bcpnn
