#include "bcpnn/population.hpp"

#include <cmath>
#include <stdexcept>

namespace bcpnn {

void PopulationShape::validate() const {
  if (n_hypercolumns < 1)
    throw std::invalid_argument("population needs at least one hypercolumn");
  if (n_minicolumns < 2)
    throw std::invalid_argument(
        "hypercolumns need at least two competing minicolumns");
}

void softmax_hypercolumn(const Eigen::Ref<const Eigen::VectorXd>& v,
                         const PopulationShape& shape,
                         Eigen::Ref<Eigen::VectorXd> pi) {
  const int M = shape.n_minicolumns;
  for (int h = 0; h < shape.n_hypercolumns; ++h) {
    auto vh = v.segment(h * M, M).array();
    auto ph = pi.segment(h * M, M).array();
    double vmax = vh.maxCoeff();
    ph = (vh - vmax).exp();
    ph /= ph.sum();
  }
}

Eigen::VectorXd inject_image(const Eigen::Ref<const Eigen::VectorXd>& pixels) {
  Eigen::VectorXd current(2 * pixels.size());
  for (Eigen::Index j = 0; j < pixels.size(); ++j) {
    double u = pixels[j];
    if (!(u >= 0.0 && u <= 1.0))
      throw std::invalid_argument("pixel intensity outside [0,1]");
    current[2 * j] = std::max(std::log(u), kInputCurrentFloor);
    current[2 * j + 1] = std::max(std::log1p(-u), kInputCurrentFloor);
  }
  return current;
}

Population::Population(std::string name, int id, PopulationShape shape,
                       double tau_m, double dt)
    : name_(std::move(name)), id_(id), shape_(shape), tau_m_(tau_m), dt_(dt) {
  shape_.validate();
  if (tau_m_ < dt_)
    throw std::invalid_argument("tau_m < dt: membrane step is unstable");
  set_batch(1);
}

int Population::add_trace(double tau_z) {
  for (size_t i = 0; i < traces_.size(); ++i)
    if (traces_[i].tau_z == tau_z) return static_cast<int>(i);
  if (tau_z < dt_)
    throw std::invalid_argument("tau_z < dt: filter step is unstable");
  traces_.push_back({tau_z, Eigen::MatrixXd::Zero(units(), batch())});
  return static_cast<int>(traces_.size()) - 1;
}

int Population::trace_index(double tau_z) const {
  for (size_t i = 0; i < traces_.size(); ++i)
    if (traces_[i].tau_z == tau_z) return static_cast<int>(i);
  throw std::logic_error("no unit trace registered for requested tau_z");
}

void Population::set_batch(int n_cols) {
  v_.setZero(units(), n_cols);
  pi_.setZero(units(), n_cols);
  act_.setZero(units(), n_cols);
  for (auto& t : traces_) t.z.setZero(units(), n_cols);
  spikes_.assign(n_cols, {});
}

void Population::reset_state() { set_batch(batch()); }

void Population::update_voltage(
    const Eigen::Ref<const Eigen::MatrixXd>& support) {
  double lam = dt_ / tau_m_;
  v_.array() += lam * (support.array() - v_.array());
}

void Population::softmax() {
  for (int b = 0; b < batch(); ++b)
    softmax_hypercolumn(v_.col(b), shape_, pi_.col(b));
}

void Population::emit(bool spiking, const SpikeScale& scale, uint64_t seed,
                      const std::vector<uint64_t>& step_keys) {
  if (!spiking) {
    act_ = pi_;
    for (auto& s : spikes_) s.clear();
    return;
  }
  double mu = scale.mu_spk();
  for (int b = 0; b < batch(); ++b) {
    auto& list = spikes_[b];
    list.clear();
    const double* p = pi_.col(b).data();
    double* a = act_.col(b).data();
    for (int u = 0; u < units(); ++u) {
      double prob = p[u] * mu;
      bool spike =
          prob > 0.0 && rng::uniform(seed, rng::Stream::spikes,
                                     static_cast<uint64_t>(id_),
                                     static_cast<uint64_t>(u),
                                     step_keys[b]) < prob;
      a[u] = spike ? 1.0 : 0.0;
      if (spike) list.push_back(u);
    }
  }
}

void Population::update_traces(const SpikeScale& scale, bool spiking) {
  double mu = spiking ? scale.mu_spk() : 1.0;
  for (auto& t : traces_) {
    double lam = dt_ / t.tau_z;
    double* z = t.z.data();
    const double* a = act_.data();
    Eigen::Index n = t.z.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = z[i] + lam * (a[i] / mu - z[i]);
      z[i] = (v < kSnapThreshold) ? 0.0 : v;
    }
  }
}

}  // namespace bcpnn
