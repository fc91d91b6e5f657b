#pragma once

#include <cmath>
#include <stdexcept>

namespace bcpnn {

// Dimensionless per-step spike scale mu_spk = f_max * dt. A spike scaled by
// 1/mu_spk makes the filtered trace an unbiased estimate of the underlying
// activation probability.
struct SpikeScale {
  double f_max = 100.0;  // Hz
  double dt = 1e-3;      // s

  double mu_spk() const { return f_max * dt; }

  void validate() const {
    double mu = mu_spk();
    if (!(mu > 0.0) || mu > 1.0)
      throw std::invalid_argument("spike scale f_max*dt must be in (0,1]");
  }
};

// Short-term exponential filter of spikes (or of rates, when driven by the
// softmax output directly).
struct ZTrace {
  double value = 0.0;
  double tau_z = 0.020;  // s

  static ZTrace make(double tau_z, double dt) {
    if (tau_z < dt)
      throw std::invalid_argument("tau_z < dt: filter step is unstable");
    return ZTrace{0.0, tau_z};
  }
};

// z' = z + (dt/tau_z) * (drive/mu_spk - z); drive is a {0,1} spike for
// spiking variants or a rate in [0,1] (with mu_spk = 1) for rate variants.
inline ZTrace update_z(ZTrace z, double drive, const SpikeScale& scale) {
  double lam = scale.dt / z.tau_z;
  z.value += lam * (drive / scale.mu_spk() - z.value);
  return z;
}

// k zero-input Euler steps collapsed into one geometric factor.
inline double decay_factor(double dt, double tau, long long k) {
  return std::pow(1.0 - dt / tau, static_cast<double>(k));
}

// Long-term activation / co-activation estimates with a lazy-decay
// timestamp so sparse joint entries can skip untouched steps.
struct PTraceTriple {
  double p_pre = 0.0;
  double p_post = 0.0;
  double p_joint = 0.0;
  double tau_p = 5.0;  // s
  long long last_update = 0;
};

// One Euler step of Eq.-style relaxation toward the z statistics. Callers
// gate this on the projection's learn flag for the current phase.
inline PTraceTriple update_p(PTraceTriple p, const ZTrace& z_pre,
                             const ZTrace& z_post, double dt = 1e-3) {
  double lam = dt / p.tau_p;
  p.p_pre += lam * (z_pre.value - p.p_pre);
  p.p_post += lam * (z_post.value - p.p_post);
  p.p_joint += lam * (z_pre.value * z_post.value - p.p_joint);
  p.last_update += 1;
  return p;
}

// Apply k pending zero-input steps in closed form.
inline PTraceTriple decay_p(PTraceTriple p, long long k, double dt = 1e-3) {
  double g = decay_factor(dt, p.tau_p, k);
  p.p_pre *= g;
  p.p_post *= g;
  p.p_joint *= g;
  p.last_update += k;
  return p;
}

struct SynapseParams {
  double bias = 0.0;    // nats, log prior of the post unit
  double weight = 0.0;  // nats, log odds ratio (pointwise mutual information)
};

// bias = log p_post, weight = log(p_joint / (p_pre * p_post)), with the
// epsilon floor applied only inside the logs; stored traces are never
// clipped.
inline SynapseParams compute_bias_weight(const PTraceTriple& p, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  SynapseParams out;
  double pi = std::max(p.p_pre, eps);
  double pj = std::max(p.p_post, eps);
  double pij = std::max(p.p_joint, eps * eps);
  out.bias = std::log(pj);
  out.weight = std::log(pij / (pi * pj));
  return out;
}

}  // namespace bcpnn
