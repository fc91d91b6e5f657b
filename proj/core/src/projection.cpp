#include "bcpnn/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcpnn {

namespace {
constexpr int kPanelCapCols = 1024;
constexpr double kFoldThreshold = 1e-100;
}  // namespace

Projection::Projection(int id, Population& pre, Population& post,
                       const Options& opt, uint64_t seed)
    : name_(opt.name), id_(id), pre_(pre), post_(post), opt_(opt),
      seed_(seed) {
  Hi_ = pre.shape().n_hypercolumns;
  Mi_ = pre.shape().n_minicolumns;
  Hj_ = post.shape().n_hypercolumns;
  Mj_ = post.shape().n_minicolumns;
  Ni_ = pre.units();
  Nj_ = post.units();
  if (opt.n_conn < 1 || opt.n_conn > Hi_)
    throw std::invalid_argument(name_ +
                                ": n_conn must be in [1, #sender hypercolumns]");
  slot_pre_ = pre_.add_trace(opt.tau_zi);
  slot_post_ = post_.add_trace(opt.tau_zj);
  symmetric_ = (&pre_ == &post_) && slot_pre_ == slot_post_;
  gamma_ = 1.0 - opt.dt / opt.tau_p;
  lambda_ = opt.dt / opt.tau_p;

  conn_.setZero(Hj_, Hi_);
  std::vector<int> senders(Hi_);
  for (int hr = 0; hr < Hj_; ++hr) {
    for (int hi = 0; hi < Hi_; ++hi) senders[hi] = hi;
    rng::Sequence seq(seed, rng::Stream::connectivity,
                      static_cast<uint64_t>(id_), static_cast<uint64_t>(hr));
    // partial Fisher-Yates: first n_conn entries are a uniform draw
    // without replacement
    for (int k = 0; k < opt.n_conn; ++k) {
      int j = k + static_cast<int>(seq.next_below(Hi_ - k));
      std::swap(senders[k], senders[j]);
      conn_(hr, senders[k]) = 1;
    }
  }
  out_degree_.assign(Hi_, 0);
  for (int hs = 0; hs < Hi_; ++hs)
    out_degree_[hs] = conn_.col(hs).cast<int>().sum();

  init_traces_uniform();
  bias_.setZero(Nj_);
  w_prop_.setZero(Nj_, Ni_);
  support_.setZero(Nj_, 1);
}

void Projection::init_traces_uniform() {
  // Cold-start statistics: jittered near-uniform values carrying only one
  // learning step's worth of mass (dt/tau_p). Real data then dominates the
  // trace ratios almost immediately, so likelihoods (weights) and priors
  // (biases) differentiate at the same pace. Seeding full prior mass
  // instead lets the log-marginal biases run away from the prior-shrunk
  // weights and a single minicolumn captures its whole hypercolumn; a
  // perfectly uniform start would not even break the within-module
  // symmetry of deterministic rate dynamics.
  constexpr double kJitter = 0.1;
  auto u = [this](uint64_t a, uint64_t b, uint64_t c) {
    return 2.0 * rng::uniform(seed_, rng::Stream::traces, a, b, c) - 1.0;
  };
  auto init_marginal = [&](Eigen::VectorXd& p, int H, int M, int pop_id) {
    p.resize(H * M);
    for (int h = 0; h < H; ++h) {
      double sum = 0.0;
      for (int m = 0; m < M; ++m) {
        double v = 1.0 + kJitter * u(static_cast<uint64_t>(pop_id),
                                     static_cast<uint64_t>(h * M + m), 0);
        p[h * M + m] = v;
        sum += v;
      }
      for (int m = 0; m < M; ++m) p[h * M + m] *= lambda_ / sum;
    }
  };
  init_marginal(p_pre_, Hi_, Mi_, pre_.id());
  init_marginal(p_post_, Hj_, Mj_, post_.id());

  q_joint_.resize(Nj_, Ni_);
  const uint64_t jkey = 1000 + static_cast<uint64_t>(id_);
  for (int hs = 0; hs < Hi_; ++hs) {
    for (int hr = 0; hr < Hj_; ++hr) {
      if (symmetric_ && hr > hs) continue;
      double sum = 0.0;
      for (int mi = 0; mi < Mi_; ++mi) {
        for (int mj = 0; mj < Mj_; ++mj) {
          int i = hs * Mi_ + mi, j = hr * Mj_ + mj;
          uint64_t a = symmetric_ ? static_cast<uint64_t>(std::min(i, j))
                                  : static_cast<uint64_t>(i);
          uint64_t b = symmetric_ ? static_cast<uint64_t>(std::max(i, j))
                                  : static_cast<uint64_t>(j);
          double v = 1.0 + kJitter * u(jkey, a, b);
          q_joint_(j, i) = v;
          sum += v;
        }
      }
      // patch blocks are normalized like the marginals; a symmetric
      // projection shares one normalizer per unordered block pair
      for (int mi = 0; mi < Mi_; ++mi)
        for (int mj = 0; mj < Mj_; ++mj)
          q_joint_(hr * Mj_ + mj, hs * Mi_ + mi) *= lambda_ / sum;
      if (symmetric_ && hr != hs) {
        for (int mi = 0; mi < Mi_; ++mi)
          for (int mj = 0; mj < Mj_; ++mj)
            q_joint_(hs * Mi_ + mi, hr * Mj_ + mj) =
                q_joint_(hr * Mj_ + mj, hs * Mi_ + mi);
      }
    }
  }
  qscale_ = 1.0;
  learn_steps_ = 0;
  panel_cols_ = 0;
  weights_dirty_ = true;
}

void Projection::set_connectivity(const ConnMatrix& conn) {
  if (conn.rows() != Hj_ || conn.cols() != Hi_)
    throw std::invalid_argument(name_ + ": connectivity shape mismatch");
  for (int hr = 0; hr < Hj_; ++hr) {
    int deg = conn.row(hr).cast<int>().sum();
    if (deg != opt_.n_conn)
      throw std::invalid_argument(name_ + ": receiver in-degree != n_conn");
  }
  conn_ = conn;
  for (int hs = 0; hs < Hi_; ++hs)
    out_degree_[hs] = conn_.col(hs).cast<int>().sum();
  weights_dirty_ = true;
}

int Projection::in_degree(int receiver_hc) const {
  return conn_.row(receiver_hc).cast<int>().sum();
}

bool Projection::fully_connected() const { return opt_.n_conn == Hi_; }

// --- plasticity -----------------------------------------------------------

void Projection::learn_step() {
  const auto& z_pre = pre_.trace(slot_pre_).col(0);
  const auto& z_post = post_.trace(slot_post_).col(0);
  p_pre_ += lambda_ * (z_pre - p_pre_);
  p_post_ += lambda_ * (z_post - p_post_);
  qscale_ *= gamma_;
  append_panels();
  panel_coeff_[panel_cols_ - 1] = lambda_ / qscale_;
  ++learn_steps_;
  weights_dirty_ = true;
  if (panel_cols_ >= kPanelCapCols) flush_joint();
}

void Projection::append_panels() {
  if (panel_cols_ == post_panel_.cols()) {
    int cap = std::max(128, panel_cols_ * 2);
    post_panel_.conservativeResize(Nj_, cap);
    if (!symmetric_) pre_panel_.conservativeResize(Ni_, cap);
    panel_coeff_.conservativeResize(cap);
  }
  post_panel_.col(panel_cols_) = post_.trace(slot_post_).col(0);
  if (!symmetric_) pre_panel_.col(panel_cols_) = pre_.trace(slot_pre_).col(0);
  ++panel_cols_;
}

static std::vector<int> nonzero_rows(const Eigen::MatrixXd& m, int used_cols) {
  std::vector<int> rows;
  for (int r = 0; r < m.rows(); ++r) {
    bool nz = false;
    for (int c = 0; c < used_cols && !nz; ++c) nz = m(r, c) != 0.0;
    if (nz) rows.push_back(r);
  }
  return rows;
}

void Projection::flush_joint() {
  if (panel_cols_ == 0) return;
  const int L = panel_cols_;
  const auto& pre_pan = symmetric_ ? post_panel_ : pre_panel_;
  std::vector<int> pre_rows = nonzero_rows(pre_pan, L);
  std::vector<int> post_rows =
      symmetric_ ? pre_rows : nonzero_rows(post_panel_, L);
  double packed_cost = static_cast<double>(pre_rows.size()) *
                       static_cast<double>(post_rows.size()) * (L + 1);
  double full_cost =
      static_cast<double>(Ni_) * static_cast<double>(Nj_) * L;
  if (packed_cost < full_cost)
    flush_packed(pre_rows, post_rows);
  else
    flush_full();
  panel_cols_ = 0;
  if (qscale_ < kFoldThreshold) {
    q_joint_ *= qscale_;
    qscale_ = 1.0;
  }
}

void Projection::ensure_mirror() {
  if (!mirror_dirty_) return;
  for (int i = 0; i < Nj_; ++i)
    for (int j = i + 1; j < Ni_; ++j) q_joint_(i, j) = q_joint_(j, i);
  mirror_dirty_ = false;
}

void Projection::flush_full() {
  const int L = panel_cols_;
  if (symmetric_) {
    Eigen::MatrixXd scaled = post_panel_.leftCols(L);
    for (int c = 0; c < L; ++c) scaled.col(c) *= std::sqrt(panel_coeff_[c]);
    q_joint_.selfadjointView<Eigen::Lower>().rankUpdate(scaled, 1.0);
    mirror_dirty_ = true;  // upper triangle refreshed lazily on read
  } else {
    Eigen::MatrixXd scaled = pre_panel_.leftCols(L);
    for (int c = 0; c < L; ++c) scaled.col(c) *= panel_coeff_[c];
    q_joint_.noalias() += post_panel_.leftCols(L) * scaled.transpose();
  }
}

void Projection::flush_packed(const std::vector<int>& pre_rows,
                              const std::vector<int>& post_rows) {
  ensure_mirror();
  const int L = panel_cols_;
  const int na = static_cast<int>(post_rows.size());
  const int nb = static_cast<int>(pre_rows.size());
  if (na == 0 || nb == 0) return;
  if (symmetric_) {
    Eigen::MatrixXd zp(na, L);
    for (int r = 0; r < na; ++r) zp.row(r) = post_panel_.row(post_rows[r]).head(L);
    for (int c = 0; c < L; ++c) zp.col(c) *= std::sqrt(panel_coeff_[c]);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(na, na);
    block.selfadjointView<Eigen::Lower>().rankUpdate(zp, 1.0);
    for (int x = 0; x < na; ++x) {
      for (int y = x; y < na; ++y) {
        double v = block(y, x);
        q_joint_(post_rows[y], post_rows[x]) += v;
        if (y != x) q_joint_(post_rows[x], post_rows[y]) += v;
      }
    }
  } else {
    Eigen::MatrixXd zpost(na, L), zpre(nb, L);
    for (int r = 0; r < na; ++r)
      zpost.row(r) = post_panel_.row(post_rows[r]).head(L);
    for (int r = 0; r < nb; ++r)
      zpre.row(r) = pre_panel_.row(pre_rows[r]).head(L);
    for (int c = 0; c < L; ++c) zpre.col(c) *= panel_coeff_[c];
    Eigen::MatrixXd block(na, nb);
    block.noalias() = zpost * zpre.transpose();
    for (int x = 0; x < nb; ++x)
      for (int y = 0; y < na; ++y)
        q_joint_(post_rows[y], pre_rows[x]) += block(y, x);
  }
}

void Projection::restore_counters(long long learn_steps, double qscale) {
  learn_steps_ = learn_steps;
  qscale_ = qscale;
  panel_cols_ = 0;
  mirror_dirty_ = false;
  weights_dirty_ = true;
}

// --- parameters -------------------------------------------------------------

void Projection::ensure_weights() {
  if (weights_dirty_) recompute_weights();
}

void Projection::recompute_bias() {
  bias_ = p_post_.array().max(opt_.eps).log().matrix();
}

void Projection::recompute_weights() {
  // Reads the joint statistics virtually (stored matrix plus any buffered
  // panels) and only over active patches, so the hot per-pattern refresh
  // touches ~n_conn/Hi of the matrix and skips the flush traffic.
  ensure_mirror();
  const double eps = opt_.eps;
  const double eps2 = eps * eps;
  Eigen::ArrayXd logp_post = p_post_.array().max(eps).log();
  bias_ = logp_post.matrix();
  Eigen::ArrayXd logp_pre = p_pre_.array().max(eps).log();
  const int L = panel_cols_;
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < Ni_; ++i) {
    const int hs = i / Mi_;
    Eigen::VectorXd w;
    if (L > 0) {
      const auto& pre_pan = symmetric_ ? post_panel_ : pre_panel_;
      w = (pre_pan.row(i).head(L).transpose().array() *
           panel_coeff_.head(L).array())
              .matrix();
    }
    auto wcol = w_prop_.col(i);
    for (int hr = 0; hr < Hj_; ++hr) {
      auto dst = wcol.segment(hr * Mj_, Mj_);
      if (!conn_(hr, hs)) {
        dst.setZero();
        continue;
      }
      Eigen::ArrayXd p = q_joint_.col(i).segment(hr * Mj_, Mj_);
      if (L > 0)
        p += (post_panel_.middleRows(hr * Mj_, Mj_).leftCols(L) * w).array();
      dst = ((p * qscale_).max(eps2).log() -
             logp_post.segment(hr * Mj_, Mj_) - logp_pre[i])
                .cast<float>();
    }
  }
  weights_dirty_ = false;
}

double Projection::p_joint(int pre_unit, int post_unit) {
  flush_joint();
  ensure_mirror();
  return q_joint_(post_unit, pre_unit) * qscale_;
}

Eigen::MatrixXd Projection::joint_matrix() {
  flush_joint();
  ensure_mirror();
  return q_joint_ * qscale_;
}

double Projection::weight(int pre_unit, int post_unit) {
  const double eps = opt_.eps;
  double pij = std::max(p_joint(pre_unit, post_unit), eps * eps);
  double pi = std::max(p_pre_[pre_unit], eps);
  double pj = std::max(p_post_[post_unit], eps);
  return std::log(pij / (pi * pj));
}

// --- propagation ------------------------------------------------------------

void Projection::reset_support(int batch) {
  support_.setZero(Nj_, batch);
  z_pre_f_.setZero(Ni_, batch);
}

void Projection::rebuild_support() {
  ensure_weights();
  const auto& z = pre_.trace(slot_pre_);
  if (support_.cols() != z.cols()) reset_support(static_cast<int>(z.cols()));
  z_pre_f_ = z.cast<float>();
  support_.noalias() = w_prop_ * z_pre_f_;
}

void Projection::step_support() {
  const auto& z = pre_.trace(slot_pre_);
  if (support_.cols() != z.cols()) reset_support(static_cast<int>(z.cols()));
  if (path_ == PropagationPath::dense) {
    z_pre_f_ = z.cast<float>();
    support_.noalias() = w_prop_ * z_pre_f_;
    return;
  }
  // event path: shared pre-trace decay plus one column add per spike
  const float rho = static_cast<float>(1.0 - opt_.dt / opt_.tau_zi);
  const float delta = static_cast<float>(event_jump_);
  support_ *= rho;
  for (int b = 0; b < support_.cols(); ++b) {
    for (int i : pre_.spike_list(b)) support_.col(b) += delta * w_prop_.col(i);
  }
}

// --- structural plasticity ---------------------------------------------------

Eigen::MatrixXd Projection::patch_numerators() {
  flush_joint();
  ensure_mirror();
  const double eps = opt_.eps;
  const double eps2 = eps * eps;
  Eigen::ArrayXd logp_post = p_post_.array().max(eps).log();
  Eigen::ArrayXd logp_pre = p_pre_.array().max(eps).log();
  Eigen::MatrixXd num(Hj_, Hi_);
#pragma omp parallel for schedule(dynamic, 4)
  for (int hs = 0; hs < Hi_; ++hs) {
    for (int hr = 0; hr < Hj_; ++hr) {
      double acc = 0.0;
      for (int mi = 0; mi < Mi_; ++mi) {
        const int i = hs * Mi_ + mi;
        auto pij = (q_joint_.col(i).segment(hr * Mj_, Mj_).array() * qscale_)
                       .max(eps2);
        acc += (pij * (pij.log() - logp_post.segment(hr * Mj_, Mj_) -
                       logp_pre[i]))
                   .sum();
      }
      num(hr, hs) = acc;
    }
  }
  return num;
}

double Projection::patch_score(int sender_hc, int receiver_hc) {
  if (out_degree_[sender_hc] == 0) return 0.0;
  flush_joint();
  ensure_mirror();
  const double eps = opt_.eps;
  const double eps2 = eps * eps;
  double acc = 0.0;
  for (int mi = 0; mi < Mi_; ++mi) {
    const int i = sender_hc * Mi_ + mi;
    double logpi = std::log(std::max(p_pre_[i], eps));
    for (int mj = 0; mj < Mj_; ++mj) {
      const int j = receiver_hc * Mj_ + mj;
      double pij = std::max(q_joint_(j, i) * qscale_, eps2);
      double w = std::log(pij) - logpi - std::log(std::max(p_post_[j], eps));
      acc += pij * w;
    }
  }
  return acc / out_degree_[sender_hc];
}

Eigen::MatrixXd Projection::patch_scores() {
  Eigen::MatrixXd num = patch_numerators();
  for (int hs = 0; hs < Hi_; ++hs) {
    double inv = out_degree_[hs] == 0 ? 0.0 : 1.0 / out_degree_[hs];
    num.col(hs) *= inv;
  }
  return num;
}

int rewire_greedy(const Eigen::MatrixXd& numerators, ConnMatrix& conn,
                  std::vector<int>& out_degree, int n_flips,
                  std::vector<double>* flip_gains) {
  const int Hj = static_cast<int>(conn.rows());
  const int Hi = static_cast<int>(conn.cols());
  // Patches are priced once per rewiring step from the out-degrees at
  // entry: active ones at their current denominator, silent candidates at
  // the denominator a flip would give them (so a disconnected sender is
  // evaluated with denominator 1). Static per-patch prices make the greedy
  // gap sequence exactly the swap-set optimum, and a flipped pair earns
  // precisely what it was priced at, so it cannot flip straight back on
  // the next step.
  Eigen::MatrixXd score(Hj, Hi);
  for (int hs = 0; hs < Hi; ++hs) {
    for (int hr = 0; hr < Hj; ++hr) {
      int denom = conn(hr, hs) ? std::max(out_degree[hs], 1)
                               : out_degree[hs] + 1;
      score(hr, hs) = numerators(hr, hs) / denom;
    }
  }
  int flips = 0;
  for (int f = 0; f < n_flips; ++f) {
    double best_gap = 0.0;
    int best_hr = -1, best_act = -1, best_sil = -1;
    for (int hr = 0; hr < Hj; ++hr) {
      double worst_active = 0.0, best_silent = 0.0;
      int act = -1, sil = -1;
      for (int hs = 0; hs < Hi; ++hs) {
        double s = score(hr, hs);
        if (conn(hr, hs)) {
          if (act < 0 || s < worst_active) worst_active = s, act = hs;
        } else {
          if (sil < 0 || s > best_silent) best_silent = s, sil = hs;
        }
      }
      if (act < 0 || sil < 0) continue;
      double gap = best_silent - worst_active;
      if (gap > best_gap) {
        best_gap = gap;
        best_hr = hr;
        best_act = act;
        best_sil = sil;
      }
    }
    if (best_hr < 0) break;
    conn(best_hr, best_act) = 0;
    conn(best_hr, best_sil) = 1;
    --out_degree[best_act];
    ++out_degree[best_sil];
    ++flips;
    if (flip_gains) flip_gains->push_back(best_gap);
  }
  return flips;
}

RewireResult Projection::rewire_step(int n_flips) {
  RewireResult res;
  Eigen::MatrixXd num = patch_numerators();
  res.flips = rewire_greedy(num, conn_, out_degree_, n_flips);
  if (res.flips > 0) weights_dirty_ = true;

  // summary over active patches with refreshed denominators
  double sum = 0.0, sum2 = 0.0;
  long count = 0;
  for (int hr = 0; hr < Hj_; ++hr) {
    for (int hs = 0; hs < Hi_; ++hs) {
      if (!conn_(hr, hs)) continue;
      double s = num(hr, hs) / std::max(out_degree_[hs], 1);
      sum += s;
      sum2 += s * s;
      ++count;
    }
  }
  if (count > 0) {
    res.score_mean = sum / count;
    double var = std::max(0.0, sum2 / count - res.score_mean * res.score_mean);
    res.score_std = std::sqrt(var);
  }
  return res;
}

}  // namespace bcpnn
