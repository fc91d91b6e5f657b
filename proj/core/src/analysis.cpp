#include "bcpnn/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "bcpnn/rng.hpp"

namespace bcpnn {

LinearProbe train_probe(const Eigen::Ref<const Eigen::MatrixXd>& features,
                        const std::vector<int>& labels,
                        const ProbeOptions& opt) {
  const long n = features.cols();
  const long d = features.rows();
  if (static_cast<long>(labels.size()) != n)
    throw std::invalid_argument("feature/label count mismatch");
  const int C = opt.n_classes;

  LinearProbe probe;
  probe.W.setZero(C, d);
  probe.b.setZero(C);
  Eigen::MatrixXd mW = Eigen::MatrixXd::Zero(C, d), vW = mW;
  Eigen::VectorXd mb = Eigen::VectorXd::Zero(C), vb = mb;

  std::vector<int> order(n);
  long t = 0;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    for (long i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    rng::Sequence seq(opt.seed, rng::Stream::probe,
                      static_cast<uint64_t>(epoch));
    seq.shuffle(order);
    double loss_sum = 0.0;
    for (long start = 0; start < n; start += opt.minibatch) {
      long bsz = std::min<long>(opt.minibatch, n - start);
      Eigen::MatrixXd X(d, bsz);
      for (long k = 0; k < bsz; ++k) X.col(k) = features.col(order[start + k]);
      Eigen::MatrixXd logits = (probe.W * X).colwise() + probe.b;
      // softmax + cross entropy
      Eigen::MatrixXd p = logits;
      for (long k = 0; k < bsz; ++k) {
        auto col = p.col(k).array();
        col -= col.maxCoeff();
        col = col.exp();
        col /= col.sum();
        int y = labels[order[start + k]];
        loss_sum += -std::log(std::max(p(y, k), 1e-300));
        p(y, k) -= 1.0;  // dL/dlogits
      }
      Eigen::MatrixXd gW = (p * X.transpose()) / static_cast<double>(bsz);
      Eigen::VectorXd gb = p.rowwise().sum() / static_cast<double>(bsz);

      ++t;
      double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(t));
      double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(t));
      mW = opt.beta1 * mW + (1.0 - opt.beta1) * gW;
      vW = opt.beta2 * vW.array().matrix() +
           (1.0 - opt.beta2) * gW.array().square().matrix();
      probe.W.array() -=
          opt.alpha * (mW.array() / c1) / ((vW.array() / c2).sqrt() + opt.eps);
      mb = opt.beta1 * mb + (1.0 - opt.beta1) * gb;
      vb = opt.beta2 * vb.array().matrix() +
           (1.0 - opt.beta2) * gb.array().square().matrix();
      probe.b.array() -=
          opt.alpha * (mb.array() / c1) / ((vb.array() / c2).sqrt() + opt.eps);
    }
    probe.epoch_loss.push_back(loss_sum / static_cast<double>(n));
  }
  return probe;
}

double eval_probe(const LinearProbe& probe,
                  const Eigen::Ref<const Eigen::MatrixXd>& features,
                  const std::vector<int>& labels) {
  const long n = features.cols();
  if (static_cast<long>(labels.size()) != n)
    throw std::invalid_argument("feature/label count mismatch");
  Eigen::MatrixXd logits = (probe.W * features).colwise() + probe.b;
  long correct = 0;
  for (long i = 0; i < n; ++i) {
    Eigen::Index arg;
    logits.col(i).maxCoeff(&arg);
    if (static_cast<int>(arg) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

namespace {
Eigen::MatrixXd normalized_columns(
    const Eigen::Ref<const Eigen::MatrixXd>& snapshots, bool* had_zero) {
  Eigen::MatrixXd x = snapshots;
  if (had_zero) *had_zero = false;
  for (long i = 0; i < x.cols(); ++i) {
    double nrm = x.col(i).norm();
    if (nrm > 0.0)
      x.col(i) /= nrm;
    else if (had_zero)
      *had_zero = true;  // column stays zero: its similarities read 0
  }
  return x;
}

double ortho_from_matrix(const Eigen::MatrixXd& S,
                         const std::vector<int>& labels) {
  const long n = S.cols();
  double within = 0.0, all = 0.0;
  long n_within = 0, n_all = 0;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      all += S(i, j);
      ++n_all;
      if (labels[i] == labels[j]) {
        within += S(i, j);
        ++n_within;
      }
    }
  }
  if (n_within == 0 || n_all == 0 || all == 0.0) return 0.0;
  return (within / n_within) / (all / n_all);
}
}  // namespace

SimilarityResult similarity_and_ortho(
    const Eigen::Ref<const Eigen::MatrixXd>& snapshots,
    const std::vector<int>& labels) {
  if (snapshots.cols() < 2)
    throw std::invalid_argument("similarity needs at least two snapshots");
  if (static_cast<long>(labels.size()) != snapshots.cols())
    throw std::invalid_argument("snapshot/label count mismatch");
  SimilarityResult res;
  Eigen::MatrixXd x = normalized_columns(snapshots, &res.had_zero_vectors);
  res.matrix.noalias() = x.transpose() * x;
  res.s_ortho = ortho_from_matrix(res.matrix, labels);
  return res;
}

double orthogonality_ratio(const Eigen::Ref<const Eigen::MatrixXd>& snapshots,
                           const std::vector<int>& labels) {
  bool dummy;
  Eigen::MatrixXd x = normalized_columns(snapshots, &dummy);
  const long n = x.cols();
  // sum of all pair similarities = |sum of unit vectors|^2 - n
  Eigen::VectorXd total = x.rowwise().sum();
  double all = total.squaredNorm() - static_cast<double>(n);
  double within = 0.0;
  long n_within = 0;
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  for (int c : classes) {
    Eigen::VectorXd csum = Eigen::VectorXd::Zero(x.rows());
    long nc = 0;
    for (long i = 0; i < n; ++i)
      if (labels[i] == c) {
        csum += x.col(i);
        ++nc;
      }
    within += csum.squaredNorm() - static_cast<double>(nc);
    n_within += nc * (nc - 1);
  }
  long n_all = n * (n - 1);
  if (n_within == 0 || n_all == 0 || all == 0.0) return 0.0;
  return (within / n_within) / (all / n_all);
}

PrototypeSet extract_prototypes(
    const Eigen::Ref<const Eigen::MatrixXd>& hid_snapshots,
    const Eigen::Ref<const Eigen::MatrixXd>& reconstructions, double s_min) {
  if (s_min < 0.0 || s_min > 1.0)
    throw std::invalid_argument("s_min must be in [0,1]");
  const long n = hid_snapshots.cols();
  bool dummy;
  Eigen::MatrixXd x = normalized_columns(hid_snapshots, &dummy);
  PrototypeSet set;
  set.s_min = s_min;
  std::vector<int> leaders;
  for (long i = 0; i < n; ++i) {
    bool joined = false;
    for (size_t c = 0; c < leaders.size(); ++c) {
      double sim = x.col(i).dot(x.col(leaders[c]));
      if (sim >= s_min) {
        set.clusters[c].members.push_back(static_cast<int>(i));
        joined = true;
        break;
      }
    }
    if (!joined) {
      leaders.push_back(static_cast<int>(i));
      PrototypeCluster cl;
      cl.leader = static_cast<int>(i);
      cl.members.push_back(static_cast<int>(i));
      set.clusters.push_back(std::move(cl));
    }
  }
  if (reconstructions.cols() == n && reconstructions.rows() > 0) {
    for (auto& cl : set.clusters) {
      cl.mean_reconstruction = Eigen::VectorXd::Zero(reconstructions.rows());
      for (int m : cl.members) cl.mean_reconstruction += reconstructions.col(m);
      cl.mean_reconstruction /= static_cast<double>(cl.members.size());
    }
  }
  return set;
}

Eigen::VectorXd firing_rate(const std::vector<int>& spike_steps, double sigma,
                            double dt, int n_steps) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  Eigen::VectorXd rate = Eigen::VectorXd::Zero(n_steps);
  const double peak = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  // beyond 6 sigma the kernel is numerically irrelevant
  const int halfwin = static_cast<int>(std::ceil(6.0 * sigma / dt));
  for (int s : spike_steps) {
    int lo = std::max(0, s - halfwin);
    int hi = std::min(n_steps - 1, s + halfwin);
    for (int t = lo; t <= hi; ++t) {
      double dtau = (t - s) * dt;
      rate[t] += peak * std::exp(-dtau * dtau * inv2s2);
    }
  }
  return rate;
}

Eigen::MatrixXi receptive_field_mask(
    const Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>& conn,
    int hid_hypercolumn, bool transpose_view) {
  const int n_pixels = transpose_view ? static_cast<int>(conn.rows())
                                      : static_cast<int>(conn.cols());
  const int side = static_cast<int>(std::lround(std::sqrt(n_pixels)));
  if (side * side != n_pixels)
    throw std::invalid_argument(
        "image-side population is not square; cannot form masks");
  Eigen::MatrixXi mask(side, side);
  for (int p = 0; p < n_pixels; ++p) {
    uint8_t v = transpose_view ? conn(p, hid_hypercolumn)
                               : conn(hid_hypercolumn, p);
    mask(p / side, p % side) = v ? 1 : 0;
  }
  return mask;
}

double mask_jaccard(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
  int inter = 0, uni = 0;
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      bool x = a(r, c) != 0, y = b(r, c) != 0;
      inter += (x && y) ? 1 : 0;
      uni += (x || y) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

}  // namespace bcpnn
