#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bcpnn {

// 10-way softmax readout trained with Adam on snapshot features; quantifies
// class separability of the learned representations.
struct LinearProbe {
  Eigen::MatrixXd W;  // classes x features
  Eigen::VectorXd b;
  std::vector<double> epoch_loss;
};

struct ProbeOptions {
  int n_classes = 10;
  int epochs = 10;
  int minibatch = 64;
  double alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-7;
  uint64_t seed = 1;
};

LinearProbe train_probe(const Eigen::Ref<const Eigen::MatrixXd>& features,
                        const std::vector<int>& labels,
                        const ProbeOptions& opt = {});
double eval_probe(const LinearProbe& probe,
                  const Eigen::Ref<const Eigen::MatrixXd>& features,
                  const std::vector<int>& labels);

struct SimilarityResult {
  Eigen::MatrixXd matrix;  // pairwise cosine similarities
  double s_ortho = 0.0;    // mean within-class / mean overall, self excluded
  bool had_zero_vectors = false;
};

SimilarityResult similarity_and_ortho(
    const Eigen::Ref<const Eigen::MatrixXd>& snapshots,
    const std::vector<int>& labels);

// s_ortho without materializing the N x N matrix.
double orthogonality_ratio(const Eigen::Ref<const Eigen::MatrixXd>& snapshots,
                           const std::vector<int>& labels);

struct PrototypeCluster {
  int leader = 0;
  std::vector<int> members;  // includes the leader
  Eigen::VectorXd mean_reconstruction;
  int attraction_index() const { return static_cast<int>(members.size()); }
};

struct PrototypeSet {
  double s_min = 0.0;
  std::vector<PrototypeCluster> clusters;
};

// Deterministic leader clustering in pattern-index order: a pattern joins
// the first cluster whose leader is at least s_min similar, else founds a
// new one.
PrototypeSet extract_prototypes(
    const Eigen::Ref<const Eigen::MatrixXd>& hid_snapshots,
    const Eigen::Ref<const Eigen::MatrixXd>& reconstructions, double s_min);

// Gaussian-kernel rate estimate of a binary spike train; spikes are 1/dt
// impulses, the kernel has unit area, so the trace integrates to the spike
// count.
Eigen::VectorXd firing_rate(const std::vector<int>& spike_steps, double sigma,
                            double dt, int n_steps);

// Receptive-field masks from patchy connectivity, in image coordinates.
// Feedforward uses connectivity rows (senders of a HID hypercolumn), the
// feedback view uses the transpose.
Eigen::MatrixXi receptive_field_mask(
    const Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>& conn,
    int hid_hypercolumn, bool transpose_view);

double mask_jaccard(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b);

}  // namespace bcpnn
