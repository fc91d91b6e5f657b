#include "bcpnn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bcpnn {

namespace {
constexpr char kMagic[8] = {'B', 'C', 'P', 'N', 'C', 'K', 'P', '1'};

void write_bytes(std::ostream& out, const void* p, size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::istream& in, void* p, size_t n) {
  if (!in.read(static_cast<char*>(p), static_cast<std::streamsize>(n)))
    throw std::runtime_error("truncated checkpoint");
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  write_bytes(out, &v, sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  read_bytes(in, &v, sizeof(T));
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_pod<uint64_t>(out, s.size());
  write_bytes(out, s.data(), s.size());
}

std::string read_string(std::istream& in) {
  uint64_t n = read_pod<uint64_t>(in);
  std::string s(n, '\0');
  read_bytes(in, s.data(), n);
  return s;
}

template <typename Derived>
void write_matrix(std::ostream& out, const Eigen::MatrixBase<Derived>& m) {
  write_pod<int64_t>(out, m.rows());
  write_pod<int64_t>(out, m.cols());
  using Scalar = typename Derived::Scalar;
  const auto& eval = m.derived();
  write_bytes(out, eval.data(), sizeof(Scalar) * eval.size());
}

template <typename Matrix>
void read_matrix(std::istream& in, Matrix& m) {
  int64_t r = read_pod<int64_t>(in);
  int64_t c = read_pod<int64_t>(in);
  m.resize(r, c);
  read_bytes(in, m.data(), sizeof(typename Matrix::Scalar) * m.size());
}

void write_population(std::ostream& out, Population& pop) {
  write_matrix(out, pop.voltage());
  write_pod<int32_t>(out, pop.n_traces());
  for (int s = 0; s < pop.n_traces(); ++s) {
    write_pod<double>(out, pop.trace_tau(s));
    write_matrix(out, pop.trace(s));
  }
}

void read_population(std::istream& in, Population& pop) {
  read_matrix(in, pop.voltage());
  int32_t n = read_pod<int32_t>(in);
  if (n != pop.n_traces())
    throw std::runtime_error("checkpoint trace count mismatch");
  for (int s = 0; s < n; ++s) {
    double tau = read_pod<double>(in);
    if (tau != pop.trace_tau(s))
      throw std::runtime_error("checkpoint trace constant mismatch");
    read_matrix(in, pop.trace(s));
  }
}

void write_projection(std::ostream& out, Projection& proj) {
  proj.flush_joint();
  proj.ensure_mirror();
  write_matrix(out, proj.conn_storage());
  write_matrix(out, proj.p_pre_storage());
  write_matrix(out, proj.p_post_storage());
  write_matrix(out, proj.joint_storage());
  write_pod<double>(out, proj.joint_scale());
  write_pod<int64_t>(out, proj.learn_steps());
  proj.ensure_weights();
  write_matrix(out, proj.weights());
  write_matrix(out, proj.bias());
}

void read_projection(std::istream& in, Projection& proj) {
  ConnMatrix conn;
  read_matrix(in, conn);
  proj.set_connectivity(conn);
  read_matrix(in, proj.p_pre_storage());
  read_matrix(in, proj.p_post_storage());
  read_matrix(in, proj.joint_storage());
  double qscale = read_pod<double>(in);
  int64_t steps = read_pod<int64_t>(in);
  proj.restore_counters(steps, qscale);
  Eigen::MatrixXf w;
  Eigen::VectorXd b;
  read_matrix(in, w);
  read_matrix(in, b);
  proj.recompute_weights();  // derived from the restored traces
  (void)w;
  (void)b;
}
}  // namespace

void save_checkpoint(Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  write_bytes(out, kMagic, sizeof(kMagic));
  // the stored config describes the model and protocol, not where the run
  // happened to live
  RunConfig stored_cfg = net.config();
  stored_cfg.out_dir.clear();
  stored_cfg.data_dir.clear();
  write_string(out, stored_cfg.serialize());
  write_pod<int64_t>(out, net.global_step());
  write_pod<int64_t>(out, static_cast<int64_t>(net.patterns_seen()));
  write_pod<int32_t>(out, net.epochs_done());
  write_population(out, net.inp());
  write_population(out, net.hid());
  if (net.has_inprc()) write_population(out, net.inprc());
  write_projection(out, net.ffwd());
  if (net.full()) {
    write_projection(out, net.recurrent());
    write_projection(out, net.feedback());
  }
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

RunConfig peek_checkpoint_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  read_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  return RunConfig::parse(read_string(in));
}

std::unique_ptr<Network> load_checkpoint(const std::string& path,
                                         const RunConfig* config_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  read_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  RunConfig cfg = RunConfig::parse(read_string(in));
  if (config_override) {
    if (config_override->model_signature() != cfg.model_signature())
      throw std::runtime_error(
          "config override changes the stored model identity");
    cfg = *config_override;
  }
  auto net = std::make_unique<Network>(cfg);
  int64_t gstep = read_pod<int64_t>(in);
  int64_t seen = read_pod<int64_t>(in);
  int32_t epochs = read_pod<int32_t>(in);
  net->restore_progress(gstep, static_cast<long>(seen), epochs);
  read_population(in, net->inp());
  read_population(in, net->hid());
  if (net->has_inprc()) read_population(in, net->inprc());
  read_projection(in, net->ffwd());
  if (net->full()) {
    read_projection(in, net->recurrent());
    read_projection(in, net->feedback());
  }
  return net;
}

}  // namespace bcpnn
