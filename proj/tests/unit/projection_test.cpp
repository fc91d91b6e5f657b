#include <cmath>

#include "bcpnn/population.hpp"
#include "bcpnn/projection.hpp"
#include "bcpnn/rng.hpp"
#include "doctest.h"
#include "../support/rewire_oracle.hpp"

using namespace bcpnn;

namespace {

Projection::Options opts(int n_conn) {
  Projection::Options o;
  o.name = "test";
  o.n_conn = n_conn;
  o.tau_zi = o.tau_zj = 0.020;
  o.tau_p = 5.0;
  o.eps = 1e-8;
  o.dt = 1e-3;
  return o;
}

}  // namespace

TEST_CASE("connectivity init: exact in-degree, determinism, full wiring") {
  Population pre("pre", 0, {784, 2}, 0.005, 1e-3);
  Population post("post", 1, {100, 3}, 0.005, 1e-3);
  Projection p1(0, pre, post, opts(78), 7);
  for (int hr = 0; hr < 100; ++hr) CHECK(p1.in_degree(hr) == 78);
  Projection p2(0, pre, post, opts(78), 7);
  CHECK((p1.connectivity() == p2.connectivity()));
  Projection p3(0, pre, post, opts(78), 8);
  CHECK((p1.connectivity() != p3.connectivity()));

  Population pre2("pre2", 2, {5, 2}, 0.005, 1e-3);
  Projection full(1, pre2, post, opts(5), 7);
  CHECK(full.fully_connected());
  CHECK(full.connectivity().cast<int>().sum() == 5 * 100);
  CHECK_THROWS(Projection(2, pre2, post, opts(6), 7));
}

TEST_CASE("initial traces: near-uniform prior, jittered for symmetry breaks") {
  Population pre("pre", 0, {2, 2}, 0.005, 1e-3);
  Population post("post", 1, {2, 5}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(2), 1);
  proj.recompute_weights();
  // cold-start statistics: one learning step of mass, near-uniform ratios.
  // Within a hypercolumn the uniform parts of weight and bias cancel in the
  // softmax; the jitter breaks the within-module symmetry.
  const double lam = 1e-3 / 5.0;
  for (int i = 0; i < pre.units(); ++i)
    for (int j = 0; j < post.units(); ++j)
      CHECK(proj.weight(i, j) == doctest::Approx(-std::log(lam)).epsilon(0.1));
  for (int j = 0; j < post.units(); ++j)
    CHECK(proj.bias()(j) == doctest::Approx(std::log(lam / 5.0)).epsilon(0.05));
  // marginals are normalized per hypercolumn and not degenerate
  for (int h = 0; h < 2; ++h) {
    CHECK(proj.p_post().segment(h * 5, 5).sum() ==
          doctest::Approx(lam).epsilon(1e-12));
    CHECK(proj.p_pre().segment(h * 2, 2).sum() ==
          doctest::Approx(lam).epsilon(1e-12));
  }
  CHECK(proj.p_post().maxCoeff() != proj.p_post().minCoeff());

  // a self-projection with shared traces starts bitwise symmetric
  Population hid("hid", 2, {2, 4}, 0.005, 1e-3);
  Projection rec(1, hid, hid, opts(2), 1);
  CHECK(rec.symmetric());
  for (int i = 0; i < hid.units(); ++i)
    for (int j = 0; j < hid.units(); ++j)
      CHECK(rec.p_joint(i, j) == rec.p_joint(j, i));
  CHECK((rec.p_pre() - rec.p_post()).norm() == 0.0);
}

TEST_CASE("propagate: zero pre-activity contributes nothing") {
  Population pre("pre", 0, {2, 2}, 0.005, 1e-3);
  Population post("post", 1, {2, 3}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(2), 1);
  proj.rebuild_support();
  CHECK(proj.support().norm() == 0.0f);
}

TEST_CASE("propagate: single active patch dot product") {
  Population pre("pre", 0, {1, 2}, 0.005, 1e-3);
  Population post("post", 1, {1, 2}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(1), 1);
  proj.p_pre_storage().setConstant(0.5);
  proj.p_post_storage().setConstant(0.5);
  // coupled on-diagonal, anti-coupled off-diagonal
  proj.joint_storage()(0, 0) = 0.5;
  proj.joint_storage()(1, 0) = 0.125;
  proj.joint_storage()(0, 1) = 0.125;
  proj.joint_storage()(1, 1) = 0.5;
  proj.mark_weights_dirty();
  CHECK(proj.weight(0, 0) == doctest::Approx(std::log(2.0)));
  CHECK(proj.weight(0, 1) == doctest::Approx(-std::log(2.0)));
  pre.trace(proj.pre_trace_slot())(0, 0) = 1.0;
  pre.trace(proj.pre_trace_slot())(1, 0) = 0.0;
  proj.rebuild_support();
  CHECK(proj.support()(0, 0) == doctest::Approx(0.6931472).epsilon(1e-5));
  CHECK(proj.support()(1, 0) == doctest::Approx(-0.6931472).epsilon(1e-5));
}

TEST_CASE("propagate: matches dense oracle on a 4x4-hypercolumn instance") {
  Population pre("pre", 0, {4, 3}, 0.005, 1e-3);
  Population post("post", 1, {4, 2}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(2), 3);
  rng::Sequence seq(99, rng::Stream::test);
  for (int i = 0; i < pre.units(); ++i) {
    for (int j = 0; j < post.units(); ++j)
      proj.joint_storage()(j, i) = 0.02 + 0.2 * seq.next_double();
  }
  for (int i = 0; i < pre.units(); ++i)
    proj.p_pre_storage()(i) = 0.1 + 0.8 * seq.next_double();
  for (int j = 0; j < post.units(); ++j)
    proj.p_post_storage()(j) = 0.1 + 0.8 * seq.next_double();
  proj.mark_weights_dirty();
  auto& z = pre.trace(proj.pre_trace_slot());
  for (int i = 0; i < pre.units(); ++i)
    z(i, 0) = seq.next_double() < 0.5 ? 0.0 : seq.next_double();
  proj.rebuild_support();

  const auto& conn = proj.connectivity();
  for (int j = 0; j < post.units(); ++j) {
    double expect = 0.0;
    for (int i = 0; i < pre.units(); ++i)
      if (conn(j / 2, i / 3)) expect += z(i, 0) * proj.weight(i, j);
    CHECK(proj.support()(j, 0) == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("propagate: event path tracks the dense product") {
  Population pre("pre", 0, {4, 4}, 0.005, 1e-3);
  Population post("post", 1, {2, 3}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(3), 5);
  rng::Sequence seq(5, rng::Stream::test);
  for (int i = 0; i < pre.units(); ++i)
    for (int j = 0; j < post.units(); ++j)
      proj.joint_storage()(j, i) = 0.02 + 0.2 * seq.next_double();
  proj.mark_weights_dirty();
  SpikeScale sc{100.0, 1e-3};
  proj.configure_propagation(Projection::PropagationPath::event, sc.mu_spk());
  proj.rebuild_support();

  std::vector<uint64_t> keys{0};
  pre.voltage().setZero();
  for (uint64_t t = 0; t < 300; ++t) {
    keys[0] = t;
    pre.softmax();
    pre.emit(true, sc, 31, keys);
    pre.update_traces(sc, true);
    proj.step_support();
    // oracle: full product over the current trace
    Eigen::VectorXf expect =
        proj.weights() * pre.trace(proj.pre_trace_slot()).col(0).cast<float>();
    CHECK((proj.support().col(0) - expect).norm() < 1e-3f);
  }
}

TEST_CASE("patch score: independent statistics give zero score") {
  Population pre("pre", 0, {3, 2}, 0.005, 1e-3);
  Population post("post", 1, {3, 2}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(2), 1);
  for (int i = 0; i < pre.units(); ++i)
    for (int j = 0; j < post.units(); ++j)
      proj.joint_storage()(j, i) = proj.p_pre()(i) * proj.p_post()(j);
  for (int hs = 0; hs < 3; ++hs)
    for (int hr = 0; hr < 3; ++hr)
      CHECK(proj.patch_score(hs, hr) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("patch score: perfectly coupled pair of binary hypercolumns") {
  Population pre("pre", 0, {1, 2}, 0.005, 1e-3);
  Population post("post", 1, {1, 2}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(1), 1);
  proj.p_pre_storage().setConstant(0.5);
  proj.p_post_storage().setConstant(0.5);
  proj.joint_storage().setZero();
  proj.joint_storage()(0, 0) = 0.5;
  proj.joint_storage()(1, 1) = 0.5;
  // one outgoing active patch: score ~ 2 * 0.5 * log 2
  CHECK(proj.patch_score(0, 0) == doctest::Approx(0.6931472).epsilon(1e-3));
}

TEST_CASE("patch score: denominator scales with sender out-degree") {
  Population pre("pre", 0, {2, 2}, 0.005, 1e-3);
  Population post("post", 1, {2, 2}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(1), 3);
  rng::Sequence seq(17, rng::Stream::test);
  for (int i = 0; i < pre.units(); ++i)
    for (int j = 0; j < post.units(); ++j)
      proj.joint_storage()(j, i) = 0.05 + 0.3 * seq.next_double();

  ConnMatrix one(2, 2), two(2, 2);
  one << 1, 0, 0, 1;  // sender 0 has out-degree 1
  two << 1, 0, 1, 0;  // sender 0 has out-degree 2
  proj.set_connectivity(one);
  double s1 = proj.patch_score(0, 0);
  proj.set_connectivity(two);
  double s2 = proj.patch_score(0, 0);
  CHECK(s2 == doctest::Approx(s1 / 2.0).epsilon(1e-12));

  // sender 1 now has no active outgoing patches
  CHECK(proj.patch_score(1, 0) == 0.0);
  CHECK(proj.patch_score(1, 1) == 0.0);
}

TEST_CASE("rewire greedy: converged state does not flip") {
  ConnMatrix conn(2, 3);
  conn << 1, 0, 1, 1, 1, 0;
  std::vector<int> outdeg = {2, 1, 1};
  Eigen::MatrixXd num(2, 3);
  num << 5.0, 0.1, 5.0, 5.0, 5.0, 0.1;
  ConnMatrix before = conn;
  int flips = rewire_greedy(num, conn, outdeg, 10);
  CHECK(flips == 0);
  CHECK((conn == before));
}

TEST_CASE("rewire greedy: picks the largest positive gap first") {
  ConnMatrix conn(2, 3);
  conn << 1, 0, 0, 0, 1, 0;
  std::vector<int> outdeg = {1, 1, 0};
  Eigen::MatrixXd num(2, 3);
  // receiver 0: active score 0.1, silent best 0.5 -> gap 0.4
  // receiver 1: active score 0.3, silent best 0.35 -> gap 0.05
  num << 0.1, 0.2, 0.5, 0.2, 0.3, 0.35;
  std::vector<double> gains;
  int flips = rewire_greedy(num, conn, outdeg, 1, &gains);
  CHECK(flips == 1);
  CHECK(conn(0, 2) == 1);
  CHECK(conn(0, 0) == 0);
  CHECK(gains[0] == doctest::Approx(0.4));
}

TEST_CASE("rewire greedy: in-degree conserved, gains positive, converges") {
  rng::Sequence seq(4242, rng::Stream::test);
  const int Hs = 8, Hr = 6, n_conn = 3;
  ConnMatrix conn = ConnMatrix::Zero(Hr, Hs);
  for (int hr = 0; hr < Hr; ++hr) {
    std::vector<int> idx(Hs);
    for (int i = 0; i < Hs; ++i) idx[i] = i;
    seq.shuffle(idx);
    for (int k = 0; k < n_conn; ++k) conn(hr, idx[k]) = 1;
  }
  std::vector<int> outdeg(Hs, 0);
  for (int hs = 0; hs < Hs; ++hs) outdeg[hs] = conn.col(hs).cast<int>().sum();
  Eigen::MatrixXd num(Hr, Hs);
  for (int hr = 0; hr < Hr; ++hr)
    for (int hs = 0; hs < Hs; ++hs) num(hr, hs) = seq.next_double();

  int total_rounds = 0;
  while (true) {
    std::vector<double> gains;
    int flips = rewire_greedy(num, conn, outdeg, 2, &gains);
    for (double g : gains) CHECK(g > 0.0);
    for (int hr = 0; hr < Hr; ++hr)
      CHECK(conn.row(hr).cast<int>().sum() == n_conn);
    if (flips == 0) break;
    ++total_rounds;
    REQUIRE(total_rounds < 1000);  // frozen stats must reach a fixed point
  }
}

TEST_CASE("rewire greedy: matches exhaustive search on a toy instance") {
  rng::Sequence seq(77, rng::Stream::test);
  const int Hs = 6, Hr = 4, n_conn = 2;
  ConnMatrix conn = ConnMatrix::Zero(Hr, Hs);
  for (int hr = 0; hr < Hr; ++hr) {
    std::vector<int> idx(Hs);
    for (int i = 0; i < Hs; ++i) idx[i] = i;
    seq.shuffle(idx);
    for (int k = 0; k < n_conn; ++k) conn(hr, idx[k]) = 1;
  }
  std::vector<int> outdeg(Hs, 0);
  for (int hs = 0; hs < Hs; ++hs) outdeg[hs] = conn.col(hs).cast<int>().sum();
  Eigen::MatrixXd num(Hr, Hs);
  for (int hr = 0; hr < Hr; ++hr)
    for (int hs = 0; hs < Hs; ++hs) num(hr, hs) = seq.next_double();

  Eigen::MatrixXd score = testing::frozen_scores(num, conn, outdeg);
  for (int n_flips = 1; n_flips <= 3; ++n_flips) {
    ConnMatrix c = conn;
    std::vector<int> od = outdeg;
    rewire_greedy(num, c, od, n_flips);
    double greedy_score = testing::total_active_score(score, c);
    double best = testing::exhaustive_best_score(score, conn, n_flips);
    CHECK(greedy_score == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("joint trace: learn steps match the scalar Euler recursion") {
  Population pre("pre", 0, {1, 2}, 0.005, 1e-3);
  Population post("post", 1, {1, 3}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(1), 1);
  auto& zi = pre.trace(proj.pre_trace_slot());
  auto& zj = post.trace(proj.post_trace_slot());
  rng::Sequence seq(3, rng::Stream::test);

  // scalar oracle for entry (i=1, j=2)
  double p_ref = proj.p_joint(1, 2);
  REQUIRE(p_ref > 0.0);
  const double lam = 1e-3 / 5.0;
  for (int t = 0; t < 500; ++t) {
    for (int i = 0; i < 2; ++i) zi(i, 0) = seq.next_double();
    for (int j = 0; j < 3; ++j) zj(j, 0) = seq.next_double();
    p_ref += lam * (zi(1, 0) * zj(2, 0) - p_ref);
    proj.learn_step();
  }
  CHECK(proj.p_joint(1, 2) == doctest::Approx(p_ref).epsilon(1e-12));
  CHECK(proj.learn_steps() == 500);
}

TEST_CASE("joint trace: marginals relax toward the unit traces") {
  Population pre("pre", 0, {1, 2}, 0.005, 1e-3);
  Population post("post", 1, {1, 2}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(1), 1);
  pre.trace(proj.pre_trace_slot()).setConstant(0.9);
  post.trace(proj.post_trace_slot()).setConstant(0.4);
  for (int t = 0; t < 25000; ++t) proj.learn_step();
  CHECK(proj.p_pre()(0) == doctest::Approx(0.9).epsilon(0.008));
  CHECK(proj.p_post()(0) == doctest::Approx(0.4).epsilon(0.008));
  CHECK(proj.p_joint(0, 0) == doctest::Approx(0.36).epsilon(0.008));
}

TEST_CASE("joint trace: joint stays below the marginals in the long run") {
  Population pre("pre", 0, {1, 2}, 0.005, 1e-3);
  Population post("post", 1, {1, 2}, 0.005, 1e-3);
  Projection proj(0, pre, post, opts(1), 1);
  auto& zi = pre.trace(proj.pre_trace_slot());
  auto& zj = post.trace(proj.post_trace_slot());
  rng::Sequence seq(8, rng::Stream::test);
  for (int t = 0; t < 20000; ++t) {
    zi.setConstant(seq.next_double() < 0.3 ? 1.0 : 0.0);
    zj.setConstant(seq.next_double() < 0.6 ? 1.0 : 0.0);
    proj.learn_step();
  }
  CHECK(proj.p_joint(0, 0) <=
        std::min(proj.p_pre()(0), proj.p_post()(0)) + 0.02);
}
