#pragma once

#include <vector>

#include "bcpnn/projection.hpp"

namespace bcpnn::testing {

// Per-patch prices as frozen at the start of a rewiring step: active
// patches at their current denominator, silent ones at the denominator a
// flip would give them.
inline Eigen::MatrixXd frozen_scores(const Eigen::MatrixXd& num,
                                     const ConnMatrix& conn,
                                     const std::vector<int>& outdeg) {
  Eigen::MatrixXd score = num;
  for (int hs = 0; hs < score.cols(); ++hs)
    for (int hr = 0; hr < score.rows(); ++hr)
      score(hr, hs) /=
          conn(hr, hs) ? std::max(outdeg[hs], 1) : outdeg[hs] + 1;
  return score;
}

inline double total_active_score(const Eigen::MatrixXd& score,
                                 const ConnMatrix& conn) {
  double total = 0.0;
  for (int hr = 0; hr < conn.rows(); ++hr)
    for (int hs = 0; hs < conn.cols(); ++hs)
      if (conn(hr, hs)) total += score(hr, hs);
  return total;
}

// Brute force over every sequence of at most max_flips (receiver, active,
// silent) swaps; returns the best reachable total active score under the
// step's frozen pricing.
inline double exhaustive_best_score(const Eigen::MatrixXd& score,
                                    ConnMatrix conn, int max_flips) {
  double best = total_active_score(score, conn);
  if (max_flips == 0) return best;
  const int Hj = static_cast<int>(conn.rows());
  const int Hi = static_cast<int>(conn.cols());
  for (int hr = 0; hr < Hj; ++hr) {
    for (int a = 0; a < Hi; ++a) {
      if (!conn(hr, a)) continue;
      for (int s = 0; s < Hi; ++s) {
        if (conn(hr, s)) continue;
        conn(hr, a) = 0;
        conn(hr, s) = 1;
        double sub = exhaustive_best_score(score, conn, max_flips - 1);
        if (sub > best) best = sub;
        conn(hr, a) = 1;
        conn(hr, s) = 0;
      }
    }
  }
  return best;
}

}  // namespace bcpnn::testing
