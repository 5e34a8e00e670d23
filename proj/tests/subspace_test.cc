/*
 * Copyright 2026 The Dynalign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dynalign/subspace.h"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "dynalign/errors.h"
#include "subspace_harness.h"
#include "test_util.h"

namespace dynalign {
namespace {

using Eigen::MatrixXd;

SubspaceState identity_state(const MatrixXd& u_s, const MatrixXd& u_t) {
  SubspaceState st;
  st.u_s = st.v_s = u_s;
  st.u_t = st.v_t = u_t;
  st.q_s = MatrixXd::Identity(u_s.cols(), u_s.cols());
  st.q_t = MatrixXd::Identity(u_t.cols(), u_t.cols());
  return st;
}

TEST(Objective, IdentityStateIsZero) {
  std::mt19937_64 rng(1);
  const SubspaceState st = identity_state(testing::random_matrix(4, 3, rng, 0, 1),
                                          testing::random_matrix(5, 3, rng, 0, 1));
  EXPECT_EQ(objective(st, 0.0, 0.0, IndicationPair({}, 4, 5), ObjWeights{}).total,
            0.0);
}

TEST(Objective, AgreeingAnchorsCostNothing) {
  std::mt19937_64 rng(2);
  SubspaceState st = identity_state(testing::random_matrix(4, 2, rng, 0, 1),
                                    testing::random_matrix(4, 2, rng, 0, 1));
  st.v_t.row(3) = st.v_s.row(1);
  const IndicationPair p({{1, 3}}, 4, 4);
  EXPECT_EQ(objective(st, 0.0, 0.0, p, ObjWeights{}).anchor, 0.0);
}

TEST(Objective, AnchorPenalty) {
  MatrixXd vs(1, 2), vt(1, 2);
  vs << 1, 0;
  vt << 0, 1;
  SubspaceState st = identity_state(vs, vt);
  ObjWeights w;
  w.gamma = 2.0;
  const ObjectiveTerms t = objective(st, 0.0, 0.0, IndicationPair({{0, 0}}, 1, 1), w);
  EXPECT_EQ(w.gamma * t.anchor, 4.0);
  EXPECT_EQ(t.total, 4.0);
}

TEST(Objective, SumsTerms) {
  std::mt19937_64 rng(3);
  SubspaceState st;
  st.u_s = testing::random_matrix(5, 3, rng, 0, 1);
  st.u_t = testing::random_matrix(6, 3, rng, 0, 1);
  st.v_s = testing::random_matrix(5, 2, rng, 0, 1);
  st.v_t = testing::random_matrix(6, 2, rng, 0, 1);
  st.q_s = testing::random_matrix(2, 3, rng);
  st.q_t = testing::random_matrix(2, 3, rng);
  const IndicationPair p({{0, 5}, {4, 1}}, 5, 6);
  ObjWeights w;
  w.beta = 0.5;
  w.gamma = 3.0;
  const double proj_s = (st.u_s - st.v_s * st.q_s).squaredNorm();
  const double proj_t = (st.u_t - st.v_t * st.q_t).squaredNorm();
  const double anchor = (st.v_s.row(0) - st.v_t.row(5)).squaredNorm() +
                        (st.v_s.row(4) - st.v_t.row(1)).squaredNorm();
  const ObjectiveTerms t = objective(st, 1.5, 2.5, p, w);
  EXPECT_NEAR(t.total, 1.5 + 2.5 + 0.5 * (proj_s + proj_t) + 3.0 * anchor, 1e-12);
}

TEST(Objective, NonFiniteNamesTerm) {
  SubspaceState st = identity_state(MatrixXd::Ones(2, 2), MatrixXd::Ones(2, 2));
  st.u_s(0, 0) = std::nan("");
  try {
    objective(st, 0.0, 0.0, IndicationPair({}, 2, 2), ObjWeights{});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_FALSE(e.term().empty());
  }
}

TEST(UpdateQ, IdentityVReturnsU) {
  std::mt19937_64 rng(4);
  const MatrixXd u = testing::random_matrix(4, 6, rng);
  EXPECT_LE((update_q(MatrixXd::Identity(4, 4), u, 1e-10) - u).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(UpdateQ, RecoversExactFactor) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd v = testing::random_matrix(20, 4, rng, 0, 1);
    const MatrixXd q0 = testing::random_matrix(4, 6, rng);
    EXPECT_LE((update_q(v, v * q0, 1e-10) - q0).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(UpdateQ, GradientVanishes) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXd v = testing::random_matrix(20, 4, rng, 0, 1);
    const MatrixXd u = testing::random_matrix(20, 6, rng);
    const MatrixXd q = update_q(v, u, 1e-10);
    const MatrixXd vtu = v.transpose() * u;
    const MatrixXd grad = -2.0 * vtu + 2.0 * v.transpose() * v * q;
    EXPECT_LE(grad.norm(), 1e-8 * (1.0 + vtu.norm()));
  }
}

TEST(UpdateQ, SingularUsesRidge) {
  MatrixXd v = MatrixXd::Zero(5, 3);
  v.col(0).setOnes();
  v.col(1).setOnes();
  const MatrixXd q = update_q(v, MatrixXd::Ones(5, 2), 1e-10);
  EXPECT_TRUE(q.allFinite());
  EXPECT_LE((v * q - MatrixXd::Ones(5, 2)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(UpdateQ, ScalesWithU) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd v = testing::random_matrix(15, 3, rng, 0, 1);
    const MatrixXd u = testing::random_matrix(15, 5, rng, 0, 1);
    const double c = 0.5 + trial;
    EXPECT_LE((update_q(v, c * u, 1e-10) - c * update_q(v, u, 1e-10))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10 * c);
  }
}

TEST(UpdateV, FixedPointWithoutAnchors) {
  std::mt19937_64 rng(8);
  const MatrixXd u = testing::random_matrix(6, 3, rng, 0.1, 1);
  ObjWeights w;
  w.gamma = 0.0;
  const IndicationPair none({}, 6, 6);
  const MatrixXd q = MatrixXd::Identity(3, 3);
  const MatrixXd v = update_v(u, u, q, none, Side::kSource, u, w);
  EXPECT_LE((v - u).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(kkt_residual(u, u, q, none, Side::kSource, u, w), 1e-10);
}

TEST(UpdateV, PreservesNonnegativity) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd v = testing::random_matrix(10, 3, rng, 0, 1);
    v(trial % 10, 0) = 0.0;
    const MatrixXd u = testing::random_matrix(10, 5, rng, 0, 1);
    const MatrixXd q = testing::random_matrix(3, 5, rng, -2, 2);
    const MatrixXd other = testing::random_matrix(10, 3, rng, 0, 1);
    const IndicationPair p({{0, 1}, {2, 3}}, 10, 10);
    const MatrixXd next = update_v(v, u, q, p, Side::kSource, other, ObjWeights{});
    EXPECT_GE(next.minCoeff(), 0.0);
    EXPECT_EQ(next(trial % 10, 0), 0.0);
  }
}

TEST(UpdateV, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  const MatrixXd u = testing::random_matrix(6, 4, rng, 0, 1);
  const MatrixXd q = testing::random_matrix(2, 4, rng);
  MatrixXd v = testing::random_matrix(6, 2, rng, 0, 1);
  const MatrixXd other = testing::random_matrix(5, 2, rng, 0, 1);
  const IndicationPair p({{1, 4}, {3, 0}}, 6, 5);
  ObjWeights w;
  w.beta = 0.7;
  w.gamma = 3.0;
  auto j = [&](const MatrixXd& x) {
    double a = 0.0;
    for (const AnchorPair& ap : p.rows()) {
      a += (x.row(ap.source) - other.row(ap.target)).squaredNorm();
    }
    return w.beta * (u - x * q).squaredNorm() + w.gamma * a;
  };
  const MatrixXd g = grad_v(v, u, q, p, Side::kSource, other, w);
  for (int k = 0; k < v.size(); ++k) {
    const double saved = v.data()[k];
    v.data()[k] = saved + 1e-6;
    const double up = j(v);
    v.data()[k] = saved - 1e-6;
    const double down = j(v);
    v.data()[k] = saved;
    EXPECT_NEAR(g.data()[k], (up - down) / 2e-6, 1e-6);
  }
}

TEST(UpdateV, TargetSideUsesReversedAnchors) {
  std::mt19937_64 rng(11);
  const MatrixXd vs = testing::random_matrix(4, 2, rng, 0.1, 1);
  const MatrixXd vt = testing::random_matrix(3, 2, rng, 0.1, 1);
  const MatrixXd ut = testing::random_matrix(3, 3, rng, 0, 1);
  const MatrixXd q = testing::random_matrix(2, 3, rng);
  const IndicationPair p({{3, 1}}, 4, 3);
  const ObjWeights w;
  EXPECT_EQ(update_v(vt, ut, q, p, Side::kTarget, vs, w),
            update_v(vt, ut, q, p.reversed(), Side::kSource, vs, w));
}

// Two users per side, one identity dimension, one anchor. The limit of the
// multiplicative updates is compared against projected gradient descent on
// the same quadratic.
TEST(UpdateV, AgreesWithProjectedGradientOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd us = testing::random_matrix(2, 3, rng, 0.1, 1);
    const MatrixXd ut = testing::random_matrix(2, 3, rng, 0.1, 1);
    const MatrixXd qs = testing::random_matrix(1, 3, rng, 0.1, 1);
    const MatrixXd qt = testing::random_matrix(1, 3, rng, 0.1, 1);
    const IndicationPair p({{0, 1}}, 2, 2);
    ObjWeights w;
    auto j = [&](const MatrixXd& vs, const MatrixXd& vt) {
      return w.beta * ((us - vs * qs).squaredNorm() + (ut - vt * qt).squaredNorm()) +
             w.gamma * (vs.row(0) - vt.row(1)).squaredNorm();
    };

    MatrixXd vs = MatrixXd::Constant(2, 1, 0.5), vt = vs;
    for (int k = 0; k < 20000; ++k) {
      vs = update_v(vs, us, qs, p, Side::kSource, vt, w);
      vt = update_v(vt, ut, qt, p, Side::kTarget, vs, w);
    }

    MatrixXd ps = MatrixXd::Constant(2, 1, 0.5), pt = ps;
    const double lr = 1.0 / (2.0 * (w.beta * std::max(qs.squaredNorm(), qt.squaredNorm()) +
                                    2.0 * w.gamma));
    for (int k = 0; k < 200000; ++k) {
      const MatrixXd gs = grad_v(ps, us, qs, p, Side::kSource, pt, w);
      const MatrixXd gt = grad_v(pt, ut, qt, p, Side::kTarget, ps, w);
      ps = (ps - lr * gs).cwiseMax(0.0);
      pt = (pt - lr * gt).cwiseMax(0.0);
    }
    EXPECT_NEAR(j(vs, vt), j(ps, pt), 1e-6);
  }
}

TEST(Alternating, FrozenThetaDescendsAndStaysNonnegative) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    testing::FrozenInstance f = testing::frozen_instance(30, 8, 4, 5, rng);
    const testing::FrozenRun r = testing::run_frozen(f, 200);
    EXPECT_LE(r.worst_increase, 1e-9);
    EXPECT_TRUE(r.nonnegative);
    EXPECT_GE(r.final_kkt, 0.0);
    EXPECT_LE(r.final_kkt, r.initial_kkt);
  }
}

TEST(Alternating, KktResidualDecreases) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    testing::FrozenInstance f = testing::frozen_instance(12, 5, 3, 3, rng);
    double previous = testing::kkt_both(f);
    int rises = 0;
    for (int k = 0; k < 100; ++k) {
      alternate_qv(f.state, 0.0, 0.0, f.anchors, f.w);
      const double now = testing::kkt_both(f);
      if (now > previous * 1.05) ++rises;
      previous = now;
    }
    EXPECT_EQ(rises, 0);
  }
}

struct SmallNetworks {
  EgoTensor ego_s, ego_t;
  SparseMatrix lap_s, lap_t;
  IndicationPair anchors;
};

SmallNetworks small_networks() {
  std::mt19937_64 rng(15);
  SmallNetworks s;
  const DynamicGraph gs = testing::random_dynamic_graph(12, 3, 0.3, rng);
  const DynamicGraph gt = testing::random_dynamic_graph(10, 3, 0.3, rng);
  s.ego_s = build_ego_tensor(gs, RwrConfig{}, 4);
  s.ego_t = build_ego_tensor(gt, RwrConfig{}, 4);
  s.lap_s = laplacian(aggregate_with_decay(gs));
  s.lap_t = laplacian(aggregate_with_decay(gt));
  s.anchors = build_indication({{0, 0}, {3, 5}, {7, 2}}, 12, 10);
  return s;
}

TEST(UpdateV, FixedQReachesKktPoint) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    testing::FrozenInstance f = testing::frozen_instance(30, 8, 4, 5, rng);
    EXPECT_LE(testing::run_v_only(f, 5000), 1e-8);
    EXPECT_GE(f.state.v_s.minCoeff(), 0.0);
    EXPECT_GE(f.state.v_t.minCoeff(), 0.0);
  }
}

TEST(Alternating, ZeroRoundsKeepsInitialization) {
  const SmallNetworks n = small_networks();
  TrainConfig cfg;
  cfg.pretrain_epochs = 3;
  Schedule sched;
  sched.max_rounds = 0;
  const NetParams p = NetParams::random(4, 6, 1);
  const AlternatingResult r =
      run_alternating({n.ego_s, n.lap_s}, {n.ego_t, n.lap_t}, p, p, n.anchors,
                      cfg, cfg, ObjWeights{}, 6, sched);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.state.round, 0);
  const NetParams warmed = pretrain(p, n.ego_s, n.lap_s, cfg);
  EXPECT_EQ(r.params_s.out_w, warmed.out_w);
  EXPECT_EQ(r.state.v_s, initial_identity(r.state.u_s, 6));
  EXPECT_EQ(r.state.u_s, embed(warmed, n.ego_s));
}

TEST(Alternating, FrozenLearningRateIsMonotone) {
  const SmallNetworks n = small_networks();
  TrainConfig cfg;
  cfg.learning_rate = 1e-300;
  cfg.pretrain_epochs = 0;
  cfg.keep_prob = 1.0;
  Schedule sched;
  sched.max_rounds = 10;
  sched.tol = 0.0;
  std::vector<std::pair<std::string, double>> steps;
  run_alternating({n.ego_s, n.lap_s}, {n.ego_t, n.lap_t}, NetParams::random(4, 6, 1),
                  NetParams::random(4, 6, 1), n.anchors, cfg, cfg, ObjWeights{}, 3,
                  sched, [&](std::string_view name, double j) {
                    steps.emplace_back(std::string(name), j);
                  });
  ASSERT_FALSE(steps.empty());
  for (std::size_t k = 1; k < steps.size(); ++k) {
    EXPECT_LE(steps[k].second, steps[k - 1].second * (1.0 + 1e-9))
        << steps[k].first << " at " << k;
  }
}

TEST(Alternating, ReproducibleTraces) {
  const SmallNetworks n = small_networks();
  TrainConfig cfg;
  cfg.pretrain_epochs = 5;
  cfg.epochs_per_round = 2;
  cfg.batch_size = 5;
  Schedule sched;
  sched.max_rounds = 3;
  auto run = [&] {
    std::ostringstream out;
    const AlternatingResult r = run_alternating(
        {n.ego_s, n.lap_s}, {n.ego_t, n.lap_t}, NetParams::random(4, 6, 1),
        NetParams::random(4, 6, 1), n.anchors, cfg, cfg, ObjWeights{}, 6, sched);
    write_trace_csv(out, r.trace, "h");
    EXPECT_EQ(r.trace.size(), static_cast<std::size_t>(r.state.round));
    return out.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(Alternating, RejectsMismatchedAnchors) {
  const SmallNetworks n = small_networks();
  EXPECT_THROW(run_alternating({n.ego_s, n.lap_s}, {n.ego_t, n.lap_t},
                               NetParams::random(4, 6, 1), NetParams::random(4, 6, 1),
                               build_indication({}, 3, 3), TrainConfig{},
                               TrainConfig{}, ObjWeights{}, 6, Schedule{}),
               DataError);
}

TEST(MatrixCsv, RoundTrip) {
  std::mt19937_64 rng(16);
  const MatrixXd m = testing::random_matrix(4, 3, rng);
  std::stringstream ss;
  write_matrix_csv(ss, m, "cafe");
  std::string hash;
  EXPECT_EQ(read_matrix_csv(ss, &hash), m);
  EXPECT_EQ(hash, "cafe");
}

TEST(TraceCsv, Columns) {
  std::ostringstream out;
  write_trace_csv(out, {TraceRow{}}, "h");
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# config_hash=h");
  std::getline(in, line);
  EXPECT_EQ(line,
            "round,J_total,recon_s,recon_t,reg_s,reg_t,proj_s,proj_t,"
            "anchor_penalty,kkt_s,kkt_t");
}

}  // namespace
}  // namespace dynalign
