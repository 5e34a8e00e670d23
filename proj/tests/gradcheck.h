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

#ifndef DYNALIGN_TESTS_GRADCHECK_H_
#define DYNALIGN_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dynalign/lstm_autoencoder.h"
#include "dynalign/rwr.h"
#include "test_util.h"

namespace dynalign::testing {

// Relative error with a floor so entries whose true value is ~0 are judged
// on an absolute scale.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

struct GradInstance {
  NetParams params;
  EgoTensor ego;
  SparseMatrix laplacian;
  Eigen::MatrixXd v, q;
  TrainConfig cfg;
};

inline NetParams scaled_random_params(int width, int hidden, double scale,
                                      std::mt19937_64& rng) {
  NetParams p = NetParams::zeros(width, hidden);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (TensorRef t : p.tensors()) {
    for (Eigen::Index k = 0; k < t.rows * t.cols; ++k) t.data[k] = u(rng);
  }
  return p;
}

// Draws instances until every ReLU input is at least `margin` from its kink.
inline GradInstance smooth_instance(int n, int w, int m, int hidden,
                                    std::mt19937_64& rng,
                                    double margin = 1e-3) {
  for (;;) {
    GradInstance g;
    g.params = scaled_random_params(w, hidden, 0.6, rng);
    g.ego.num_users = n;
    g.ego.width = w;
    g.ego.ego_indices.assign(n, std::vector<int>(w, 0));
    for (int k = 0; k < m; ++k) {
      g.ego.slices.push_back(random_matrix(n, w, rng, 0.0, 1.0));
    }
    g.laplacian = laplacian(random_adjacency(n, 0.6, false, rng));
    g.v = random_matrix(n, 3, rng, 0.0, 1.0);
    g.q = random_matrix(3, hidden, rng);
    g.cfg.alpha = 0.3;
    g.cfg.beta = 0.7;
    g.cfg.l2 = 1e-3;
    g.cfg.keep_prob = 1.0;
    if (min_relu_margin(g.params, g.ego) > margin) return g;
  }
}

struct GradReport {
  double max_param_error = 0.0;
  double max_embedding_error = 0.0;
  std::string worst;
};

// Central differences over every parameter and over U for the direct path.
inline GradReport check_gradients(GradInstance& g, double step = 1e-5) {
  GradReport report;
  const ProjectionTarget proj{g.v, g.q};
  LossOptions opts;
  opts.projection = &proj;
  const LossResult analytic =
      loss_and_grads(g.params, g.ego, g.laplacian, g.cfg, opts);
  const auto grad_tensors = analytic.grads.tensors();
  auto tensors = g.params.tensors();
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    for (Eigen::Index k = 0; k < tensors[t].rows * tensors[t].cols; ++k) {
      double& x = tensors[t].data[k];
      const double saved = x;
      x = saved + step;
      const double up =
          loss_and_grads(g.params, g.ego, g.laplacian, g.cfg, opts).loss.total;
      x = saved - step;
      const double down =
          loss_and_grads(g.params, g.ego, g.laplacian, g.cfg, opts).loss.total;
      x = saved;
      const double fd = (up - down) / (2.0 * step);
      const double err = relative_error(grad_tensors[t].data[k], fd);
      if (err > report.max_param_error) {
        report.max_param_error = err;
        report.worst = tensors[t].name + "[" + std::to_string(k) + "]";
      }
    }
  }

  Eigen::MatrixXd u = analytic.embedding;
  Eigen::MatrixXd grad_u;
  embedding_loss(g.params, u, g.ego.slices, g.laplacian, g.cfg, &proj, &grad_u,
                 nullptr);
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double saved = u.data()[k];
    u.data()[k] = saved + step;
    const double up = embedding_loss(g.params, u, g.ego.slices, g.laplacian,
                                     g.cfg, &proj, nullptr, nullptr);
    u.data()[k] = saved - step;
    const double down = embedding_loss(g.params, u, g.ego.slices, g.laplacian,
                                       g.cfg, &proj, nullptr, nullptr);
    u.data()[k] = saved;
    report.max_embedding_error =
        std::max(report.max_embedding_error,
                 relative_error(grad_u.data()[k], (up - down) / (2.0 * step)));
  }
  return report;
}

}  // namespace dynalign::testing

#endif  // DYNALIGN_TESTS_GRADCHECK_H_
