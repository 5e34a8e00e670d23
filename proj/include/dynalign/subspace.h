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

#ifndef DYNALIGN_SUBSPACE_H_
#define DYNALIGN_SUBSPACE_H_

// Common identity subspace: U ~ V Q per network with V >= 0, tied across
// networks at the anchors, and the alternating solver that interleaves it
// with autoencoder training.

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynalign/errors.h"
#include "dynalign/graph.h"
#include "dynalign/lstm_autoencoder.h"
#include "dynalign/rwr.h"

namespace dynalign {

struct ObjWeights {
  double alpha = 0.1;
  double beta = 1.0;
  double gamma = 10.0;
  double eps_div = 1e-12;
  double ridge = 1e-10;

  void validate() const;
};

struct SubspaceState {
  Eigen::MatrixXd u_s, u_t;  // N x D^u, >= 0
  Eigen::MatrixXd v_s, v_t;  // N x D^c, >= 0
  Eigen::MatrixXd q_s, q_t;  // D^c x D^u
  int round = 0;
};

// Which side of the anchor pair an update acts on.
enum class Side { kSource, kTarget };

// Per-term values; `total` applies the weights.
struct ObjectiveTerms {
  double loss_s = 0.0;  // D^s as supplied
  double loss_t = 0.0;
  double proj_s = 0.0;  // ||U_s - V_s Q_s||^2
  double proj_t = 0.0;
  double anchor = 0.0;  // ||P_s V_s - P_t V_t||^2
  double total = 0.0;
};

// J = D_s + beta ||U_s - V_s Q_s||^2 + D_t + beta ||U_t - V_t Q_t||^2
//     + gamma ||P_s V_s - P_t V_t||^2.
// Throws NumericalError naming a non-finite term.
ObjectiveTerms objective(const SubspaceState& state, double loss_s,
                         double loss_t, const IndicationPair& anchors,
                         const ObjWeights& w);

// argmin_Q ||U - V Q||^2 = (V^T V)^-1 V^T U. A ridge is added only when V^T V
// is numerically singular (condition estimate above 1e12).
Eigen::MatrixXd update_q(const Eigen::MatrixXd& v, const Eigen::MatrixXd& u,
                         double ridge);

// Multiplicative, nonnegativity-preserving update of one network's V:
//   V <- V * sqrt((beta (Psi + V Gamma) + gamma Lambda)
//                 / (beta (Upsilon + V Phi) + gamma Pi + eps_div))
// with Psi/Upsilon the positive/negative parts of U Q^T, Phi/Gamma those of
// Q Q^T, Pi = P^T P V and Lambda = P^T P' V' (the other network's anchor rows
// scattered onto this network's anchor indices).
Eigen::MatrixXd update_v(const Eigen::MatrixXd& v, const Eigen::MatrixXd& u,
                         const Eigen::MatrixXd& q, const IndicationPair& anchors,
                         Side side, const Eigen::MatrixXd& other_v,
                         const ObjWeights& w);

// Gradient of J with respect to one network's V.
Eigen::MatrixXd grad_v(const Eigen::MatrixXd& v, const Eigen::MatrixXd& u,
                       const Eigen::MatrixXd& q, const IndicationPair& anchors,
                       Side side, const Eigen::MatrixXd& other_v,
                       const ObjWeights& w);

// max_ij |[grad_V J]_ij [V]_ij|; zero exactly at KKT points.
double kkt_residual(const Eigen::MatrixXd& v, const Eigen::MatrixXd& u,
                    const Eigen::MatrixXd& q, const IndicationPair& anchors,
                    Side side, const Eigen::MatrixXd& other_v,
                    const ObjWeights& w);

// Called after each sub-step of the alternating loop with the step name
// ("theta", "q_s", "q_t", "v_s", "v_t") and the objective right after it.
using StepObserver = std::function<void(std::string_view, double)>;

// One Q_s, Q_t, V_s, V_t sweep with U and the autoencoder losses held fixed.
void alternate_qv(SubspaceState& state, double loss_s, double loss_t,
                  const IndicationPair& anchors, const ObjWeights& w,
                  const StepObserver& observer = {});

struct TraceRow {
  int round = 0;
  double j_total = 0.0;
  double recon_s = 0.0, recon_t = 0.0;
  double reg_s = 0.0, reg_t = 0.0;
  double proj_s = 0.0, proj_t = 0.0;
  double anchor_penalty = 0.0;
  double kkt_s = 0.0, kkt_t = 0.0;
};

// Raised when the objective blows past divergence_factor times its initial
// value; carries the trace up to that point.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::vector<TraceRow> trace)
      : NumericalError("objective", what), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

struct Schedule {
  int max_rounds = 20;
  double tol = 1e-5;
  double divergence_factor = 10.0;
  bool pretrain = true;
};

// One network's fixed inputs.
struct NetworkInputs {
  const EgoTensor& ego;
  const SparseMatrix& laplacian;
};

struct AlternatingResult {
  NetParams params_s, params_t;
  SubspaceState state;
  std::vector<TraceRow> trace;
  double initial_objective = 0.0;
  bool converged = false;
};

// Initial identity embedding from U: the leading identity_dim columns of U
// (zero-padded when identity_dim exceeds D^u) plus 1e-6, so every entry is
// strictly positive.
Eigen::MatrixXd initial_identity(const Eigen::MatrixXd& u, int identity_dim);

// Pretrain both autoencoders, initialize V from U, then per round: train
// both networks for epochs_per_round on their full objective, refresh U,
// update Q_s, Q_t, then V_s, V_t (V_t sees the new V_s). Stops when the
// relative change of J drops below tol or after max_rounds. Throws
// NumericalError when J exceeds divergence_factor times its initial value.
AlternatingResult run_alternating(const NetworkInputs& source,
                                  const NetworkInputs& target,
                                  NetParams params_s, NetParams params_t,
                                  const IndicationPair& anchors,
                                  const TrainConfig& train_s,
                                  const TrainConfig& train_t,
                                  const ObjWeights& w, int identity_dim,
                                  const Schedule& schedule,
                                  const StepObserver& observer = {});

// CSV: round,J_total,recon_s,recon_t,reg_s,reg_t,proj_s,proj_t,
// anchor_penalty,kkt_s,kkt_t.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace,
                     const std::string& config_hash);
// Matrix CSV with a "# rows cols" shape header.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::string& config_hash);
Eigen::MatrixXd read_matrix_csv(std::istream& in,
                                std::string* config_hash = nullptr);

}  // namespace dynalign

#endif  // DYNALIGN_SUBSPACE_H_
