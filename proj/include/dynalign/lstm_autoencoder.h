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

#ifndef DYNALIGN_LSTM_AUTOENCODER_H_
#define DYNALIGN_LSTM_AUTOENCODER_H_

// LSTM autoencoder over ego-vector sequences with a Laplacian consistency
// penalty on the encoder output. All batched routines put users on rows:
// inputs are N x W per step, hidden states N x D^u.
//
// Cell (sigmoid gates, ReLU in place of tanh):
//   f, i, o = sigmoid(W_g [h_prev, x] + b_g)
//   c~      = relu(W_c [h_prev, x] + b_c)
//   c       = f * c_prev + i * c~
//   h       = o * relu(c)

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dynalign/graph.h"
#include "dynalign/rwr.h"

namespace dynalign {

struct LstmCellParams {
  // D^u x (D^u + input_width); the first D^u columns act on h_prev.
  Eigen::MatrixXd w_f, w_i, w_o, w_c;
  Eigen::VectorXd b_f, b_i, b_o, b_c;

  static LstmCellParams zeros(int hidden, int input_width);
  int hidden() const { return static_cast<int>(w_f.rows()); }
  int input_width() const { return static_cast<int>(w_f.cols()) - hidden(); }
};

struct TensorRef {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  Eigen::Map<Eigen::VectorXd> flat() const { return {data, rows * cols}; }
};

struct ConstTensorRef {
  std::string name;
  const double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  Eigen::Map<const Eigen::VectorXd> flat() const { return {data, rows * cols}; }
};

// Encoder over W-wide ego vectors, an input-free decoder and the output
// layer mapping decoder hidden states back to W-vectors.
struct NetParams {
  LstmCellParams encoder;
  LstmCellParams decoder;
  Eigen::MatrixXd out_w;  // W x D^u
  Eigen::VectorXd out_b;  // W

  static NetParams zeros(int width, int hidden);
  // Uniform in [-0.05, 0.05]; forget-gate biases start at 1.
  static NetParams random(int width, int hidden, std::uint64_t seed);

  int width() const { return static_cast<int>(out_w.rows()); }
  int hidden() const { return encoder.hidden(); }

  // Every tensor in a fixed order, with column-major storage exposed.
  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;

  double squared_norm() const;
  bool same_shape(const NetParams& other) const;
};

struct CellState {
  Eigen::MatrixXd h;
  Eigen::MatrixXd c;
};

// Everything one batched cell step needs for backprop.
struct StepCache {
  Eigen::MatrixXd h_prev, c_prev, input;
  Eigen::MatrixXd f, i, o;
  Eigen::MatrixXd c_tilde_pre, c_tilde;
  Eigen::MatrixXd c, h;
};

// Batched step. `x` may have zero columns for an input-free cell.
StepCache cell_step(const LstmCellParams& p, const Eigen::MatrixXd& h_prev,
                    const Eigen::MatrixXd& c_prev, const Eigen::MatrixXd& x);

// Single-user form of cell_step.
CellState cell_forward(const LstmCellParams& p, const Eigen::VectorXd& h_prev,
                       const Eigen::VectorXd& c_prev, const Eigen::VectorXd& x);

struct EncodeResult {
  Eigen::MatrixXd embedding;  // N x D^u, entrywise >= 0
  std::vector<StepCache> steps;
};

// Runs the encoder over steps 1..M from zero state.
EncodeResult encode(const NetParams& p, std::span<const Eigen::MatrixXd> inputs);

struct DecodeResult {
  // reconstructions[m] approximates inputs[m]; the decoder emits M..1 and
  // the order is flipped back here.
  std::vector<Eigen::MatrixXd> reconstructions;
  std::vector<StepCache> steps;  // decoder order
};

// Decoder starts from hidden = u, cell = 0, with empty step inputs.
DecodeResult decode(const NetParams& p, const Eigen::MatrixXd& u,
                    int num_steps);

// Dual embedding U for every user (no dropout).
Eigen::MatrixXd embed(const NetParams& p, const EgoTensor& ego);

struct TrainConfig {
  double alpha = 0.1;       // consistency weight
  double beta = 1.0;        // projection weight
  double keep_prob = 0.8;   // dropout keep probability on encoder inputs
  double l2 = 1e-6;         // weight decay on every parameter
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs_per_round = 5;
  int pretrain_epochs = 100;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 1;

  void validate() const;
};

// U ~ V Q target of the projection term.
struct ProjectionTarget {
  const Eigen::MatrixXd& v;  // N x D^c
  const Eigen::MatrixXd& q;  // D^c x D^u
};

struct LossBreakdown {
  double reconstruction = 0.0;  // ||X - X^||_F^2
  double consistency = 0.0;     // Tr[U^T L U]
  double projection = 0.0;      // ||U - V Q||_F^2
  double weight_norm = 0.0;     // ||Theta||^2
  double total = 0.0;           // with alpha, beta and l2 applied
};

struct LossResult {
  LossBreakdown loss;
  NetParams grads;
  Eigen::MatrixXd embedding;       // U (rows follow the batch when given)
  Eigen::MatrixXd grad_embedding;  // dLoss/dU, decoder path plus direct terms
};

// Options for a single loss evaluation.
struct LossOptions {
  const ProjectionTarget* projection = nullptr;  // beta term off when null
  std::mt19937_64* dropout_rng = nullptr;        // dropout off when null
  std::span<const int> batch = {};               // empty = every user
};

// Loss and exact gradients of
//   ||X - X^||^2 + alpha Tr[U^T L U] + beta ||U - VQ||^2 + l2 ||Theta||^2.
// With a batch, X, V rows and L rows/columns are restricted to it.
// Throws NumericalError naming the first non-finite term.
LossResult loss_and_grads(const NetParams& p, const EgoTensor& ego,
                          const SparseMatrix& laplacian,
                          const TrainConfig& cfg,
                          const LossOptions& options = {});

// The part of the loss downstream of U, as a function of U alone. Used to
// check the direct dLoss/dU path. Decoder/output-layer gradients land in
// `grads` when non-null.
double embedding_loss(const NetParams& p, const Eigen::MatrixXd& u,
                      std::span<const Eigen::MatrixXd> targets,
                      const SparseMatrix& laplacian, const TrainConfig& cfg,
                      const ProjectionTarget* projection,
                      Eigen::MatrixXd* grad_u, NetParams* grads,
                      LossBreakdown* breakdown = nullptr);

// Smallest |pre-activation| over every ReLU input that can change sign, for
// a forward pass without dropout. Cell states are nonnegative by
// construction; an exact zero only arises from a zero previous state and a
// clamped candidate, which stays put under small perturbations, so only
// nonzero cell entries count.
double min_relu_margin(const NetParams& p, const EgoTensor& ego);

struct AdamState {
  std::vector<Eigen::VectorXd> m;
  std::vector<Eigen::VectorXd> v;
  std::int64_t step = 0;
};

// One Adam step: rate cfg.learning_rate, decays cfg.adam_beta1/2.
void train_step(NetParams& p, const NetParams& grads, AdamState& state,
                const TrainConfig& cfg);

// Owns one network's parameters, optimizer state and dropout stream.
class AutoencoderTrainer {
 public:
  AutoencoderTrainer(NetParams params, TrainConfig cfg);

  // One pass over all users (full batch, or shuffled mini-batches). Returns
  // the summed loss of the steps taken.
  double run_epoch(const EgoTensor& ego, const SparseMatrix& laplacian,
                   const ProjectionTarget* projection);

  const NetParams& params() const { return params_; }
  const TrainConfig& config() const { return cfg_; }

 private:
  NetParams params_;
  TrainConfig cfg_;
  AdamState adam_;
  std::mt19937_64 rng_;
};

// cfg.pretrain_epochs epochs on the autoencoder loss alone (no beta term).
NetParams pretrain(const NetParams& p, const EgoTensor& ego,
                   const SparseMatrix& laplacian, const TrainConfig& cfg);

// Checkpoint text format: a header with the config hash, then per tensor
// "name rows cols" followed by its values.
void write_params(std::ostream& out, const NetParams& p,
                  const std::string& config_hash);
NetParams read_params(std::istream& in, std::string* config_hash = nullptr);

// CSV with header user_id,d_1..d_D.
void write_embedding_csv(std::ostream& out, const Eigen::MatrixXd& u,
                         const std::vector<std::string>* user_ids = nullptr);

}  // namespace dynalign

#endif  // DYNALIGN_LSTM_AUTOENCODER_H_
