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

#include "dynalign/lstm_autoencoder.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "dynalign/errors.h"

namespace dynalign {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sigmoid(const MatrixXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

MatrixXd relu(const MatrixXd& z) { return z.cwiseMax(0.0); }

MatrixXd step_mask(const MatrixXd& z) {
  return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

MatrixXd affine(const MatrixXd& w, const VectorXd& b, const MatrixXd& h_prev,
                const MatrixXd& x) {
  const Eigen::Index hidden = w.rows();
  MatrixXd z = h_prev * w.leftCols(hidden).transpose();
  if (x.cols() > 0) z.noalias() += x * w.rightCols(x.cols()).transpose();
  z.rowwise() += b.transpose();
  return z;
}

void add_gate_grads(const MatrixXd& dz, const StepCache& s, MatrixXd& dw,
                    VectorXd& db) {
  const Eigen::Index hidden = s.h_prev.cols();
  dw.leftCols(hidden).noalias() += dz.transpose() * s.h_prev;
  if (s.input.cols() > 0) {
    dw.rightCols(s.input.cols()).noalias() += dz.transpose() * s.input;
  }
  db += dz.colwise().sum().transpose();
}

// Backprop through one cell step. On entry dh/dc hold the gradient w.r.t.
// the step's h and c; on exit they hold the gradient w.r.t. h_prev, c_prev.
void cell_backward(const LstmCellParams& p, const StepCache& s,
                   LstmCellParams& g, MatrixXd& dh, MatrixXd& dc) {
  const Eigen::Index hidden = p.hidden();
  const MatrixXd dc_total =
      dc + dh.cwiseProduct(s.o).cwiseProduct(step_mask(s.c));
  const MatrixXd d_o = dh.cwiseProduct(relu(s.c));

  const MatrixXd dz_f = dc_total.cwiseProduct(s.c_prev).cwiseProduct(
      s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
  const MatrixXd dz_i = dc_total.cwiseProduct(s.c_tilde).cwiseProduct(
      s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
  const MatrixXd dz_o =
      d_o.cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
  const MatrixXd dz_c =
      dc_total.cwiseProduct(s.i).cwiseProduct(step_mask(s.c_tilde_pre));

  add_gate_grads(dz_f, s, g.w_f, g.b_f);
  add_gate_grads(dz_i, s, g.w_i, g.b_i);
  add_gate_grads(dz_o, s, g.w_o, g.b_o);
  add_gate_grads(dz_c, s, g.w_c, g.b_c);

  dh = dz_f * p.w_f.leftCols(hidden) + dz_i * p.w_i.leftCols(hidden) +
       dz_o * p.w_o.leftCols(hidden) + dz_c * p.w_c.leftCols(hidden);
  dc = dc_total.cwiseProduct(s.f);
}

std::vector<MatrixXd> gather_rows(const std::vector<MatrixXd>& slices,
                                  std::span<const int> rows) {
  std::vector<MatrixXd> out;
  out.reserve(slices.size());
  for (const MatrixXd& s : slices) {
    MatrixXd r(rows.size(), s.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) r.row(k) = s.row(rows[k]);
    out.push_back(std::move(r));
  }
  return out;
}

MatrixXd gather_rows(const MatrixXd& m, std::span<const int> rows) {
  MatrixXd r(rows.size(), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) r.row(k) = m.row(rows[k]);
  return r;
}

SparseMatrix restrict_laplacian(const SparseMatrix& l,
                                std::span<const int> rows) {
  std::unordered_map<int, int> position;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    position.emplace(rows[k], static_cast<int>(k));
  }
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (SparseMatrix::InnerIterator it(l, rows[k]); it; ++it) {
      auto found = position.find(static_cast<int>(it.col()));
      if (found != position.end()) {
        t.emplace_back(static_cast<int>(k), found->second, it.value());
      }
    }
  }
  SparseMatrix out(rows.size(), rows.size());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

void check_finite(double value, const char* term) {
  if (!std::isfinite(value)) {
    throw NumericalError(term, std::string("non-finite loss term: ") + term);
  }
}

void fill_uniform(MatrixXd& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
}

void fill_uniform(VectorXd& v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = dist(rng);
}

LstmCellParams random_cell(int hidden, int input_width, std::mt19937_64& rng) {
  LstmCellParams c = LstmCellParams::zeros(hidden, input_width);
  for (MatrixXd* w : {&c.w_f, &c.w_i, &c.w_o, &c.w_c}) fill_uniform(*w, rng);
  for (VectorXd* b : {&c.b_f, &c.b_i, &c.b_o, &c.b_c}) fill_uniform(*b, rng);
  c.b_f.setOnes();
  return c;
}

template <typename Ref, typename Cell, typename Ptr>
void push_cell(std::vector<Ref>& out, const std::string& prefix, Cell& c) {
  auto add = [&](const char* name, auto& m) {
    out.push_back(Ref{prefix + name, static_cast<Ptr>(m.data()), m.rows(),
                      m.cols()});
  };
  add(".w_f", c.w_f);
  add(".w_i", c.w_i);
  add(".w_o", c.w_o);
  add(".w_c", c.w_c);
  add(".b_f", c.b_f);
  add(".b_i", c.b_i);
  add(".b_o", c.b_o);
  add(".b_c", c.b_c);
}

}  // namespace

LstmCellParams LstmCellParams::zeros(int hidden, int input_width) {
  LstmCellParams c;
  for (MatrixXd* w : {&c.w_f, &c.w_i, &c.w_o, &c.w_c}) {
    *w = MatrixXd::Zero(hidden, hidden + input_width);
  }
  for (VectorXd* b : {&c.b_f, &c.b_i, &c.b_o, &c.b_c}) {
    *b = VectorXd::Zero(hidden);
  }
  return c;
}

NetParams NetParams::zeros(int width, int hidden) {
  NetParams p;
  p.encoder = LstmCellParams::zeros(hidden, width);
  p.decoder = LstmCellParams::zeros(hidden, 0);
  p.out_w = MatrixXd::Zero(width, hidden);
  p.out_b = VectorXd::Zero(width);
  return p;
}

NetParams NetParams::random(int width, int hidden, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NetParams p;
  p.encoder = random_cell(hidden, width, rng);
  p.decoder = random_cell(hidden, 0, rng);
  p.out_w = MatrixXd(width, hidden);
  p.out_b = VectorXd(width);
  fill_uniform(p.out_w, rng);
  fill_uniform(p.out_b, rng);
  return p;
}

std::vector<TensorRef> NetParams::tensors() {
  std::vector<TensorRef> out;
  push_cell<TensorRef, LstmCellParams, double*>(out, "encoder", encoder);
  push_cell<TensorRef, LstmCellParams, double*>(out, "decoder", decoder);
  out.push_back({"out.w", out_w.data(), out_w.rows(), out_w.cols()});
  out.push_back({"out.b", out_b.data(), out_b.rows(), out_b.cols()});
  return out;
}

std::vector<ConstTensorRef> NetParams::tensors() const {
  std::vector<ConstTensorRef> out;
  push_cell<ConstTensorRef, const LstmCellParams, const double*>(out, "encoder",
                                                                 encoder);
  push_cell<ConstTensorRef, const LstmCellParams, const double*>(out, "decoder",
                                                                 decoder);
  out.push_back({"out.w", out_w.data(), out_w.rows(), out_w.cols()});
  out.push_back({"out.b", out_b.data(), out_b.rows(), out_b.cols()});
  return out;
}

double NetParams::squared_norm() const {
  double total = 0.0;
  for (const ConstTensorRef& t : tensors()) total += t.flat().squaredNorm();
  return total;
}

bool NetParams::same_shape(const NetParams& other) const {
  const auto a = tensors();
  const auto b = other.tensors();
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].rows != b[k].rows || a[k].cols != b[k].cols) return false;
  }
  return true;
}

StepCache cell_step(const LstmCellParams& p, const MatrixXd& h_prev,
                    const MatrixXd& c_prev, const MatrixXd& x) {
  if (h_prev.cols() != p.hidden() || c_prev.cols() != p.hidden() ||
      x.cols() != p.input_width() || h_prev.rows() != x.rows() ||
      c_prev.rows() != x.rows()) {
    throw DataError("cell_step shape mismatch");
  }
  StepCache s;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.input = x;
  s.f = sigmoid(affine(p.w_f, p.b_f, h_prev, x));
  s.i = sigmoid(affine(p.w_i, p.b_i, h_prev, x));
  s.o = sigmoid(affine(p.w_o, p.b_o, h_prev, x));
  s.c_tilde_pre = affine(p.w_c, p.b_c, h_prev, x);
  s.c_tilde = relu(s.c_tilde_pre);
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.c_tilde);
  s.h = s.o.cwiseProduct(relu(s.c));
  return s;
}

CellState cell_forward(const LstmCellParams& p, const VectorXd& h_prev,
                       const VectorXd& c_prev, const VectorXd& x) {
  const StepCache s = cell_step(p, h_prev.transpose(), c_prev.transpose(),
                                x.transpose());
  return CellState{s.h.transpose(), s.c.transpose()};
}

EncodeResult encode(const NetParams& p, std::span<const MatrixXd> inputs) {
  if (inputs.empty()) throw DataError("encode needs at least one step");
  const Eigen::Index n = inputs.front().rows();
  MatrixXd h = MatrixXd::Zero(n, p.hidden());
  MatrixXd c = MatrixXd::Zero(n, p.hidden());
  EncodeResult out;
  out.steps.reserve(inputs.size());
  for (const MatrixXd& x : inputs) {
    out.steps.push_back(cell_step(p.encoder, h, c, x));
    h = out.steps.back().h;
    c = out.steps.back().c;
  }
  out.embedding = std::move(h);
  return out;
}

DecodeResult decode(const NetParams& p, const MatrixXd& u, int num_steps) {
  if (num_steps < 1) throw DataError("decode needs at least one step");
  const Eigen::Index n = u.rows();
  const MatrixXd no_input(n, 0);
  MatrixXd h = u;
  MatrixXd c = MatrixXd::Zero(n, p.hidden());
  DecodeResult out;
  out.reconstructions.resize(num_steps);
  out.steps.reserve(num_steps);
  for (int t = 0; t < num_steps; ++t) {
    out.steps.push_back(cell_step(p.decoder, h, c, no_input));
    h = out.steps.back().h;
    c = out.steps.back().c;
    MatrixXd y = h * p.out_w.transpose();
    y.rowwise() += p.out_b.transpose();
    out.reconstructions[num_steps - 1 - t] = std::move(y);
  }
  return out;
}

MatrixXd embed(const NetParams& p, const EgoTensor& ego) {
  return encode(p, ego.slices).embedding;
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw ConfigError("keep_prob must lie in (0, 1]");
  }
  if (!(l2 >= 0.0)) throw ConfigError("l2 must be >= 0");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  if (epochs_per_round < 0 || pretrain_epochs < 0 || batch_size < 0) {
    throw ConfigError("epoch counts and batch size must be >= 0");
  }
}

double embedding_loss(const NetParams& p, const MatrixXd& u,
                      std::span<const MatrixXd> targets,
                      const SparseMatrix& laplacian, const TrainConfig& cfg,
                      const ProjectionTarget* projection, MatrixXd* grad_u,
                      NetParams* grads, LossBreakdown* breakdown) {
  const int m_count = static_cast<int>(targets.size());
  const DecodeResult dec = decode(p, u, m_count);

  LossBreakdown loss;
  std::vector<MatrixXd> d_recon(m_count);
  for (int m = 0; m < m_count; ++m) {
    const MatrixXd diff = dec.reconstructions[m] - targets[m];
    loss.reconstruction += diff.squaredNorm();
    d_recon[m] = 2.0 * diff;
  }
  const MatrixXd lu = laplacian * u;
  loss.consistency = u.cwiseProduct(lu).sum();
  MatrixXd residual;
  if (projection != nullptr) {
    residual = u - projection->v * projection->q;
    loss.projection = residual.squaredNorm();
  }
  check_finite(loss.reconstruction, "reconstruction");
  check_finite(loss.consistency, "consistency");
  check_finite(loss.projection, "projection");
  const double beta = projection != nullptr ? cfg.beta : 0.0;
  loss.total = loss.reconstruction + cfg.alpha * loss.consistency +
               beta * loss.projection;

  if (grad_u != nullptr || grads != nullptr) {
    NetParams local;
    NetParams& g = grads != nullptr ? *grads : local;
    if (grads == nullptr) g = NetParams::zeros(p.width(), p.hidden());
    MatrixXd dh = MatrixXd::Zero(u.rows(), p.hidden());
    MatrixXd dc = MatrixXd::Zero(u.rows(), p.hidden());
    for (int t = m_count - 1; t >= 0; --t) {
      const StepCache& s = dec.steps[t];
      const MatrixXd& dy = d_recon[m_count - 1 - t];
      g.out_w.noalias() += dy.transpose() * s.h;
      g.out_b += dy.colwise().sum().transpose();
      dh.noalias() += dy * p.out_w;
      cell_backward(p.decoder, s, g.decoder, dh, dc);
    }
    if (grad_u != nullptr) {
      *grad_u = dh + 2.0 * cfg.alpha * lu;
      if (projection != nullptr) *grad_u += 2.0 * beta * residual;
    }
  }
  if (breakdown != nullptr) *breakdown = loss;
  return loss.total;
}

LossResult loss_and_grads(const NetParams& p, const EgoTensor& ego,
                          const SparseMatrix& laplacian,
                          const TrainConfig& cfg, const LossOptions& options) {
  if (ego.width != p.width()) throw DataError("ego width != network width");
  if (laplacian.rows() != ego.num_users) {
    throw DataError("Laplacian size != user count");
  }
  const bool batched = !options.batch.empty();
  std::vector<MatrixXd> targets =
      batched ? gather_rows(ego.slices, options.batch) : ego.slices;
  const SparseMatrix local_l =
      batched ? restrict_laplacian(laplacian, options.batch) : SparseMatrix();
  const SparseMatrix& lap = batched ? local_l : laplacian;

  MatrixXd v_rows;
  std::optional<ProjectionTarget> local_proj;
  const ProjectionTarget* proj = options.projection;
  if (proj != nullptr && batched) {
    v_rows = gather_rows(proj->v, options.batch);
    local_proj.emplace(ProjectionTarget{v_rows, proj->q});
    proj = &*local_proj;
  }

  std::vector<MatrixXd> inputs = targets;
  if (options.dropout_rng != nullptr && cfg.keep_prob < 1.0) {
    std::bernoulli_distribution keep(cfg.keep_prob);
    const double scale = 1.0 / cfg.keep_prob;
    for (MatrixXd& x : inputs) {
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        x.data()[k] = keep(*options.dropout_rng) ? x.data()[k] * scale : 0.0;
      }
    }
  }

  LossResult out;
  out.grads = NetParams::zeros(p.width(), p.hidden());
  const EncodeResult enc = encode(p, inputs);
  out.embedding = enc.embedding;
  embedding_loss(p, enc.embedding, targets, lap, cfg, proj,
                 &out.grad_embedding, &out.grads, &out.loss);

  MatrixXd dh = out.grad_embedding;
  MatrixXd dc = MatrixXd::Zero(dh.rows(), dh.cols());
  for (auto s = enc.steps.rbegin(); s != enc.steps.rend(); ++s) {
    cell_backward(p.encoder, *s, out.grads.encoder, dh, dc);
  }

  out.loss.weight_norm = p.squared_norm();
  check_finite(out.loss.weight_norm, "weight_norm");
  out.loss.total += cfg.l2 * out.loss.weight_norm;
  if (cfg.l2 > 0.0) {
    auto g = out.grads.tensors();
    const auto w = p.tensors();
    for (std::size_t k = 0; k < g.size(); ++k) {
      g[k].flat() += 2.0 * cfg.l2 * w[k].flat();
    }
  }
  return out;
}

double min_relu_margin(const NetParams& p, const EgoTensor& ego) {
  double margin = std::numeric_limits<double>::infinity();
  auto scan = [&](const std::vector<StepCache>& steps) {
    for (const StepCache& s : steps) {
      margin = std::min(margin, s.c_tilde_pre.cwiseAbs().minCoeff());
      for (Eigen::Index k = 0; k < s.c.size(); ++k) {
        const double c = s.c.data()[k];
        if (c != 0.0) margin = std::min(margin, std::abs(c));
      }
    }
  };
  const EncodeResult enc = encode(p, ego.slices);
  scan(enc.steps);
  scan(decode(p, enc.embedding, ego.num_snapshots()).steps);
  return margin;
}

void train_step(NetParams& p, const NetParams& grads, AdamState& state,
                const TrainConfig& cfg) {
  if (!p.same_shape(grads)) throw DataError("gradient shape mismatch");
  auto params = p.tensors();
  const auto g = grads.tensors();
  if (state.m.empty()) {
    for (const TensorRef& t : params) {
      state.m.push_back(VectorXd::Zero(t.rows * t.cols));
      state.v.push_back(VectorXd::Zero(t.rows * t.cols));
    }
  }
  ++state.step;
  const double bias1 = 1.0 - std::pow(cfg.adam_beta1, state.step);
  const double bias2 = 1.0 - std::pow(cfg.adam_beta2, state.step);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto grad = g[k].flat();
    state.m[k] = cfg.adam_beta1 * state.m[k] + (1.0 - cfg.adam_beta1) * grad;
    state.v[k] = cfg.adam_beta2 * state.v[k] +
                 (1.0 - cfg.adam_beta2) * grad.cwiseAbs2();
    params[k].flat().array() -=
        cfg.learning_rate * (state.m[k].array() / bias1) /
        ((state.v[k].array() / bias2).sqrt() + cfg.adam_eps);
  }
}

AutoencoderTrainer::AutoencoderTrainer(NetParams params, TrainConfig cfg)
    : params_(std::move(params)), cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
}

double AutoencoderTrainer::run_epoch(const EgoTensor& ego,
                                     const SparseMatrix& laplacian,
                                     const ProjectionTarget* projection) {
  LossOptions options;
  options.projection = projection;
  options.dropout_rng = &rng_;
  if (cfg_.batch_size == 0 || cfg_.batch_size >= ego.num_users) {
    const LossResult r = loss_and_grads(params_, ego, laplacian, cfg_, options);
    train_step(params_, r.grads, adam_, cfg_);
    return r.loss.total;
  }
  std::vector<int> order(ego.num_users);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng_);
  double total = 0.0;
  for (std::size_t begin = 0; begin < order.size(); begin += cfg_.batch_size) {
    const std::size_t end =
        std::min(order.size(), begin + static_cast<std::size_t>(cfg_.batch_size));
    std::vector<int> batch(order.begin() + begin, order.begin() + end);
    std::sort(batch.begin(), batch.end());
    options.batch = batch;
    const LossResult r = loss_and_grads(params_, ego, laplacian, cfg_, options);
    train_step(params_, r.grads, adam_, cfg_);
    total += r.loss.total;
  }
  return total;
}

NetParams pretrain(const NetParams& p, const EgoTensor& ego,
                   const SparseMatrix& laplacian, const TrainConfig& cfg) {
  AutoencoderTrainer trainer(p, cfg);
  for (int e = 0; e < cfg.pretrain_epochs; ++e) {
    trainer.run_epoch(ego, laplacian, nullptr);
  }
  return trainer.params();
}

void write_params(std::ostream& out, const NetParams& p,
                  const std::string& config_hash) {
  out.precision(17);
  out << "dynalign-params 1 " << config_hash << '\n';
  out << p.width() << ' ' << p.hidden() << '\n';
  for (const ConstTensorRef& t : p.tensors()) {
    out << t.name << ' ' << t.rows << ' ' << t.cols << '\n';
    const auto flat = t.flat();
    for (Eigen::Index k = 0; k < flat.size(); ++k) {
      out << (k ? " " : "") << flat(k);
    }
    out << '\n';
  }
}

NetParams read_params(std::istream& in, std::string* config_hash) {
  std::string magic, hash;
  int version = 0, width = 0, hidden = 0;
  if (!(in >> magic >> version >> hash >> width >> hidden) ||
      magic != "dynalign-params" || version != 1 || width < 1 || hidden < 1) {
    throw DataError("malformed parameter checkpoint header");
  }
  NetParams p = NetParams::zeros(width, hidden);
  for (TensorRef& t : p.tensors()) {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols) || name != t.name || rows != t.rows ||
        cols != t.cols) {
      throw DataError("checkpoint tensor mismatch at " + t.name);
    }
    auto flat = t.flat();
    for (Eigen::Index k = 0; k < flat.size(); ++k) {
      if (!(in >> flat(k))) throw DataError("truncated checkpoint at " + t.name);
    }
  }
  if (config_hash != nullptr) *config_hash = hash;
  return p;
}

void write_embedding_csv(std::ostream& out, const MatrixXd& u,
                         const std::vector<std::string>* user_ids) {
  out.precision(17);
  out << "user_id";
  for (Eigen::Index d = 0; d < u.cols(); ++d) out << ",d_" << d + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    out << (user_ids != nullptr ? user_ids->at(i) : std::to_string(i));
    for (Eigen::Index d = 0; d < u.cols(); ++d) out << ',' << u(i, d);
    out << '\n';
  }
}

}  // namespace dynalign
