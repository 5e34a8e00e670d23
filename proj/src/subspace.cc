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

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace dynalign {
namespace {

using Eigen::MatrixXd;

MatrixXd positive_part(const MatrixXd& x) { return x.cwiseMax(0.0); }
MatrixXd negative_part(const MatrixXd& x) { return (-x).cwiseMax(0.0); }

// Own rows: Pi = P^T P V. Cross rows: Lambda = P^T P' V'.
void anchor_terms(const MatrixXd& v, const IndicationPair& anchors, Side side,
                  const MatrixXd& other_v, MatrixXd& pi, MatrixXd& lambda) {
  pi = MatrixXd::Zero(v.rows(), v.cols());
  lambda = MatrixXd::Zero(v.rows(), v.cols());
  for (const AnchorPair& a : anchors.rows()) {
    const int own = side == Side::kSource ? a.source : a.target;
    const int other = side == Side::kSource ? a.target : a.source;
    pi.row(own) += v.row(own);
    lambda.row(own) += other_v.row(other);
  }
}

void check_shapes(const MatrixXd& v, const MatrixXd& u, const MatrixXd& q,
                  const IndicationPair& anchors, Side side,
                  const MatrixXd& other_v) {
  const int own_width =
      side == Side::kSource ? anchors.source_width() : anchors.target_width();
  const int other_width =
      side == Side::kSource ? anchors.target_width() : anchors.source_width();
  if (v.rows() != u.rows() || q.rows() != v.cols() || q.cols() != u.cols() ||
      other_v.cols() != v.cols() ||
      (anchors.size() > 0 &&
       (v.rows() != own_width || other_v.rows() != other_width))) {
    throw DataError("subspace update shape mismatch");
  }
}

double finite_or_throw(double value, const char* term) {
  if (!std::isfinite(value)) {
    throw NumericalError(term, std::string("non-finite objective term: ") + term);
  }
  return value;
}

struct NetworkEval {
  LossBreakdown loss;
  MatrixXd u;
};

NetworkEval evaluate_network(const NetParams& p, const NetworkInputs& in,
                             const TrainConfig& cfg) {
  TrainConfig plain = cfg;
  plain.beta = 0.0;
  const MatrixXd u = embed(p, in.ego);
  NetworkEval out;
  embedding_loss(p, u, in.ego.slices, in.laplacian, plain, nullptr, nullptr,
                 nullptr, &out.loss);
  out.u = u;
  return out;
}

}  // namespace

void ObjWeights::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) {
    throw ConfigError("alpha, beta and gamma must be >= 0");
  }
  if (!(eps_div > 0.0)) throw ConfigError("eps_div must be > 0");
  if (!(ridge > 0.0)) throw ConfigError("ridge must be > 0");
}

ObjectiveTerms objective(const SubspaceState& state, double loss_s,
                         double loss_t, const IndicationPair& anchors,
                         const ObjWeights& w) {
  ObjectiveTerms t;
  t.loss_s = finite_or_throw(loss_s, "loss_s");
  t.loss_t = finite_or_throw(loss_t, "loss_t");
  t.proj_s = finite_or_throw(
      (state.u_s - state.v_s * state.q_s).squaredNorm(), "proj_s");
  t.proj_t = finite_or_throw(
      (state.u_t - state.v_t * state.q_t).squaredNorm(), "proj_t");
  double anchor = 0.0;
  for (const AnchorPair& a : anchors.rows()) {
    anchor += (state.v_s.row(a.source) - state.v_t.row(a.target)).squaredNorm();
  }
  t.anchor = finite_or_throw(anchor, "anchor_penalty");
  t.total = finite_or_throw(t.loss_s + t.loss_t +
                                w.beta * (t.proj_s + t.proj_t) +
                                w.gamma * t.anchor,
                            "total");
  return t;
}

MatrixXd update_q(const MatrixXd& v, const MatrixXd& u, double ridge) {
  if (v.rows() != u.rows()) throw DataError("update_q row mismatch");
  const MatrixXd gram = v.transpose() * v;
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram,
                                                    Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const bool singular = !(lo > 0.0) || hi / lo > 1e12;
  MatrixXd q;
  if (!singular) {
    q = v.colPivHouseholderQr().solve(u);
  } else {
    const MatrixXd reg =
        gram + ridge * MatrixXd::Identity(gram.rows(), gram.cols());
    const Eigen::LDLT<MatrixXd> ldlt(reg);
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("update_q", "projection solve failed");
    }
    q = ldlt.solve(v.transpose() * u);
  }
  if (!q.allFinite()) throw NumericalError("update_q", "projection solve failed");
  return q;
}

MatrixXd update_v(const MatrixXd& v, const MatrixXd& u, const MatrixXd& q,
                  const IndicationPair& anchors, Side side,
                  const MatrixXd& other_v, const ObjWeights& w) {
  check_shapes(v, u, q, anchors, side, other_v);
  const MatrixXd uq = u * q.transpose();
  const MatrixXd qq = q * q.transpose();
  MatrixXd pi, lambda;
  anchor_terms(v, anchors, side, other_v, pi, lambda);
  const MatrixXd num =
      w.beta * (positive_part(uq) + v * negative_part(qq)) + w.gamma * lambda;
  const MatrixXd den = w.beta * (negative_part(uq) + v * positive_part(qq)) +
                       w.gamma * pi;
  const MatrixXd ratio =
      num.array() / (den.array() + w.eps_div);
  return v.cwiseProduct(ratio.cwiseSqrt());
}

MatrixXd grad_v(const MatrixXd& v, const MatrixXd& u, const MatrixXd& q,
                const IndicationPair& anchors, Side side,
                const MatrixXd& other_v, const ObjWeights& w) {
  check_shapes(v, u, q, anchors, side, other_v);
  MatrixXd pi, lambda;
  anchor_terms(v, anchors, side, other_v, pi, lambda);
  return -2.0 * w.beta * u * q.transpose() +
         2.0 * w.beta * v * (q * q.transpose()) - 2.0 * w.gamma * lambda +
         2.0 * w.gamma * pi;
}

double kkt_residual(const MatrixXd& v, const MatrixXd& u, const MatrixXd& q,
                    const IndicationPair& anchors, Side side,
                    const MatrixXd& other_v, const ObjWeights& w) {
  if (v.size() == 0) return 0.0;
  return grad_v(v, u, q, anchors, side, other_v, w)
      .cwiseProduct(v)
      .cwiseAbs()
      .maxCoeff();
}

void alternate_qv(SubspaceState& state, double loss_s, double loss_t,
                  const IndicationPair& anchors, const ObjWeights& w,
                  const StepObserver& observer) {
  auto notify = [&](std::string_view step) {
    if (observer) observer(step, objective(state, loss_s, loss_t, anchors, w).total);
  };
  state.q_s = update_q(state.v_s, state.u_s, w.ridge);
  notify("q_s");
  state.q_t = update_q(state.v_t, state.u_t, w.ridge);
  notify("q_t");
  state.v_s = update_v(state.v_s, state.u_s, state.q_s, anchors, Side::kSource,
                       state.v_t, w);
  notify("v_s");
  state.v_t = update_v(state.v_t, state.u_t, state.q_t, anchors, Side::kTarget,
                       state.v_s, w);
  notify("v_t");
}

MatrixXd initial_identity(const MatrixXd& u, int identity_dim) {
  if (identity_dim < 1) throw ConfigError("identity dimension must be >= 1");
  MatrixXd v = MatrixXd::Zero(u.rows(), identity_dim);
  const Eigen::Index shared = std::min<Eigen::Index>(identity_dim, u.cols());
  v.leftCols(shared) = u.leftCols(shared);
  v.array() += 1e-6;
  return v;
}

AlternatingResult run_alternating(const NetworkInputs& source,
                                  const NetworkInputs& target,
                                  NetParams params_s, NetParams params_t,
                                  const IndicationPair& anchors,
                                  const TrainConfig& train_s,
                                  const TrainConfig& train_t,
                                  const ObjWeights& w, int identity_dim,
                                  const Schedule& schedule,
                                  const StepObserver& observer) {
  w.validate();
  if (anchors.source_width() != source.ego.num_users ||
      anchors.target_width() != target.ego.num_users) {
    throw DataError("anchor widths do not match the networks");
  }
  TrainConfig cfg_s = train_s;
  TrainConfig cfg_t = train_t;
  cfg_s.alpha = cfg_t.alpha = w.alpha;
  cfg_s.beta = cfg_t.beta = w.beta;

  if (schedule.pretrain) {
    params_s = pretrain(params_s, source.ego, source.laplacian, cfg_s);
    params_t = pretrain(params_t, target.ego, target.laplacian, cfg_t);
  }

  AlternatingResult out;
  NetworkEval eval_s = evaluate_network(params_s, source, cfg_s);
  NetworkEval eval_t = evaluate_network(params_t, target, cfg_t);
  SubspaceState& st = out.state;
  st.u_s = eval_s.u;
  st.u_t = eval_t.u;
  st.v_s = initial_identity(st.u_s, identity_dim);
  st.v_t = initial_identity(st.u_t, identity_dim);
  st.q_s = update_q(st.v_s, st.u_s, w.ridge);
  st.q_t = update_q(st.v_t, st.u_t, w.ridge);

  auto d_value = [&](const NetworkEval& e) {
    return e.loss.reconstruction + w.alpha * e.loss.consistency;
  };
  double previous =
      objective(st, d_value(eval_s), d_value(eval_t), anchors, w).total;
  out.initial_objective = previous;

  AutoencoderTrainer trainer_s(params_s, cfg_s);
  AutoencoderTrainer trainer_t(params_t, cfg_t);
  for (int round = 1; round <= schedule.max_rounds; ++round) {
    {
      const ProjectionTarget proj_s{st.v_s, st.q_s};
      const ProjectionTarget proj_t{st.v_t, st.q_t};
      for (int e = 0; e < cfg_s.epochs_per_round; ++e) {
        trainer_s.run_epoch(source.ego, source.laplacian, &proj_s);
      }
      for (int e = 0; e < cfg_t.epochs_per_round; ++e) {
        trainer_t.run_epoch(target.ego, target.laplacian, &proj_t);
      }
    }
    eval_s = evaluate_network(trainer_s.params(), source, cfg_s);
    eval_t = evaluate_network(trainer_t.params(), target, cfg_t);
    st.u_s = eval_s.u;
    st.u_t = eval_t.u;
    const double loss_s = d_value(eval_s);
    const double loss_t = d_value(eval_t);
    if (observer) {
      observer("theta", objective(st, loss_s, loss_t, anchors, w).total);
    }
    alternate_qv(st, loss_s, loss_t, anchors, w, observer);
    st.round = round;

    const ObjectiveTerms terms = objective(st, loss_s, loss_t, anchors, w);
    TraceRow row;
    row.round = round;
    row.j_total = terms.total;
    row.recon_s = eval_s.loss.reconstruction;
    row.recon_t = eval_t.loss.reconstruction;
    row.reg_s = eval_s.loss.consistency;
    row.reg_t = eval_t.loss.consistency;
    row.proj_s = terms.proj_s;
    row.proj_t = terms.proj_t;
    row.anchor_penalty = terms.anchor;
    row.kkt_s = kkt_residual(st.v_s, st.u_s, st.q_s, anchors, Side::kSource,
                             st.v_t, w);
    row.kkt_t = kkt_residual(st.v_t, st.u_t, st.q_t, anchors, Side::kTarget,
                             st.v_s, w);
    out.trace.push_back(row);

    if (terms.total > schedule.divergence_factor *
                          std::max(std::abs(out.initial_objective), 1e-300)) {
      throw DivergenceError("objective diverged at round " +
                                std::to_string(round),
                            out.trace);
    }
    const double change =
        std::abs(previous - terms.total) / std::max(std::abs(previous), 1e-300);
    previous = terms.total;
    if (change < schedule.tol) {
      out.converged = true;
      break;
    }
  }
  out.params_s = trainer_s.params();
  out.params_t = trainer_t.params();
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace,
                     const std::string& config_hash) {
  out.precision(17);
  out << "# config_hash=" << config_hash << '\n';
  out << "round,J_total,recon_s,recon_t,reg_s,reg_t,proj_s,proj_t,"
         "anchor_penalty,kkt_s,kkt_t\n";
  for (const TraceRow& r : trace) {
    out << r.round << ',' << r.j_total << ',' << r.recon_s << ',' << r.recon_t
        << ',' << r.reg_s << ',' << r.reg_t << ',' << r.proj_s << ','
        << r.proj_t << ',' << r.anchor_penalty << ',' << r.kkt_s << ','
        << r.kkt_t << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const MatrixXd& m,
                      const std::string& config_hash) {
  out.precision(17);
  out << "# config_hash=" << config_hash << '\n';
  out << "# " << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << m(i, j);
    }
    out << '\n';
  }
}

MatrixXd read_matrix_csv(std::istream& in, std::string* config_hash) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config_hash=", 0) != 0) {
    throw DataError("matrix CSV missing config hash");
  }
  if (config_hash != nullptr) *config_hash = line.substr(14);
  Eigen::Index rows = 0, cols = 0;
  if (!std::getline(in, line)) throw DataError("matrix CSV missing shape");
  {
    std::istringstream ss(line);
    char hash = 0;
    if (!(ss >> hash >> rows >> cols) || hash != '#' || rows < 0 || cols < 0) {
      throw DataError("matrix CSV bad shape header");
    }
  }
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw DataError("matrix CSV truncated");
    std::istringstream ss(line);
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string cell;
      if (!std::getline(ss, cell, ',')) throw DataError("matrix CSV short row");
      try {
        m(i, j) = std::stod(cell);
      } catch (const std::exception&) {
        throw DataError("matrix CSV bad value '" + cell + "'");
      }
    }
  }
  return m;
}

}  // namespace dynalign
