// Copyright 2026 The smad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Linear SVM, SRKDA and P-CRC over one feature type, plus the 3x3 score grid.
// Every score is oriented so that higher means more morph-like.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "smad/error.hpp"
#include "smad/features.hpp"

namespace smad {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Label : std::uint8_t { BonaFide = 0, Morph = 1 };

inline std::string_view to_string(Label l) { return l == Label::Morph ? "morph" : "bonafide"; }

enum class ClassifierKind { Svm = 0, Srkda = 1, Pcrc = 2 };
inline constexpr int kNumClassifiers = 3;
inline constexpr std::array<ClassifierKind, 3> kClassifierKinds{ClassifierKind::Svm, ClassifierKind::Srkda,
                                                                 ClassifierKind::Pcrc};

inline std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::Srkda: return "srkda";
    case ClassifierKind::Pcrc: return "pcrc";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Standardization

/// Per-dimension z-scoring fitted on training rows. Constant dimensions keep
/// scale 1 and always map to 0.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  std::vector<std::uint8_t> active;

  Eigen::Index dim() const { return mean.size(); }

  static Standardization identity(Eigen::Index d) {
    return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d), std::vector<std::uint8_t>(std::size_t(d), 1)};
  }

  static Standardization fit(const RowMatrix& x) {
    require(x.rows() > 0 && x.cols() > 0, Errc::invalid, "standardize_fit: empty input");
    const auto n = double(x.rows());
    Standardization s;
    s.mean = x.colwise().sum().transpose() / n;
    s.scale.resize(x.cols());
    s.active.assign(std::size_t(x.cols()), 1);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const auto col = x.col(j);
      if (col.maxCoeff() == col.minCoeff()) {
        s.scale[j] = 1.0;
        s.active[std::size_t(j)] = 0;
        continue;
      }
      const double var = (col.array() - s.mean[j]).square().sum() / n;
      s.scale[j] = std::sqrt(var);
    }
    return s;
  }

  Eigen::VectorXd apply(std::span<const double> v) const {
    require(Eigen::Index(v.size()) == dim(), Errc::invalid,
            "standardize_apply: vector has " + std::to_string(v.size()) + " dims, expected " + std::to_string(dim()));
    Eigen::VectorXd z(dim());
    for (Eigen::Index j = 0; j < dim(); ++j)
      z[j] = active[std::size_t(j)] ? (v[std::size_t(j)] - mean[j]) / scale[j] : 0.0;
    return z;
  }

  RowMatrix apply_rows(const RowMatrix& x) const {
    RowMatrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      out.row(i) = apply(std::span<const double>(x.row(i).data(), std::size_t(x.cols()))).transpose();
    return out;
  }
};

// ---------------------------------------------------------------------------
// Training data

struct TrainingSet {
  FeatureType type = FeatureType::Lbp;
  RowMatrix vectors;  // one sample per row
  std::vector<Label> labels;

  std::size_t count(Label l) const { return std::size_t(std::count(labels.begin(), labels.end(), l)); }

  void validate() const {
    require(vectors.rows() == Eigen::Index(labels.size()), Errc::invalid, "training set: label count mismatch");
    require(vectors.rows() > 0 && vectors.cols() > 0, Errc::invalid, "training set is empty");
    require(count(Label::BonaFide) > 0 && count(Label::Morph) > 0, Errc::invalid,
            "training set must contain both bona fide and morph samples");
    require(vectors.allFinite(), Errc::invalid, "training set contains non-finite values");
  }
};

/// Standardized training rows shared by the three classifiers of one feature type.
struct FeatureSpace {
  FeatureType type = FeatureType::Lbp;
  Standardization standardization;
  RowMatrix rows;
  std::vector<Label> labels;
  Eigen::MatrixXd gram;  // rows * rows^T; only populated for training

  Eigen::Index size() const { return rows.rows(); }
  Eigen::VectorXd signs() const {
    Eigen::VectorXd y(Eigen::Index(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y[Eigen::Index(i)] = labels[i] == Label::Morph ? 1.0 : -1.0;
    return y;
  }
};

enum class Standardize { yes, no };

namespace detail {
inline void fill_gram(FeatureSpace& fs) {
  const auto n = fs.rows.rows();
  fs.gram = Eigen::MatrixXd::Zero(n, n);
  fs.gram.selfadjointView<Eigen::Lower>().rankUpdate(fs.rows);
  fs.gram = fs.gram.selfadjointView<Eigen::Lower>();
}
}  // namespace detail

inline std::shared_ptr<const FeatureSpace> make_feature_space(const TrainingSet& ts,
                                                              Standardize mode = Standardize::yes) {
  ts.validate();
  auto fs = std::make_shared<FeatureSpace>();
  fs->type = ts.type;
  fs->standardization =
      mode == Standardize::yes ? Standardization::fit(ts.vectors) : Standardization::identity(ts.vectors.cols());
  fs->rows = mode == Standardize::yes ? fs->standardization.apply_rows(ts.vectors) : ts.vectors;
  fs->labels = ts.labels;
  detail::fill_gram(*fs);
  return fs;
}

/// Same as above but standardizes the moved-in rows in place (no second copy of the data).
inline std::shared_ptr<const FeatureSpace> make_feature_space(TrainingSet&& ts, Standardize mode = Standardize::yes) {
  ts.validate();
  auto fs = std::make_shared<FeatureSpace>();
  fs->type = ts.type;
  fs->standardization =
      mode == Standardize::yes ? Standardization::fit(ts.vectors) : Standardization::identity(ts.vectors.cols());
  if (mode == Standardize::yes) {
    const auto& s = fs->standardization;
    for (Eigen::Index i = 0; i < ts.vectors.rows(); ++i)
      for (Eigen::Index j = 0; j < ts.vectors.cols(); ++j)
        ts.vectors(i, j) = s.active[std::size_t(j)] ? (ts.vectors(i, j) - s.mean[j]) / s.scale[j] : 0.0;
  }
  fs->rows = std::move(ts.vectors);
  fs->labels = std::move(ts.labels);
  detail::fill_gram(*fs);
  return fs;
}

// ---------------------------------------------------------------------------
// Model state

struct SvmParams {
  double c = 1.0;
  double gap_tolerance = 1e-6;
  long max_iterations = 10'000'000;
};
struct SrkdaParams {
  double delta = 0.01;
  double sigma = 0.0;  // <= 0 selects the median pairwise training distance
};
struct PcrcParams {
  double lambda = 0.01;
};

struct SvmState {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::VectorXd alpha;  // dual coefficients, training order
  double duality_gap = 0.0;
  double max_violation = 0.0;
  long iterations = 0;
};
struct SrkdaState {
  Eigen::VectorXd alpha;
  double sigma = 1.0;
  double delta = 0.01;
  double mean_bona = 0.0;
  double mean_morph = 0.0;
};
struct PcrcState {
  Eigen::MatrixXd chol_lower;  // L with L L^T = rows rows^T + lambda I
  double lambda = 0.01;
};

struct ModelMetadata {
  std::uint64_t seed = 0;
  std::map<std::string, double> hyperparameters;
  std::string descriptor;  // canonical descriptor configuration text
};

struct TrainedModel {
  ClassifierKind kind = ClassifierKind::Svm;
  FeatureType feature = FeatureType::Lbp;
  std::shared_ptr<const FeatureSpace> space;
  std::variant<SvmState, SrkdaState, PcrcState> state;
  ModelMetadata meta;

  double score(std::span<const double> raw) const { return score_standardized(space->standardization.apply(raw)); }
  inline double score_standardized(const Eigen::VectorXd& z) const;
};

// ---------------------------------------------------------------------------
// Linear SVM (SMO on the dual, second-order working-set selection)

namespace detail {

struct SmoState {
  Eigen::VectorXd alpha;
  Eigen::VectorXd grad;  // Q alpha - 1
  double rho = 0.0;
  double max_violation = 0.0;
  long iterations = 0;
};

/// Runs SMO until the maximal KKT violation drops below eps. Q_ij = y_i y_j K_ij.
inline void smo_solve(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double c, double eps, long max_iterations,
                      SmoState& st) {
  const Eigen::Index n = y.size();
  constexpr double tau = 1e-12;
  const double inf = std::numeric_limits<double>::infinity();
  auto q = [&](Eigen::Index i, Eigen::Index j) { return y[i] * y[j] * k(i, j); };
  auto is_upper = [&](Eigen::Index t) { return st.alpha[t] >= c; };
  auto is_lower = [&](Eigen::Index t) { return st.alpha[t] <= 0.0; };

  for (; st.iterations < max_iterations; ++st.iterations) {
    double gmax = -inf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!is_upper(t) && -st.grad[t] >= gmax) gmax = -st.grad[t], i = t;
      } else {
        if (!is_lower(t) && st.grad[t] >= gmax) gmax = st.grad[t], i = t;
      }
    }
    double gmax2 = -inf;
    Eigen::Index j = -1;
    double obj_min = inf;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!is_lower(t)) {
          const double grad_diff = gmax + st.grad[t];
          gmax2 = std::max(gmax2, st.grad[t]);
          if (i >= 0 && grad_diff > 0) {
            double quad = q(i, i) + q(t, t) - 2.0 * y[i] * q(i, t);
            double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : tau);
            if (obj <= obj_min) obj_min = obj, j = t;
          }
        }
      } else {
        if (!is_upper(t)) {
          const double grad_diff = gmax - st.grad[t];
          gmax2 = std::max(gmax2, -st.grad[t]);
          if (i >= 0 && grad_diff > 0) {
            double quad = q(i, i) + q(t, t) + 2.0 * y[i] * q(i, t);
            double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : tau);
            if (obj <= obj_min) obj_min = obj, j = t;
          }
        }
      }
    }
    st.max_violation = gmax + gmax2;
    if (i < 0 || j < 0 || st.max_violation < eps) break;

    const double ai_old = st.alpha[i], aj_old = st.alpha[j];
    double& ai = st.alpha[i];
    double& aj = st.alpha[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (-st.grad[i] - st.grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) aj = 0, ai = diff;
      } else {
        if (ai < 0) ai = 0, aj = -diff;
      }
      if (diff > 0) {
        if (ai > c) ai = c, aj = c - diff;
      } else {
        if (aj > c) aj = c, ai = c + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (st.grad[i] - st.grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) ai = c, aj = sum - c;
      } else {
        if (aj < 0) aj = 0, ai = sum;
      }
      if (sum > c) {
        if (aj > c) aj = c, ai = sum - c;
      } else {
        if (ai < 0) ai = 0, aj = sum;
      }
    }
    const double dai = ai - ai_old, daj = aj - aj_old;
    for (Eigen::Index t = 0; t < n; ++t) st.grad[t] += q(t, i) * dai + q(t, j) * daj;
  }

  // Offset: mean over free vectors, else the midpoint of the feasible interval.
  double ub = inf, lb = -inf, sum_free = 0.0;
  long nr_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * st.grad[t];
    if (is_upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++nr_free;
      sum_free += yg;
    }
  }
  st.rho = nr_free > 0 ? sum_free / double(nr_free) : (ub + lb) / 2.0;
}

/// Primal minus dual objective for the current dual point, decision values recomputed from scratch.
inline double svm_duality_gap(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double c,
                              const Eigen::VectorXd& alpha, double b) {
  const Eigen::VectorXd ay = alpha.cwiseProduct(y);
  const Eigen::VectorXd f = k * ay;
  const double wnorm2 = ay.dot(f);
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) hinge += std::max(0.0, 1.0 - y[i] * (f[i] + b));
  const double primal = 0.5 * wnorm2 + c * hinge;
  const double dual = alpha.sum() - 0.5 * wnorm2;
  return primal - dual;
}

inline double median_of(std::vector<double> v) {
  require(!v.empty(), Errc::invalid, "median of empty set");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

inline void require_both_classes(const FeatureSpace& s, const char* who) {
  bool bona = false, morph = false;
  for (auto l : s.labels) (l == Label::Morph ? morph : bona) = true;
  if (!bona || !morph) fail(Errc::invalid, std::string(who) + ": training data must contain both classes");
  require(s.gram.rows() == s.size(), Errc::invalid, std::string(who) + ": feature space has no Gram matrix");
}

inline double rbf(double sq_dist, double sigma) { return std::exp(-sq_dist / (2.0 * sigma * sigma)); }

}  // namespace detail

/// Soft-margin linear SVM; label +1 is Morph. The KKT tolerance is tightened until
/// the duality gap is below params.gap_tolerance.
inline TrainedModel train_linear_svm(std::shared_ptr<const FeatureSpace> space, const SvmParams& params = {}) {
  detail::require_both_classes(*space, "train_linear_svm");
  require(params.c > 0, Errc::invalid, "train_linear_svm: C must be positive");
  const Eigen::VectorXd y = space->signs();
  detail::SmoState st;
  st.alpha = Eigen::VectorXd::Zero(y.size());
  st.grad = -Eigen::VectorXd::Ones(y.size());
  double gap = std::numeric_limits<double>::infinity();
  for (double eps = 1e-3; eps >= 1e-15; eps /= 10.0) {
    detail::smo_solve(space->gram, y, params.c, eps, params.max_iterations, st);
    gap = detail::svm_duality_gap(space->gram, y, params.c, st.alpha, -st.rho);
    if (gap < params.gap_tolerance || st.iterations >= params.max_iterations) break;
  }
  SvmState s;
  s.alpha = st.alpha;
  s.w = space->rows.transpose() * st.alpha.cwiseProduct(y);
  s.b = -st.rho;
  s.duality_gap = gap;
  s.max_violation = st.max_violation;
  s.iterations = st.iterations;
  TrainedModel m;
  m.kind = ClassifierKind::Svm;
  m.feature = space->type;
  m.space = std::move(space);
  m.state = std::move(s);
  m.meta.hyperparameters = {{"c", params.c}};
  return m;
}

inline double svm_score(const TrainedModel& m, const Eigen::VectorXd& z) {
  const auto& s = std::get<SvmState>(m.state);
  return s.w.dot(z) + s.b;
}

/// Kernel projection of a standardized vector before centring on the class-mean midpoint.
inline double srkda_project(const TrainedModel& m, const Eigen::VectorXd& z) {
  const auto& s = std::get<SrkdaState>(m.state);
  const auto& rows = m.space->rows;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    acc += s.alpha[i] * detail::rbf((rows.row(i).transpose() - z).squaredNorm(), s.sigma);
  return acc;
}

inline double srkda_score(const TrainedModel& m, const Eigen::VectorXd& z) {
  const auto& s = std::get<SrkdaState>(m.state);
  return srkda_project(m, z) - 0.5 * (s.mean_bona + s.mean_morph);
}

/// Spectral-regression KDA with an RBF kernel: the class indicator, made orthogonal
/// to the constant vector by Gram-Schmidt, is regressed with (K + delta I) alpha = y.
inline TrainedModel train_srkda(std::shared_ptr<const FeatureSpace> space, const SrkdaParams& params = {}) {
  detail::require_both_classes(*space, "train_srkda");
  require(params.delta > 0, Errc::invalid, "train_srkda: delta must be positive");
  const auto n = space->size();
  const auto& g = space->gram;
  Eigen::MatrixXd sq(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) sq(i, j) = std::max(0.0, g(i, i) + g(j, j) - 2.0 * g(i, j));

  double sigma = params.sigma;
  if (sigma <= 0) {
    std::vector<double> d;
    d.reserve(std::size_t(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) d.push_back(std::sqrt(sq(i, j)));
    sigma = d.empty() ? 1.0 : detail::median_of(std::move(d));
    if (!(sigma > 0)) sigma = 1.0;
  }

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = detail::rbf(sq(i, j), sigma);
  Eigen::MatrixXd kd = k;
  kd.diagonal().array() += params.delta;

  Eigen::VectorXd resp(n);
  for (Eigen::Index i = 0; i < n; ++i) resp[i] = space->labels[std::size_t(i)] == Label::Morph ? 1.0 : 0.0;
  resp.array() -= resp.mean();
  resp.normalize();

  Eigen::LLT<Eigen::MatrixXd> llt(kd);
  require(llt.info() == Eigen::Success, Errc::invalid, "train_srkda: kernel system is not positive definite");

  SrkdaState s;
  s.alpha = llt.solve(resp);
  s.sigma = sigma;
  s.delta = params.delta;
  TrainedModel m;
  m.kind = ClassifierKind::Srkda;
  m.feature = space->type;
  m.space = space;
  m.state = s;

  // Training projections come straight from the (undamped) kernel matrix.
  const Eigen::VectorXd proj = k * s.alpha;
  double sum_b = 0, sum_m = 0;
  std::size_t nb = 0, nm = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = proj[i];
    if (space->labels[std::size_t(i)] == Label::Morph) sum_m += p, ++nm;
    else sum_b += p, ++nb;
  }
  auto& st = std::get<SrkdaState>(m.state);
  st.mean_bona = sum_b / double(nb);
  st.mean_morph = sum_m / double(nm);
  if (st.mean_morph < st.mean_bona) {
    st.alpha = -st.alpha;
    st.mean_bona = -st.mean_bona;
    st.mean_morph = -st.mean_morph;
  }
  m.meta.hyperparameters = {{"delta", params.delta}, {"sigma", sigma}};
  return m;
}

struct PcrcCoding {
  Eigen::VectorXd alpha;
  Eigen::VectorXd recon_bona;
  Eigen::VectorXd recon_morph;
  double residual_bona = 0.0;
  double residual_morph = 0.0;
};

/// Ridge coding of z over the pooled dictionary and per-class reconstructions.
inline PcrcCoding pcrc_code(const TrainedModel& m, const Eigen::VectorXd& z) {
  const auto& s = std::get<PcrcState>(m.state);
  const auto& rows = m.space->rows;
  Eigen::VectorXd rhs = rows * z;
  const auto lower = s.chol_lower.triangularView<Eigen::Lower>();
  lower.solveInPlace(rhs);
  lower.transpose().solveInPlace(rhs);
  PcrcCoding out;
  out.alpha = std::move(rhs);
  out.recon_bona = Eigen::VectorXd::Zero(z.size());
  out.recon_morph = Eigen::VectorXd::Zero(z.size());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    auto& target = m.space->labels[std::size_t(i)] == Label::Morph ? out.recon_morph : out.recon_bona;
    target += out.alpha[i] * rows.row(i).transpose();
  }
  out.residual_bona = (z - out.recon_bona).norm();
  out.residual_morph = (z - out.recon_morph).norm();
  return out;
}

inline double pcrc_score(const TrainedModel& m, const Eigen::VectorXd& z) {
  auto c = pcrc_code(m, z);
  return c.residual_bona - c.residual_morph;
}

/// Collaborative representation: stores the Cholesky factor of X^T X + lambda I over the
/// pooled training dictionary (columns = standardized training vectors).
inline TrainedModel train_pcrc(std::shared_ptr<const FeatureSpace> space, const PcrcParams& params = {}) {
  detail::require_both_classes(*space, "train_pcrc");
  require(params.lambda > 0, Errc::invalid, "train_pcrc: lambda must be positive");
  Eigen::MatrixXd a = space->gram;
  a.diagonal().array() += params.lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  require(llt.info() == Eigen::Success, Errc::invalid, "train_pcrc: regularized Gram matrix not positive definite");
  PcrcState s;
  s.chol_lower = llt.matrixL();
  s.lambda = params.lambda;
  TrainedModel m;
  m.kind = ClassifierKind::Pcrc;
  m.feature = space->type;
  m.space = std::move(space);
  m.state = std::move(s);
  m.meta.hyperparameters = {{"lambda", params.lambda}};
  return m;
}

inline TrainedModel train_linear_svm(const TrainingSet& ts, const SvmParams& p = {}) {
  return train_linear_svm(make_feature_space(ts), p);
}
inline TrainedModel train_srkda(const TrainingSet& ts, const SrkdaParams& p = {}) {
  return train_srkda(make_feature_space(ts), p);
}
inline TrainedModel train_pcrc(const TrainingSet& ts, const PcrcParams& p = {}) {
  return train_pcrc(make_feature_space(ts), p);
}

inline double TrainedModel::score_standardized(const Eigen::VectorXd& z) const {
  switch (kind) {
    case ClassifierKind::Svm: return svm_score(*this, z);
    case ClassifierKind::Srkda: return srkda_score(*this, z);
    case ClassifierKind::Pcrc: return pcrc_score(*this, z);
  }
  fail(Errc::invalid, "unknown classifier kind");
}

// ---------------------------------------------------------------------------
// Score grid

/// Raw scores for one probe, indexed [feature][classifier].
struct ScoreSet {
  std::array<std::array<double, kNumClassifiers>, kNumFeatureTypes> grid{};

  double& at(FeatureType f, ClassifierKind c) { return grid[std::size_t(f)][std::size_t(c)]; }
  double at(FeatureType f, ClassifierKind c) const { return grid[std::size_t(f)][std::size_t(c)]; }
};

/// The nine trained models, addressed by (feature, classifier).
struct ModelGrid {
  std::array<std::optional<TrainedModel>, kNumFeatureTypes * kNumClassifiers> slots;

  static std::size_t index(FeatureType f, ClassifierKind c) { return std::size_t(f) * kNumClassifiers + std::size_t(c); }
  std::optional<TrainedModel>& operator()(FeatureType f, ClassifierKind c) { return slots[index(f, c)]; }
  const std::optional<TrainedModel>& operator()(FeatureType f, ClassifierKind c) const { return slots[index(f, c)]; }
  bool complete() const {
    return std::all_of(slots.begin(), slots.end(), [](const auto& s) { return s.has_value(); });
  }
};

inline ScoreSet score_probe(const ModelGrid& models, const FeatureSet& fs) {
  ScoreSet out;
  for (auto f : kFeatureTypes) {
    const auto& vec = fs[f].values;
    const FeatureSpace* last_space = nullptr;
    Eigen::VectorXd z;
    for (auto c : kClassifierKinds) {
      const auto& m = models(f, c);
      if (!m) fail(Errc::invalid, "score_probe: missing model " + std::string(to_string(f)) + "/" + std::string(to_string(c)));
      if (m->space.get() != last_space) {
        z = m->space->standardization.apply(vec);
        last_space = m->space.get();
      }
      const double s = m->score_standardized(z);
      require(std::isfinite(s), Errc::invalid, "score_probe: non-finite score");
      out.at(f, c) = s;
    }
  }
  return out;
}

}  // namespace smad
