#include "kdml/dml_fixed.hpp"

#include <cmath>

#include "kdml/errors.hpp"

namespace kdml {

void FixedConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be a finite value >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
  if (!std::isfinite(rho)) throw ConfigError("rho must be finite");
  if (max_outer_iters < 1) throw ConfigError("max_outer_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be > 0");
  if (!(pinv_rtol > 0.0)) throw ConfigError("pinv_rtol must be > 0");
}

namespace fixed {
namespace {

void check_shapes(const Vector& c, const Matrix& L, const GramCache& cache, const Matrix& targets) {
  const Eigen::Index m = cache.output_dim;
  const Eigen::Index n = cache.samples();
  if (c.size() != m * n) throw ConfigError("coefficient vector must have length m n");
  if (L.rows() != m || L.cols() != m) throw ConfigError("L must be m x m");
  if (targets.rows() != m || targets.cols() != n) throw ConfigError("targets must be m x n");
}

// Columns are f(x_i) = K_i c.
Matrix outputs(const Vector& c, const GramCache& cache) {
  const Vector stacked = cache.block_gram * c;
  return numerics::unvec(stacked, cache.output_dim, cache.samples());
}

}  // namespace

double objective(const Vector& c, const Matrix& L, const GramCache& cache, const Matrix& targets,
                 const FixedConfig& config) {
  check_shapes(c, L, cache, targets);
  const Matrix f = outputs(c, cache);
  const Matrix lf = L * f;
  // sum_ij s_ij |L (f_i - f_j)|^2 = 2 tr(L F (D - S) F' L')
  const double collocation = 2.0 * (lf * cache.laplacian * lf.transpose()).trace();
  const double regression = (L * (f - targets)).squaredNorm();
  return 0.5 * c.dot(cache.block_gram * c) + 0.5 * config.gamma * collocation +
         0.5 * config.lambda * regression + config.rho * L.trace();
}

Matrix hessian_c(const Matrix& L, const GramCache& cache, const FixedConfig& config) {
  const Matrix a = L.transpose() * L;
  // sum_ij s_ij G_ij' A G_ij = 2 K (L_S kron A) K and sum_i K_i' A K_i = K (I kron A) K
  Matrix weight = 2.0 * config.gamma * cache.laplacian;
  weight.diagonal().array() += config.lambda;
  const Matrix& k = cache.block_gram;
  return numerics::symmetrize(k + k * numerics::kron(weight, a) * k);
}

Vector gradient_c(const Vector& c, const Matrix& L, const GramCache& cache, const Matrix& targets,
                  const FixedConfig& config) {
  check_shapes(c, L, cache, targets);
  const Matrix a = L.transpose() * L;
  const Vector rhs = config.lambda * cache.block_gram * numerics::vec(a * targets);
  return hessian_c(L, cache, config) * c - rhs;
}

Vector update_c(const Matrix& L, const GramCache& cache, const Matrix& targets, const FixedConfig& config) {
  const Eigen::Index n = cache.samples();
  const Eigen::Index m = cache.output_dim;
  if (L.rows() != m || L.cols() != m) throw ConfigError("L must be m x m");
  if (targets.rows() != m || targets.cols() != n) throw ConfigError("targets must be m x n");
  const Matrix a = L.transpose() * L;
  // sum_i K_i' A y_i, with A applied per block.
  const Matrix ay = a * targets;
  const Vector rhs = config.lambda * cache.block_gram * numerics::vec(ay);
  return numerics::pinv(hessian_c(L, cache, config), config.pinv_rtol) * rhs;
}

Matrix update_L(const Vector& c, const GramCache& cache, const Matrix& targets, const FixedConfig& config) {
  check_shapes(c, Matrix::Zero(cache.output_dim, cache.output_dim), cache, targets);
  const Matrix f = outputs(c, cache);
  const Matrix residual = f - targets;
  // gamma sum_ij s_ij G_ij c c' G_ij' + lambda sum_i r_i r_i'
  const Matrix m = 2.0 * config.gamma * f * cache.laplacian * f.transpose() +
                   config.lambda * residual * residual.transpose();
  const Matrix l = -config.rho * numerics::pinv(numerics::symmetrize(m), config.pinv_rtol);
  return numerics::symmetrize(l);
}

FixedModel fit(const TrainingData& data, const MatrixKernelSpec& kernel, const FixedConfig& config) {
  config.validate();
  kernel.validate();
  data.validate();
  if (data.output_dim() != kernel.output_dim) {
    throw ConfigError("target dimension " + std::to_string(data.output_dim()) +
                      " does not match kernel output dimension " + std::to_string(kernel.output_dim));
  }
  const GramCache cache = GramCache::for_matrix_kernel(kernel, data.inputs, data.similarity);
  const Matrix& y = data.targets;
  const auto m = kernel.output_dim;

  FixedModel model;
  model.kernel = kernel;
  model.train_inputs = data.inputs;
  model.L = Matrix::Identity(m, m);
  model.c = update_c(model.L, cache, y, config);

  auto checked = [](double q) {
    if (!std::isfinite(q)) {
      throw NumericalError("fixed-kernel fit: objective became non-finite; hyperparameters are numerically broken");
    }
    return q;
  };
  auto raised = [](double after, double before) { return after > before + 1e-12 * (1.0 + std::abs(before)); };

  double q = checked(objective(model.c, model.L, cache, y, config));
  model.objective_trace.push_back(q);

  for (int it = 1; it <= config.max_outer_iters; ++it) {
    model.outer_iterations = it;
    const Matrix l_next = update_L(model.c, cache, y, config);
    const double q_half = checked(objective(model.c, l_next, cache, y, config));
    if (raised(q_half, q)) {
      model.converged = true;
      break;
    }
    const Vector c_next = update_c(l_next, cache, y, config);
    double q_next = checked(objective(c_next, l_next, cache, y, config));
    model.L = l_next;
    bool stalled = false;
    if (raised(q_next, q_half)) {
      q_next = q_half;
      stalled = true;
    } else {
      model.c = c_next;
    }
    model.objective_trace.push_back(q_next);
    const double change = std::abs(q_next - q) / (1.0 + std::abs(q_next));
    q = q_next;
    if (stalled || change < config.rel_tol) {
      model.converged = true;
      break;
    }
  }
  return model;
}

Vector map_point(const FixedModel& model, FeatureView x) {
  return kernels::gram_row(model.kernel, x, model.train_inputs) * model.c;
}

double distance(const FixedModel& model, FeatureView x, FeatureView y) {
  return (model.L * (kernels::gamma(model.kernel, x, y, model.train_inputs) * model.c)).norm();
}

Vector metric_coords(const FixedModel& model, FeatureView x) { return model.L * map_point(model, x); }

}  // namespace fixed
}  // namespace kdml
