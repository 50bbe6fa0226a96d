#include "kdml/dml_param.hpp"

#include <cmath>
#include <string>

#include "kdml/errors.hpp"

namespace kdml {

void ParamConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be a finite value >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be >= 0 for the parameterized model");
  if (max_outer_iters < 1) throw ConfigError("max_outer_iters must be >= 1");
  if (pgd_max_iters < 1) throw ConfigError("pgd_max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be > 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw ConfigError("backtrack_factor must lie in (0, 1)");
  }
  if (!(jitter_rel >= 0.0)) throw ConfigError("jitter_rel must be >= 0");
}

namespace param {
namespace {

constexpr int kMaxBacktracks = 60;

void check_shapes(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
                  const Matrix& targets) {
  const Eigen::Index m = B.rows();
  const Eigen::Index n = gram.rows();
  if (B.cols() != m) throw ConfigError("B must be square");
  if (gram.cols() != n || graph_gram.rows() != n || graph_gram.cols() != n) {
    throw ConfigError("kernel matrices must be n x n");
  }
  if (C.rows() != m || C.cols() != n) throw ConfigError("C must be m x n");
  if (targets.rows() != m || targets.cols() != n) throw ConfigError("targets must be m x n");
}

// Objective restricted to B for a fixed C; the C-dependent products are
// formed once.
class BObjective {
 public:
  BObjective(const Matrix& C, const Matrix& gram, const Matrix& graph_gram, const Matrix& targets,
             const ParamConfig& config)
      : colloc_(C * graph_gram * C.transpose()),
        ck_(C * gram),
        ckc_(ck_ * C.transpose()),
        targets_(targets),
        config_(config) {}

  double operator()(const Matrix& B) const {
    const double colloc = (colloc_ * B * B).trace();
    const double fit = (B * ck_ - targets_).squaredNorm();
    return 0.5 * config_.gamma * colloc + 0.5 * config_.lambda * fit + 0.5 * config_.rho * B.squaredNorm() +
           0.5 * (B * ckc_).trace();
  }

 private:
  Matrix colloc_;
  Matrix ck_;
  Matrix ckc_;
  const Matrix& targets_;
  const ParamConfig& config_;
};

Matrix jittered(const Matrix& gram, double jitter_rel) {
  const Eigen::Index n = gram.rows();
  const double delta = jitter_rel * gram.trace() / static_cast<double>(n);
  if (delta > 0.0 && numerics::min_eigenvalue(gram) < delta) {
    return gram + delta * Matrix::Identity(n, n);
  }
  return gram;
}

// K^{-1} Kd = (Kd K^{-1})' for symmetric K and Kd.
Matrix left_collocation_factor(const Matrix& gram, const Matrix& graph_gram, double jitter_rel) {
  const Matrix k = jittered(gram, jitter_rel);
  Eigen::LDLT<Matrix> ldlt(k);
  if (ldlt.info() != Eigen::Success) throw NumericalError("kernel matrix factorization failed");
  return ldlt.solve(graph_gram);
}

double checked(double q) {
  if (!std::isfinite(q)) {
    throw NumericalError("parameterized-kernel fit: objective became non-finite; hyperparameters are numerically broken");
  }
  return q;
}

bool raised(double after, double before) { return after > before + 1e-12 * (1.0 + std::abs(before)); }

}  // namespace

double objective(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
                 const Matrix& targets, const ParamConfig& config) {
  check_shapes(C, B, gram, graph_gram, targets);
  return BObjective(C, gram, graph_gram, targets, config)(B);
}

Matrix collocation_factor(const Matrix& gram, const Matrix& graph_gram, double jitter_rel) {
  return left_collocation_factor(gram, graph_gram, jitter_rel).transpose();
}

Matrix solve_C(const Matrix& B, const Matrix& gram, const Matrix& graph_gram, const Matrix& targets,
               const ParamConfig& config) {
  const Eigen::Index m = B.rows();
  const Eigen::Index n = gram.rows();
  check_shapes(Matrix::Zero(m, n), B, gram, graph_gram, targets);
  // vec(B C X) = (X' kron B) vec(C), with X = Kd K^{-1}.
  const Matrix x_t = left_collocation_factor(gram, graph_gram, config.jitter_rel);
  Matrix system = config.gamma * numerics::kron(x_t, B) + config.lambda * numerics::kron(gram, B);
  system.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Matrix> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw NumericalError("solve_C: singular Kronecker system (rcond " + std::to_string(rcond) + ")");
  }
  const Vector c = lu.solve(config.lambda * numerics::vec(targets));
  return numerics::unvec(c, m, n);
}

Matrix stationarity_residual(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
                             const Matrix& targets, const ParamConfig& config) {
  check_shapes(C, B, gram, graph_gram, targets);
  const Matrix x = collocation_factor(gram, graph_gram, config.jitter_rel);
  return C + config.gamma * B * C * x + config.lambda * B * C * gram - config.lambda * targets;
}

Matrix g_matrix(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
                const Matrix& targets, const ParamConfig& config) {
  check_shapes(C, B, gram, graph_gram, targets);
  Matrix inner = C * (config.gamma * graph_gram + config.lambda * gram * gram) * C.transpose();
  inner.diagonal().array() += config.rho;
  return B * inner - (config.lambda * targets - 0.5 * C) * gram * C.transpose();
}

Matrix grad_B(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
              const Matrix& targets, const ParamConfig& config) {
  const Matrix g = g_matrix(C, B, gram, graph_gram, targets, config);
  Matrix out = g + g.transpose();
  out.diagonal() -= g.diagonal();
  return out;
}

Matrix project_psd(const Matrix& m) {
  if (!m.allFinite()) throw NumericalError("project_psd: non-finite entries");
  const numerics::SymEig eig = numerics::sym_eig(numerics::symmetrize(m));
  const Vector clamped = eig.values.cwiseMax(0.0);
  return numerics::symmetrize(eig.vectors * clamped.asDiagonal() * eig.vectors.transpose());
}

ParamModel fit(const TrainingData& data, const ScalarKernelSpec& kernel, const ParamConfig& config,
               const PgdObserver& observer) {
  config.validate();
  kernel.validate();
  data.validate();
  const int m = data.output_dim();
  const GramCache cache = GramCache::for_scalar_kernel(kernel, m, data.inputs, data.similarity);
  const Matrix& gram = cache.scalar_gram;
  const Matrix& graph = cache.graph_gram;
  const Matrix& y = data.targets;

  ParamModel model;
  model.kernel = kernel;
  model.train_inputs = data.inputs;
  model.B = Matrix::Identity(m, m);
  model.C = solve_C(model.B, gram, graph, y, config);
  double q = checked(objective(model.C, model.B, gram, graph, y, config));
  model.objective_trace.push_back(q);

  for (int it = 1; it <= config.max_outer_iters; ++it) {
    model.outer_iterations = it;

    // Projected gradient on B with C fixed.
    const BObjective q_of_b(model.C, gram, graph, y, config);
    double q_b = q;
    for (int t = 0; t < config.pgd_max_iters; ++t) {
      const Matrix g = g_matrix(model.C, model.B, gram, graph, y, config);
      Matrix direction = g + g.transpose();
      direction.diagonal() -= g.diagonal();
      const Matrix descent = numerics::symmetrize(g);
      const double b_scale = 1.0 + model.B.norm();

      const Matrix full_step = project_psd(model.B - direction) - model.B;
      if (full_step.norm() < config.rel_tol * b_scale) break;

      double alpha = 1.0;
      bool accepted = false;
      Matrix candidate;
      double q_candidate = q_b;
      for (int h = 0; h <= kMaxBacktracks; ++h) {
        candidate = project_psd(model.B - alpha * direction);
        const Matrix step = candidate - model.B;
        q_candidate = checked(q_of_b(candidate));
        if (q_candidate <= q_b &&
            q_candidate <= q_b + config.armijo_c * (descent.array() * step.array()).sum()) {
          accepted = true;
          break;
        }
        alpha *= config.backtrack_factor;
      }
      if (!accepted) {
        // At the round-off floor the full projected step is already tiny.
        if (full_step.norm() < 1e-6 * b_scale) break;
        throw NumericalError("projected gradient: line search found no decrease after " +
                             std::to_string(kMaxBacktracks) + " reductions");
      }
      const double moved = (candidate - model.B).norm();
      model.B = candidate;
      q_b = q_candidate;
      ++model.pgd_iterations;
      if (observer) observer(model.B);
      if (moved < config.rel_tol * b_scale) break;
    }

    const Matrix c_next = solve_C(model.B, gram, graph, y, config);
    double q_next = checked(objective(c_next, model.B, gram, graph, y, config));
    bool stalled = false;
    if (raised(q_next, q_b)) {
      q_next = q_b;
      stalled = true;
    } else {
      model.C = c_next;
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

Vector map_point(const ParamModel& model, FeatureView x) {
  return model.B * (model.C * kernels::k_vec(model.kernel, x, model.train_inputs));
}

double distance(const ParamModel& model, FeatureView x, FeatureView y) {
  const Vector diff = kernels::k_vec(model.kernel, x, model.train_inputs) -
                      kernels::k_vec(model.kernel, y, model.train_inputs);
  return (model.B * (model.C * diff)).norm();
}

}  // namespace param
}  // namespace kdml
