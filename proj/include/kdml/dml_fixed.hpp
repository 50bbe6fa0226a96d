#pragma once

#include <string>
#include <vector>

#include "kdml/kernels.hpp"
#include "kdml/training_data.hpp"

namespace kdml {

struct FixedConfig {
  double gamma = 1.0;   // collocation weight
  double lambda = 1.0;  // regression weight, must be > 0
  double rho = 0.0;     // trace penalty on L
  int max_outer_iters = 200;
  double rel_tol = 1e-8;
  double pinv_rtol = 1e-10;

  void validate() const;
};

// Fixed matrix-kernel model: f(x) = sum_j K(x, x_j) c_j, metric A = L^T L.
struct FixedModel {
  Vector c;  // stacked [c_1; ...; c_n], length m n
  Matrix L;  // m x m
  RowMatrix train_inputs;
  MatrixKernelSpec kernel;
  std::vector<double> objective_trace;
  int outer_iterations = 0;
  bool converged = false;

  int output_dim() const { return kernel.output_dim; }
};

namespace fixed {

// Q(c, L) = 1/2 c'Kc + gamma/2 sum_ij s_ij |L G_ij c|^2
//         + lambda/2 sum_i |L (K_i c - y_i)|^2 + rho tr(L)
double objective(const Vector& c, const Matrix& L, const GramCache& cache, const Matrix& targets,
                 const FixedConfig& config);

// Hessian of Q in c (independent of c).
Matrix hessian_c(const Matrix& L, const GramCache& cache, const FixedConfig& config);

// dQ/dc
Vector gradient_c(const Vector& c, const Matrix& L, const GramCache& cache, const Matrix& targets,
                  const FixedConfig& config);

// Exact minimizer over c for fixed L (pseudo-inverse of the Hessian).
Vector update_c(const Matrix& L, const GramCache& cache, const Matrix& targets, const FixedConfig& config);

// Closed-form L = -rho pinv(M(c)); symmetric.
Matrix update_L(const Vector& c, const GramCache& cache, const Matrix& targets, const FixedConfig& config);

/// Block coordinate descent from L = I. The first half-step is update_c and
/// its objective is objective_trace[0]; each outer iteration then applies
/// update_L followed by update_c and appends the objective. Iteration stops
/// when |dQ| / (1 + |Q|) < rel_tol, at max_outer_iters, or when a half-step
/// can no longer lower the objective beyond round-off (the previous iterate is
/// kept). Throws NumericalError on a non-finite objective.
FixedModel fit(const TrainingData& data, const MatrixKernelSpec& kernel, const FixedConfig& config);

Vector map_point(const FixedModel& model, FeatureView x);
// |L Gamma(x, x') c|
double distance(const FixedModel& model, FeatureView x, FeatureView y);
// L f(x): Euclidean distances between these equal distance().
Vector metric_coords(const FixedModel& model, FeatureView x);

}  // namespace fixed
}  // namespace kdml
