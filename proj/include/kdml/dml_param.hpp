#pragma once

#include <functional>
#include <vector>

#include "kdml/kernels.hpp"
#include "kdml/training_data.hpp"

namespace kdml {

struct ParamConfig {
  double gamma = 1.0;
  double lambda = 1.0;  // must be > 0
  double rho = 0.1;     // Frobenius penalty on B, must be >= 0
  int max_outer_iters = 100;
  double rel_tol = 1e-8;
  int pgd_max_iters = 500;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double jitter_rel = 1e-8;

  void validate() const;
};

// Parameterized-kernel model K(x, x') = k(x, x') B: f(x) = B C k(x), A = B^2.
struct ParamModel {
  Matrix C;  // m x n
  Matrix B;  // m x m, symmetric PSD
  RowMatrix train_inputs;
  ScalarKernelSpec kernel;
  std::vector<double> objective_trace;
  int outer_iterations = 0;
  int pgd_iterations = 0;
  bool converged = false;

  int output_dim() const { return static_cast<int>(B.rows()); }
};

namespace param {

// gamma/2 tr(C Kd C' B^2) + lambda/2 |B C K - Y|_F^2 + rho/2 |B|_F^2 + 1/2 tr(C' B C K)
double objective(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
                 const Matrix& targets, const ParamConfig& config);

// K_Delta K^{-1}, with K jittered by delta I (delta = jitter_rel tr(K)/n) when
// its smallest eigenvalue falls below delta.
Matrix collocation_factor(const Matrix& gram, const Matrix& graph_gram, double jitter_rel);

/// Exact minimizer over C for fixed B: solves
///   C + gamma B C Kd K^{-1} + lambda B C K = lambda Y
/// through its vectorized form (I + gamma (K^{-1} Kd) kron B + lambda K kron B) vec(C) = lambda vec(Y).
/// Throws NumericalError when that system is singular.
Matrix solve_C(const Matrix& B, const Matrix& gram, const Matrix& graph_gram, const Matrix& targets,
               const ParamConfig& config);

// Left side minus right side of the stationarity equation solved by solve_C.
Matrix stationarity_residual(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
                             const Matrix& targets, const ParamConfig& config);

// G = B [C (gamma Kd + lambda K^2) C' + rho I] - (lambda Y - C/2) K C'
Matrix g_matrix(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
                const Matrix& targets, const ParamConfig& config);

// G + G' - G o I: gradient over the independent entries of a symmetric B.
Matrix grad_B(const Matrix& C, const Matrix& B, const Matrix& gram, const Matrix& graph_gram,
              const Matrix& targets, const ParamConfig& config);

// Frobenius-nearest PSD matrix: symmetrize, clamp negative eigenvalues to 0.
Matrix project_psd(const Matrix& m);

// Called with B after every accepted projected-gradient step.
using PgdObserver = std::function<void(const Matrix& B)>;

/// Alternates an exact solve_C with a projected-gradient loop on B (Armijo
/// backtracking from step 1, projection onto the PSD cone after each step),
/// starting from B = I. Throws NumericalError on a non-finite objective or a
/// line search that finds no decrease after 60 reductions.
ParamModel fit(const TrainingData& data, const ScalarKernelSpec& kernel, const ParamConfig& config,
               const PgdObserver& observer = {});

Vector map_point(const ParamModel& model, FeatureView x);
// |B C (k(x) - k(x'))|
double distance(const ParamModel& model, FeatureView x, FeatureView y);
// f(x) itself; Euclidean distances between these equal distance().
inline Vector metric_coords(const ParamModel& model, FeatureView x) { return map_point(model, x); }

}  // namespace param
}  // namespace kdml
