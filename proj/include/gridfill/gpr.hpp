#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace gridfill::gpr {

// Squared-exponential kernel hyperparameters, in kW. sigma_n is the noise
// scale added on the diagonal; real (P_a, bound) data contains duplicate
// inputs with different targets, so the unregularized kernel matrix is
// singular.
struct KernelParams {
  double sigma_f = 1.0;
  double lambda = 1.0;
  double sigma_n = 0.1;
};

enum class TargetKind { max, min };

// (x - mean) / std applied to inputs and targets before the kernel sees
// them; the prior mean is zero on the standardized targets.
struct Standardization {
  double x_mean = 0.0;
  double x_std = 1.0;
  double y_mean = 0.0;
  double y_std = 1.0;
};

// One training pair: (interval average, interval bound).
using TrainingPair = std::pair<double, double>;

struct GprModel {
  std::vector<double> x_train;  // P_a values, kW
  std::vector<double> y_train;  // bound values, kW
  KernelParams params;          // kW; sigma_n reflects any escalation applied at fit
  TargetKind target_kind = TargetKind::max;
  Standardization standardization;
  Eigen::MatrixXd chol_lower;   // L with L Lᵀ = K + sigma_n² I (standardized units)
  Eigen::VectorXd alpha;        // (K + sigma_n² I)⁻¹ y_standardized
};

struct Prediction {
  double mean = 0.0;  // kW
  double var = 0.0;   // kW²
};

// sigma_f² exp(-(x - x')² / (2 lambda²))
double kernel(double x, double x_prime, const KernelParams& params);

// Builds and factorizes the regularized kernel matrix on standardized data.
// If the factorization fails, sigma_n is raised tenfold up to three times
// before giving up.
GprModel fit(const std::vector<TrainingPair>& pairs, const KernelParams& params,
             TargetKind target_kind);

// Posterior mean and variance at one input, computed through the stored
// factorization and destandardized. Variance is clamped at zero.
Prediction predict(const GprModel& model, double p_a);

// Posterior mean only; skips the variance triangular solve.
double predict_mean(const GprModel& model, double p_a);

// Grid search minimizing mean k-fold validation RMSE. Folds come from a
// fixed seeded shuffle of the (sorted) pairs, so the selection does not
// depend on input order. Ties keep the earliest grid entry.
KernelParams select_hyperparams(const std::vector<TrainingPair>& pairs,
                                const std::vector<KernelParams>& grid, int k_folds);

// Default grid: lambda in {0.1, 0.3, 1, 3, 10} * std(x), sigma_f in
// {0.5, 1, 2} * std(y), sigma_n in {0.01, 0.05, 0.2} * std(y).
std::vector<KernelParams> default_grid(const std::vector<TrainingPair>& pairs);

}  // namespace gridfill::gpr
