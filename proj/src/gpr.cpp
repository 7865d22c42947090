#include "gridfill/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gridfill/errors.hpp"
#include "gridfill/rng.hpp"

namespace gridfill::gpr {

namespace {

void check_params(const KernelParams& p) {
  if (!(p.sigma_f > 0.0) || !(p.lambda > 0.0) || !(p.sigma_n > 0.0)) {
    throw ConfigError("gpr: kernel parameters must all be positive");
  }
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double kernel_std(double xs, double xs_prime, double sigma_f_s, double lambda_s) {
  const double d = xs - xs_prime;
  return sigma_f_s * sigma_f_s * std::exp(-d * d / (2.0 * lambda_s * lambda_s));
}

}  // namespace

double kernel(double x, double x_prime, const KernelParams& params) {
  check_params(params);
  const double d = x - x_prime;
  return params.sigma_f * params.sigma_f *
         std::exp(-d * d / (2.0 * params.lambda * params.lambda));
}

GprModel fit(const std::vector<TrainingPair>& pairs, const KernelParams& params,
             TargetKind target_kind) {
  check_params(params);
  const std::size_t n = pairs.size();
  if (n < 2) throw InputError("gpr::fit: need at least 2 training pairs, got " + std::to_string(n));

  GprModel m;
  m.params = params;
  m.target_kind = target_kind;
  m.x_train.reserve(n);
  m.y_train.reserve(n);
  for (const auto& [x, y] : pairs) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw InputError("gpr::fit: non-finite training value");
    }
    m.x_train.push_back(x);
    m.y_train.push_back(y);
  }

  Standardization& st = m.standardization;
  st.x_mean = mean_of(m.x_train);
  st.x_std = std_of(m.x_train, st.x_mean);
  st.y_mean = mean_of(m.y_train);
  st.y_std = std_of(m.y_train, st.y_mean);
  if (st.x_std == 0.0) st.x_std = 1.0;  // constant inputs: center only
  if (st.y_std == 0.0) st.y_std = 1.0;

  const double lambda_s = params.lambda / st.x_std;
  const double sigma_f_s = params.sigma_f / st.y_std;

  Eigen::VectorXd xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = (m.x_train[i] - st.x_mean) / st.x_std;
    ys[i] = (m.y_train[i] - st.y_mean) / st.y_std;
  }

  Eigen::MatrixXd k_mat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = kernel_std(xs[i], xs[j], sigma_f_s, lambda_s);
      k_mat(i, j) = v;
      k_mat(j, i) = v;
    }
  }

  double sigma_n = params.sigma_n;
  for (int attempt = 0;; ++attempt) {
    const double sigma_n_s = sigma_n / st.y_std;
    Eigen::MatrixXd a = k_mat;
    a.diagonal().array() += sigma_n_s * sigma_n_s;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      m.params.sigma_n = sigma_n;
      m.chol_lower = llt.matrixL();
      m.alpha = llt.solve(ys);
      return m;
    }
    if (attempt >= 3) {
      throw NumericalError("gpr::fit: kernel matrix factorization failed even at sigma_n=" +
                           std::to_string(sigma_n));
    }
    sigma_n *= 10.0;
  }
}

namespace {

// k* against all training inputs, standardized units
Eigen::VectorXd cross_covariances(const GprModel& m, double p_a) {
  const Standardization& st = m.standardization;
  const double xs = (p_a - st.x_mean) / st.x_std;
  const double lambda_s = m.params.lambda / st.x_std;
  const double sigma_f_s = m.params.sigma_f / st.y_std;
  Eigen::VectorXd k_star(m.x_train.size());
  for (std::size_t i = 0; i < m.x_train.size(); ++i) {
    const double xi = (m.x_train[i] - st.x_mean) / st.x_std;
    k_star[i] = kernel_std(xs, xi, sigma_f_s, lambda_s);
  }
  return k_star;
}

}  // namespace

double predict_mean(const GprModel& model, double p_a) {
  const Eigen::VectorXd k_star = cross_covariances(model, p_a);
  const double mu_s = k_star.dot(model.alpha);
  return model.standardization.y_mean + model.standardization.y_std * mu_s;
}

Prediction predict(const GprModel& model, double p_a) {
  const Standardization& st = model.standardization;
  const Eigen::VectorXd k_star = cross_covariances(model, p_a);
  const double mu_s = k_star.dot(model.alpha);

  const double sigma_f_s = model.params.sigma_f / st.y_std;
  // var = k(x*,x*) - k*ᵀ (K + sigma_n² I)⁻¹ k*, via the stored factor
  const Eigen::VectorXd w = model.chol_lower.triangularView<Eigen::Lower>().solve(k_star);
  double var_s = sigma_f_s * sigma_f_s - w.squaredNorm();
  if (var_s < 0.0) var_s = 0.0;  // roundoff

  Prediction p;
  p.mean = st.y_mean + st.y_std * mu_s;
  p.var = st.y_std * st.y_std * var_s;
  return p;
}

std::vector<KernelParams> default_grid(const std::vector<TrainingPair>& pairs) {
  std::vector<double> x, y;
  x.reserve(pairs.size());
  y.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    x.push_back(a);
    y.push_back(b);
  }
  double sx = x.empty() ? 1.0 : std_of(x, mean_of(x));
  double sy = y.empty() ? 1.0 : std_of(y, mean_of(y));
  if (sx == 0.0) sx = 1.0;
  if (sy == 0.0) sy = 1.0;

  static constexpr double kLambdaFactors[] = {0.1, 0.3, 1.0, 3.0, 10.0};
  static constexpr double kSigmaFFactors[] = {0.5, 1.0, 2.0};
  // descending, so an RMSE tie resolves to the larger (more honest) noise
  static constexpr double kSigmaNFactors[] = {0.2, 0.05, 0.01};

  std::vector<KernelParams> grid;
  grid.reserve(std::size(kLambdaFactors) * std::size(kSigmaFFactors) * std::size(kSigmaNFactors));
  for (double lf : kLambdaFactors) {
    for (double ff : kSigmaFFactors) {
      for (double nf : kSigmaNFactors) {
        grid.push_back(KernelParams{ff * sy, lf * sx, nf * sy});
      }
    }
  }
  return grid;
}

KernelParams select_hyperparams(const std::vector<TrainingPair>& pairs,
                                const std::vector<KernelParams>& grid, int k_folds) {
  if (grid.empty()) throw ConfigError("select_hyperparams: empty grid");
  if (k_folds < 2) throw ConfigError("select_hyperparams: k_folds must be >= 2");
  if (pairs.size() < static_cast<std::size_t>(k_folds) + 1) {
    throw InputError("select_hyperparams: need more pairs than folds");
  }

  // canonical order + fixed seeded shuffle makes fold membership a function
  // of the data multiset, not of input order
  std::vector<TrainingPair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> perm(sorted.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(0x6f1d5eedULL);
  rng.shuffle(perm);

  double best_score = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double fold_rmse_sum = 0.0;
    int folds_used = 0;
    bool failed = false;
    for (int fold = 0; fold < k_folds && !failed; ++fold) {
      std::vector<TrainingPair> train;
      std::vector<TrainingPair> val;
      for (std::size_t i = 0; i < perm.size(); ++i) {
        (static_cast<int>(i % k_folds) == fold ? val : train).push_back(sorted[perm[i]]);
      }
      if (train.size() < 2 || val.empty()) continue;
      const bool const_x = std::all_of(train.begin(), train.end(), [&](const TrainingPair& p) {
        return p.first == train.front().first;
      });
      if (const_x) continue;  // degenerate fold
      try {
        const GprModel m = fit(train, grid[g], TargetKind::max);
        double sq = 0.0;
        for (const auto& [x, y] : val) {
          const double r = predict_mean(m, x) - y;
          sq += r * r;
        }
        fold_rmse_sum += std::sqrt(sq / static_cast<double>(val.size()));
        ++folds_used;
      } catch (const NumericalError&) {
        failed = true;
      }
    }
    if (failed || folds_used == 0) continue;
    const double score = fold_rmse_sum / folds_used;
    if (score < best_score) {
      best_score = score;
      best_idx = g;
    }
  }
  if (!std::isfinite(best_score)) {
    // every grid point degenerate; fall back to the first entry
    return grid.front();
  }
  return grid[best_idx];
}

}  // namespace gridfill::gpr
