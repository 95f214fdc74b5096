#pragma once

#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace hamdual::numerics {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 2000;
  double armijo = 1e-4;
  int max_halvings = 50;
  double f_target = -std::numeric_limits<double>::infinity();  // stop once f <= f_target
  double gradient_tol = 0.0;                                    // stop once |g|_inf <= tol
  int stall_window = 25;  // iterations without relative progress before giving up
  // Optional initial inverse-Hessian approximation applied to a vector.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> precondition;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  std::string stop_reason;  // target | gradient | stall | max_iterations | line_search
};

using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

LbfgsResult lbfgs_minimize(const ObjectiveFn& fg, Eigen::VectorXd x0, const LbfgsOptions& options);

}  // namespace hamdual::numerics
