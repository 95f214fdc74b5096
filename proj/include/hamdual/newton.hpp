#pragma once

#include <limits>
#include <string>

#include "hamdual/lbfgs.hpp"

namespace hamdual::numerics {

/// Damped Newton for objectives whose Hessian is block tridiagonal: variables
/// come in consecutive blocks of `block` entries and the gradient of a block
/// depends only on itself and its two neighbours.
struct NewtonOptions {
  int block = 2;
  int max_iterations = 100;
  double f_target = -std::numeric_limits<double>::infinity();
  double fd_step = 1e-8;  // relative finite-difference step
  int stall_window = 20;
};

struct NewtonResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int gradient_evaluations = 0;
  std::string stop_reason;  // target | stall | max_iterations | singular
};

NewtonResult newton_banded(const ObjectiveFn& fg, Eigen::VectorXd x0, const NewtonOptions& options);

}  // namespace hamdual::numerics
