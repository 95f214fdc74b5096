#pragma once

#include <memory>
#include <optional>
#include <string>

#include "hamdual/convex_fn.hpp"

namespace hamdual {

/// Convex H on R^N x R^N; the argument is x = (p, q) with p first.
struct Hamiltonian {
  int N = 0;
  ConvexFn f;

  Hamiltonian() = default;
  explicit Hamiltonian(ConvexFn fn) : N(fn.dim() / 2), f(std::move(fn)) {
    if (f.dim() % 2 != 0) throw std::invalid_argument("Hamiltonian: dimension must be even");
  }

  static Vec join(const Vec& p, const Vec& q) {
    Vec x(p.size() + q.size());
    x << p, q;
    return x;
  }
  double operator()(const Vec& p, const Vec& q) const { return f.eval(join(p, q)); }
};

struct PointEval {
  double value = 0.0;
  Vec grad;
  bool unique = true;
};

/// A convex function together with its conjugate, both with (sub)gradients.
/// Interior terms of every action are Fenchel-Young defects of such a pair.
class FenchelPair {
 public:
  virtual ~FenchelPair() = default;
  virtual int dim() const = 0;
  virtual PointEval primal(const Vec& x) const = 0;
  virtual PointEval dual(const Vec& y) const = 0;
  virtual bool has_dual() const { return true; }
  virtual std::string describe() const = 0;

  /// f(x) + f*(y) - x.y
  double defect(const Vec& x, const Vec& y) const {
    return primal(x).value + dual(y).value - x.dot(y);
  }
};

/// f paired with its exact (closed-form or grid) conjugate.
class ExactPair : public FenchelPair {
 public:
  explicit ExactPair(ConvexFn f);
  int dim() const override { return f_.dim(); }
  PointEval primal(const Vec& x) const override;
  PointEval dual(const Vec& y) const override;
  bool has_dual() const override { return conj_.has_value(); }
  std::string describe() const override { return f_.describe(); }
  /// Reason the conjugate is unavailable, empty otherwise.
  const std::string& dual_error() const { return why_; }
  const ConvexFn& fn() const { return f_; }

 private:
  ConvexFn f_;
  std::optional<ConvexFn> conj_;
  std::string why_;
};

PointEval eval_with_subgradient(const ConvexFn& f, const Vec& x);

}  // namespace hamdual
