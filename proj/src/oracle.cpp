#include <cmath>
#include <numeric>

#include "mmr/control.hpp"
#include "mmr/errors.hpp"

namespace mmr {
namespace {

// Discretized cost
//   J(A) = sum_i rho_i * 0.5 * (alpha A_i^2 + k' E_i^2),   k' = beta m^2,
// with rho_i = h w_i e^{-d t_i} (trapezoid weights w) and E from trapezoid
// integration of B - A. Its gradient is assembled with one reverse
// (suffix-sum) pass through the integration operator.
class DiscreteProblem {
 public:
  DiscreteProblem(double discount, double damage_weight, double alpha,
                  double step, std::size_t intervals)
      : h_(step), alpha_(alpha), damage_weight_(damage_weight),
        rho_(intervals + 1) {
    for (std::size_t i = 0; i < rho_.size(); ++i) {
      const double w = (i == 0 || i == intervals) ? 0.5 : 1.0;
      rho_[i] = h_ * w * std::exp(-discount * h_ * static_cast<double>(i));
    }
  }

  std::size_t size() const { return rho_.size(); }

  std::vector<double> stock(const std::vector<double>& a,
                            const std::vector<double>& base, double e0) const {
    std::vector<double> e(size());
    e[0] = e0;
    for (std::size_t i = 1; i < size(); ++i) {
      e[i] = e[i - 1] +
             0.5 * h_ * ((base[i - 1] - a[i - 1]) + (base[i] - a[i]));
    }
    return e;
  }

  double cost(const std::vector<double>& a, const std::vector<double>& base,
              double e0) const {
    const auto e = stock(a, base, e0);
    double j = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      j += rho_[i] * 0.5 * (alpha_ * a[i] * a[i] + damage_weight_ * e[i] * e[i]);
    }
    return j;
  }

  std::vector<double> gradient(const std::vector<double>& a,
                               const std::vector<double>& base,
                               double e0) const {
    const auto e = stock(a, base, e0);
    const std::size_t n = size();
    std::vector<double> g(n);
    double suffix = 0.0;  // sum over i > j of rho_i k' E_i
    for (std::size_t jj = n; jj-- > 0;) {
      const double ge = rho_[jj] * damage_weight_ * e[jj];
      const double own = jj >= 1 ? 0.5 * ge : 0.0;
      const double later = (jj == 0 ? 0.5 : 1.0) * suffix;
      g[jj] = rho_[jj] * alpha_ * a[jj] - h_ * (own + later);
      suffix += ge;
    }
    return g;
  }

  std::vector<double> hessian_diagonal() const {
    const std::size_t n = size();
    std::vector<double> diag(n);
    double suffix = 0.0;  // sum over i > j of rho_i
    for (std::size_t jj = n; jj-- > 0;) {
      const double tail = jj == 0 ? 0.25 * suffix : 0.25 * rho_[jj] + suffix;
      diag[jj] = rho_[jj] * alpha_ + damage_weight_ * h_ * h_ * tail;
      suffix += rho_[jj];
    }
    return diag;
  }

 private:
  double h_;
  double alpha_;
  double damage_weight_;
  std::vector<double> rho_;
};

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

}  // namespace

OracleResult numeric_oracle(double discount, const ClimateModel& model,
                            const ScenarioConfig& scenario,
                            const OracleOptions& options) {
  if (!(options.step > 0.0 && options.step <= 1.0)) {
    throw ValidationError("oracle step must lie in (0, 1] years");
  }
  if (!(options.horizon >= 1000.0)) {
    throw ValidationError("oracle horizon must be at least 1000 years");
  }
  if (!(discount > 0.0)) {
    throw InvalidDiscount("oracle needs a positive discount rate");
  }
  model.validate();
  scenario.validate();

  const auto intervals =
      static_cast<std::size_t>(std::llround(options.horizon / options.step));
  const DiscreteProblem problem(
      discount, scenario.econ.beta * model.ccr * model.ccr,
      scenario.econ.alpha, options.step, intervals);
  const std::size_t n = problem.size();

  OracleResult out;
  out.times.resize(n);
  std::vector<double> base(n), zeros(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.times[i] = options.step * static_cast<double>(i);
    base[i] = scenario.baseline(out.times[i]);
  }

  // The Hessian-vector product is the gradient of the homogeneous problem.
  auto hess_apply = [&](const std::vector<double>& v) {
    return problem.gradient(v, zeros, 0.0);
  };
  const auto precond = problem.hessian_diagonal();

  std::vector<double> x(n, 0.0);
  std::vector<double> r = problem.gradient(x, base, scenario.e0);
  for (double& ri : r) ri = -ri;
  const double r0 = std::sqrt(dot(r, r));
  std::vector<double> z(n), p(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / precond[i];
  p = z;
  double rz = dot(r, z);
  int iter = 0;
  while (r0 > 0.0 && std::sqrt(dot(r, r)) > options.tolerance * r0) {
    if (iter >= options.max_iterations) {
      throw NonConvergence("oracle conjugate gradient did not converge");
    }
    const auto hp = hess_apply(p);
    const double step = rz / dot(p, hp);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * hp[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / precond[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++iter;
  }
  out.abatement = std::move(x);
  out.cost = problem.cost(out.abatement, base, scenario.e0);
  out.iterations = iter;
  return out;
}

}  // namespace mmr
