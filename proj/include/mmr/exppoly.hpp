#pragma once

#include <span>
#include <string>
#include <vector>

namespace mmr {

/// One term c * t^power * exp(rate * t).
struct Term {
  double coeff = 0.0;
  int power = 0;
  double rate = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Finite sum of exponential-polynomial terms in time (years).
///
/// Always held in canonical form: terms sorted by (rate, power), no two terms
/// share a (power, rate) pair, and no zero coefficients. Rates are merged only
/// on exact equality; they come out of identical arithmetic wherever two terms
/// are supposed to combine.
class ExpPoly {
 public:
  static constexpr int kMaxPower = 4;

  ExpPoly() = default;
  explicit ExpPoly(std::vector<Term> terms);

  static ExpPoly constant(double c);
  static ExpPoly monomial(double coeff, int power, double rate);

  std::span<const Term> terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  double operator()(double t) const;

  /// d/dt, exact.
  ExpPoly derivative() const;
  /// t -> integral of f over [0, t], exact.
  ExpPoly integral_from_zero() const;

  /// Sum of the rate-0, power-0 coefficients: the limit as t -> infinity when
  /// every other term decays.
  double constant_term() const noexcept;
  /// Largest rate present; -infinity for the zero function.
  double max_rate() const noexcept;
  /// True when some term has |rate - r| <= tol.
  bool has_rate(double r, double tol = 0.0) const noexcept;

  ExpPoly& operator+=(const ExpPoly& other);
  ExpPoly& operator-=(const ExpPoly& other);
  ExpPoly& operator*=(double s);

  friend ExpPoly operator+(ExpPoly f, const ExpPoly& g) { return f += g; }
  friend ExpPoly operator-(ExpPoly f, const ExpPoly& g) { return f -= g; }
  friend ExpPoly operator*(ExpPoly f, double s) { return f *= s; }
  friend ExpPoly operator*(double s, ExpPoly f) { return f *= s; }
  friend ExpPoly operator-(ExpPoly f) { return f *= -1.0; }
  friend ExpPoly operator*(const ExpPoly& f, const ExpPoly& g);

  friend bool operator==(const ExpPoly&, const ExpPoly&) = default;

  std::string to_string() const;

 private:
  void canonicalize();

  std::vector<Term> terms_;
};

/// Exact value of the integral of f(t) * exp(-discount * t) over [0, inf).
/// Throws DivergentIntegral unless discount - rate > 0 for every term.
double integrate_discounted(const ExpPoly& f, double discount);

/// Integral of f(t) g(t) exp(-discount t) over [0, inf), summed term by term
/// in quad precision without forming the product. Near-resonant solutions
/// carry large opposite coefficients whose squares cancel badly in double.
double discounted_inner_product(const ExpPoly& f, const ExpPoly& g,
                                double discount);

/// sup over a uniform grid of |f(t)| on [t0, t1]; used for residual checks.
double sup_abs_on_grid(const ExpPoly& f, double t0, double t1, int samples);

}  // namespace mmr
