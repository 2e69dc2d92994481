#include "mmr/exppoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmr/errors.hpp"

namespace mmr {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// n! / (n-k)!
double falling_factorial(int n, int k) {
  double f = 1.0;
  for (int i = 0; i < k; ++i) f *= n - i;
  return f;
}

}  // namespace

ExpPoly::ExpPoly(std::vector<Term> terms) : terms_(std::move(terms)) {
  canonicalize();
}

ExpPoly ExpPoly::constant(double c) { return ExpPoly({{c, 0, 0.0}}); }

ExpPoly ExpPoly::monomial(double coeff, int power, double rate) {
  return ExpPoly({{coeff, power, rate}});
}

void ExpPoly::canonicalize() {
  for (const Term& term : terms_) {
    if (term.power < 0 || term.power > kMaxPower) {
      throw std::logic_error("ExpPoly: power " + std::to_string(term.power) +
                             " outside [0, " + std::to_string(kMaxPower) +
                             "]");
    }
    if (!std::isfinite(term.coeff) || !std::isfinite(term.rate)) {
      throw std::logic_error("ExpPoly: non-finite coefficient or rate");
    }
  }
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    return a.rate != b.rate ? a.rate < b.rate : a.power < b.power;
  });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const Term& term : terms_) {
    if (!merged.empty() && merged.back().rate == term.rate &&
        merged.back().power == term.power) {
      merged.back().coeff += term.coeff;
    } else {
      merged.push_back(term);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  terms_ = std::move(merged);
}

double ExpPoly::operator()(double t) const {
  double sum = 0.0;
  for (const Term& term : terms_) {
    sum += term.coeff * std::pow(t, term.power) * std::exp(term.rate * t);
  }
  return sum;
}

ExpPoly ExpPoly::derivative() const {
  std::vector<Term> out;
  out.reserve(2 * terms_.size());
  for (const Term& term : terms_) {
    if (term.rate != 0.0) {
      out.push_back({term.coeff * term.rate, term.power, term.rate});
    }
    if (term.power > 0) {
      out.push_back({term.coeff * term.power, term.power - 1, term.rate});
    }
  }
  return ExpPoly(std::move(out));
}

ExpPoly ExpPoly::integral_from_zero() const {
  std::vector<Term> out;
  for (const Term& term : terms_) {
    const int n = term.power;
    const double mu = term.rate;
    if (mu == 0.0) {
      out.push_back({term.coeff / (n + 1), n + 1, 0.0});
      continue;
    }
    // Antiderivative e^{mu t} sum_k (-1)^k n!/(n-k)! t^{n-k} / mu^{k+1},
    // minus its value at t = 0.
    double mu_pow = mu;
    for (int k = 0; k <= n; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      out.push_back(
          {term.coeff * sign * falling_factorial(n, k) / mu_pow, n - k, mu});
      mu_pow *= mu;
    }
    const double sign_n = (n % 2 == 0) ? 1.0 : -1.0;
    out.push_back(
        {-term.coeff * sign_n * factorial(n) / std::pow(mu, n + 1), 0, 0.0});
  }
  return ExpPoly(std::move(out));
}

double ExpPoly::constant_term() const noexcept {
  for (const Term& term : terms_) {
    if (term.rate == 0.0 && term.power == 0) return term.coeff;
  }
  return 0.0;
}

double ExpPoly::max_rate() const noexcept {
  double r = -std::numeric_limits<double>::infinity();
  for (const Term& term : terms_) r = std::max(r, term.rate);
  return r;
}

bool ExpPoly::has_rate(double r, double tol) const noexcept {
  return std::any_of(terms_.begin(), terms_.end(), [&](const Term& term) {
    return std::abs(term.rate - r) <= tol;
  });
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  canonicalize();
  return *this;
}

ExpPoly& ExpPoly::operator-=(const ExpPoly& other) {
  for (const Term& term : other.terms_) {
    terms_.push_back({-term.coeff, term.power, term.rate});
  }
  canonicalize();
  return *this;
}

ExpPoly& ExpPoly::operator*=(double s) {
  for (Term& term : terms_) term.coeff *= s;
  canonicalize();
  return *this;
}

ExpPoly operator*(const ExpPoly& f, const ExpPoly& g) {
  std::vector<Term> out;
  out.reserve(f.size() * g.size());
  for (const Term& a : f.terms_) {
    for (const Term& b : g.terms_) {
      out.push_back({a.coeff * b.coeff, a.power + b.power, a.rate + b.rate});
    }
  }
  return ExpPoly(std::move(out));
}

std::string ExpPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (const Term& term : terms_) {
    if (!first) os << " + ";
    first = false;
    os << term.coeff;
    if (term.power == 1) os << "*t";
    if (term.power > 1) os << "*t^" << term.power;
    if (term.rate != 0.0) os << "*exp(" << term.rate << "*t)";
  }
  return os.str();
}

double integrate_discounted(const ExpPoly& f, double discount) {
  double sum = 0.0;
  for (const Term& term : f.terms()) {
    const double s = discount - term.rate;
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "integral diverges: term with rate " << term.rate
         << " is not dominated by discount " << discount;
      throw DivergentIntegral(os.str());
    }
    sum += term.coeff * factorial(term.power) / std::pow(s, term.power + 1);
  }
  return sum;
}

double discounted_inner_product(const ExpPoly& f, const ExpPoly& g,
                                double discount) {
  __extension__ typedef __float128 quad;
  quad sum = 0;
  for (const Term& a : f.terms()) {
    for (const Term& b : g.terms()) {
      const quad s = static_cast<quad>(discount) - a.rate - b.rate;
      if (!(s > 0)) {
        std::ostringstream os;
        os << "integral diverges: product rate " << a.rate + b.rate
           << " is not dominated by discount " << discount;
        throw DivergentIntegral(os.str());
      }
      const int n = a.power + b.power;
      quad v = static_cast<quad>(a.coeff) * b.coeff / s;
      for (int i = 1; i <= n; ++i) v = v * i / s;
      sum += v;
    }
  }
  return static_cast<double>(sum);
}

double sup_abs_on_grid(const ExpPoly& f, double t0, double t1, int samples) {
  double sup = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + (t1 - t0) * i / samples;
    sup = std::max(sup, std::abs(f(t)));
  }
  return sup;
}

}  // namespace mmr
