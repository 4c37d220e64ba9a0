#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lumped_pid {

/// Real polynomial with ascending-degree storage: coeffs()[i] multiplies s^i.
/// Trailing zeros are trimmed on construction, so the zero polynomial has no
/// coefficients and degree() == -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs)
      : Polynomial(std::vector<double>(coeffs)) {}

  std::span<const double> coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  /// Coefficient of s^i; zero past the leading term.
  double operator[](std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0.0; }

  /// Horner evaluation.
  double operator()(double s) const;
  std::complex<double> operator()(std::complex<double> s) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_add(const Polynomial& a, const Polynomial& b);

/// Exact C(n, k) for n <= 60.
std::uint64_t binomial_coefficient(int n, int k);

/// Expansion of (s + omega)^n. Coefficient of s^(n-i) is C(n,i) omega^i.
Polynomial binomial_poly(double omega, int n);

std::string to_string(const Polynomial& p);

/// Ratio of two real polynomials. The denominator is never identically zero.
class TransferFunction {
 public:
  TransferFunction(Polynomial numerator, Polynomial denominator);

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }

  bool is_proper() const { return num_.degree() <= den_.degree(); }

 private:
  Polynomial num_;
  Polynomial den_;
};

/// |den(s)| at or below this raises kPoleHit in evaluate_at.
inline constexpr double kPoleHitEpsilon = 1e-300;

std::complex<double> evaluate_at(const TransferFunction& tf, std::complex<double> s);

struct DcGain {
  enum class Kind { kFinite, kInfinite, kIndeterminate };
  Kind kind = Kind::kFinite;
  double value = 0.0;  // meaningful for kFinite; sign of num(0) for kInfinite

  bool is_finite() const { return kind == Kind::kFinite; }
};

DcGain dc_gain(const TransferFunction& tf);

/// One point of a frequency response. Phase is wrapped into (-pi, pi].
struct ComplexResponse {
  double frequency = 0.0;
  double magnitude = 0.0;
  double phase = 0.0;
};

ComplexResponse frequency_response(const TransferFunction& tf, double frequency);

}  // namespace lumped_pid
