#include "lumped_pid/polynomial.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  std::vector<double> out(ac.size() + bc.size() - 1, 0.0);
  for (std::size_t i = 0; i < ac.size(); ++i)
    for (std::size_t j = 0; j < bc.size(); ++j) out[i + j] += ac[i] * bc[j];
  return Polynomial(std::move(out));
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
  const std::size_t n = std::max(a.coeffs().size(), b.coeffs().size());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
  return Polynomial(std::move(out));
}

std::uint64_t binomial_coefficient(int n, int k) {
  if (n < 0 || n > 60) throw Error(ErrorKind::kInvalidConfig, "binomial order out of range [0, 60]");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // C(n, j) = C(n, j-1) * (n-j+1) / j stays integral at every step, and for
  // n <= 60 the intermediate product fits in 64 bits.
  std::uint64_t c = 1;
  for (int j = 1; j <= k; ++j) c = c * static_cast<std::uint64_t>(n - j + 1) / static_cast<std::uint64_t>(j);
  return c;
}

Polynomial binomial_poly(double omega, int n) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw Error(ErrorKind::kInvalidConfig, "bandwidth omega must be positive and finite");
  if (n < 1 || n > 60) throw Error(ErrorKind::kInvalidConfig, "order n must be in [1, 60]");
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  double omega_pow = 1.0;
  for (int i = 0; i <= n; ++i) {
    c[static_cast<std::size_t>(n - i)] = static_cast<double>(binomial_coefficient(n, i)) * omega_pow;
    omega_pow *= omega;
  }
  return Polynomial(std::move(c));
}

std::string to_string(const Polynomial& p) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) os << (i ? ", " : "") << p.coeffs()[i];
  os << ']';
  return os.str();
}

TransferFunction::TransferFunction(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_.is_zero()) throw Error(ErrorKind::kInvalidConfig, "transfer function denominator is identically zero");
}

std::complex<double> evaluate_at(const TransferFunction& tf, std::complex<double> s) {
  const auto den = tf.denominator()(s);
  if (std::abs(den) <= kPoleHitEpsilon) throw Error(ErrorKind::kPoleHit, "denominator vanishes at evaluation point");
  return tf.numerator()(s) / den;
}

DcGain dc_gain(const TransferFunction& tf) {
  const double num = tf.numerator()[0];
  const double den = tf.denominator()[0];
  if (den == 0.0) {
    if (num == 0.0) return {DcGain::Kind::kIndeterminate, std::nan("")};
    return {DcGain::Kind::kInfinite, num > 0.0 ? 1.0 : -1.0};
  }
  return {DcGain::Kind::kFinite, num / den};
}

ComplexResponse frequency_response(const TransferFunction& tf, double frequency) {
  const auto h = evaluate_at(tf, {0.0, frequency});
  double phase = std::arg(h);
  if (phase <= -std::numbers::pi) phase = std::numbers::pi;
  return {frequency, std::abs(h), phase};
}

}  // namespace lumped_pid
