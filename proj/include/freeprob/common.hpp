#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace freeprob {

// Exact scalar used whenever the input data is rational.
using Rational = mpq_class;

// Default cap on the word length / partition ground-set size.  C_16 is
// already ~35M partitions; anything above that needs an explicit opt-in.
inline constexpr int kDefaultRMax = 16;

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConditioningError : std::runtime_error {
  double gram_condition;
  explicit ConditioningError(const std::string& what, double cond)
      : std::runtime_error(what), gram_condition(cond) {}
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when Stieltjes inversion detects point masses: the measure has no
// density and the entropy path must take the -inf branch.
struct AtomicSpectrumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Catalan numbers C_0..C_30 (C_30 = 3814986502092304 fits in int64).
long long catalan(int n);

template <class T>
inline double to_double(const T& x) {
  return static_cast<double>(x);
}
template <>
inline double to_double<Rational>(const Rational& x) {
  return x.get_d();
}

template <class T>
inline T scalar_from_int(long v) {
  return static_cast<T>(v);
}
template <>
inline Rational scalar_from_int<Rational>(long v) {
  return Rational(v);
}

// mpq_class(p, q) does not reduce the fraction; this does.
inline Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

template <class T>
inline bool is_zero(const T& x) {
  return x == T(0);
}

}  // namespace freeprob
