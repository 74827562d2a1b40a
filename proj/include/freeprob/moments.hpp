#pragma once

#include <map>
#include <string>
#include <vector>

#include "freeprob/common.hpp"
#include "freeprob/nc_lattice.hpp"

namespace freeprob::moments {

// Moments m_1..m_N of a distribution; m_0 = 1 is implicit (tau(1) = 1).
template <class T>
struct MomentSequence {
  std::vector<T> m;

  int order() const { return static_cast<int>(m.size()); }
  // r = 0..N
  T moment(int r) const {
    if (r == 0) return T(1);
    if (r < 1 || r > order()) throw std::domain_error("moment: order exceeded");
    return m[r - 1];
  }
  bool operator==(const MomentSequence&) const = default;
};

// Free cumulants kappa_1..kappa_N.
template <class T>
struct CumulantSequence {
  std::vector<T> k;

  int order() const { return static_cast<int>(k.size()); }
  T cumulant(int r) const {
    if (r < 1 || r > order()) throw std::domain_error("cumulant: order exceeded");
    return k[r - 1];
  }
  bool operator==(const CumulantSequence&) const = default;
};

namespace detail {

// Coefficients of M(z)^s truncated at degree N, where M(z) = 1 + sum m_j z^j.
template <class T>
std::vector<std::vector<T>> moment_series_powers(const std::vector<T>& m, int N, int s_max) {
  std::vector<std::vector<T>> P(s_max + 1, std::vector<T>(N + 1, T(0)));
  P[0][0] = T(1);
  std::vector<T> M(N + 1, T(0));
  M[0] = T(1);
  for (int j = 1; j <= N && j <= static_cast<int>(m.size()); ++j) M[j] = m[j - 1];
  for (int s = 1; s <= s_max; ++s)
    for (int a = 0; a <= N; ++a)
      for (int b = 0; a + b <= N; ++b) P[s][a + b] += P[s - 1][a] * M[b];
  return P;
}

}  // namespace detail

// m_n = sum_{s=1}^n kappa_s * [z^{n-s}] M(z)^s  (first-block recursion for the
// non-crossing moment-cumulant formula; agrees with the NC(r) sum, which the
// *_nc variants compute directly).
template <class T>
MomentSequence<T> cumulants_to_moments(const CumulantSequence<T>& kappa) {
  const int N = kappa.order();
  if (N < 1) throw std::domain_error("cumulants_to_moments: empty sequence");
  std::vector<T> m;
  for (int n = 1; n <= N; ++n) {
    auto P = detail::moment_series_powers(m, n - 1, n);
    T mn(0);
    for (int s = 1; s <= n; ++s) mn += kappa.k[s - 1] * P[s][n - s];
    m.push_back(mn);
  }
  return MomentSequence<T>{std::move(m)};
}

template <class T>
CumulantSequence<T> moments_to_cumulants(const MomentSequence<T>& mom) {
  const int N = mom.order();
  if (N < 1) throw std::domain_error("moments_to_cumulants: empty sequence");
  std::vector<T> k;
  auto P = detail::moment_series_powers(mom.m, N, N);
  for (int n = 1; n <= N; ++n) {
    T kn = mom.m[n - 1];
    for (int s = 1; s < n; ++s) kn -= k[s - 1] * P[s][n - s];
    k.push_back(kn);
  }
  return CumulantSequence<T>{std::move(k)};
}

// Reference implementations summing over NC(r) directly.
template <class T>
CumulantSequence<T> moments_to_cumulants_nc(const MomentSequence<T>& mom, int r_max = kDefaultRMax) {
  const int N = mom.order();
  if (N < 1) throw std::domain_error("moments_to_cumulants: empty sequence");
  std::vector<T> k;
  for (int r = 1; r <= N; ++r) {
    T acc(0);
    for (const auto& pi : nc::enumerate_nc(r, r_max)) {
      T term = scalar_from_int<T>(nc::moebius_to_top(pi));
      for (const auto& b : pi.blocks) term *= mom.moment(static_cast<int>(b.size()));
      acc += term;
    }
    k.push_back(acc);
  }
  return CumulantSequence<T>{std::move(k)};
}

template <class T>
MomentSequence<T> cumulants_to_moments_nc(const CumulantSequence<T>& kappa, int r_max = kDefaultRMax) {
  const int N = kappa.order();
  if (N < 1) throw std::domain_error("cumulants_to_moments: empty sequence");
  std::vector<T> m;
  for (int r = 1; r <= N; ++r) {
    T acc(0);
    for (const auto& pi : nc::enumerate_nc(r, r_max)) {
      T term(1);
      for (const auto& b : pi.blocks) term *= kappa.cumulant(static_cast<int>(b.size()));
      acc += term;
    }
    m.push_back(acc);
  }
  return MomentSequence<T>{std::move(m)};
}

// A finite family of free self-adjoint letters, one cumulant sequence per
// label 1..n.  Mixed cumulants across labels vanish by freeness, so none are
// stored.  Carries a word-trace cache shared by Gram computations.
template <class T>
class FreeFamily {
 public:
  FreeFamily(std::vector<CumulantSequence<T>> letters, bool identically_distributed)
      : letters_(std::move(letters)), iid_(identically_distributed) {
    if (letters_.empty()) throw std::domain_error("FreeFamily: no letters");
  }

  // n identical copies of kappa.
  static FreeFamily iid(const CumulantSequence<T>& kappa, int n) {
    return FreeFamily(std::vector<CumulantSequence<T>>(n, kappa), true);
  }

  int size() const { return static_cast<int>(letters_.size()); }
  bool identically_distributed() const { return iid_; }
  const CumulantSequence<T>& cumulants(int label) const {
    if (label < 1 || label > size()) throw std::domain_error("FreeFamily: unknown label");
    return letters_[label - 1];
  }

  // tau(x_{i_1} ... x_{i_r}) via the vanishing-mixed-cumulant formula:
  // sum over pi in NC(r) with label-constant blocks of prod kappa_{|V|}.
  T mixed_moment(const std::vector<int>& word, int r_max = kDefaultRMax) const {
    const int r = static_cast<int>(word.size());
    if (r == 0) return T(1);
    if (r > r_max)
      throw ResourceError("mixed_moment: word length " + std::to_string(r) +
                          " exceeds cap " + std::to_string(r_max));
    for (int label : word) (void)cumulants(label);
    auto it = cache_.find(word);
    if (it != cache_.end()) return it->second;
    T acc(0);
    for (const auto& pi : nc::enumerate_nc(r, r_max)) {
      T term(1);
      bool ok = true;
      for (const auto& b : pi.blocks) {
        const int label = word[b.front() - 1];
        for (int pos : b)
          if (word[pos - 1] != label) {
            ok = false;
            break;
          }
        if (!ok) break;
        term *= cumulants(label).cumulant(static_cast<int>(b.size()));
      }
      if (ok) acc += term;
    }
    cache_.emplace(word, acc);
    return acc;
  }

 private:
  std::vector<CumulantSequence<T>> letters_;
  bool iid_;
  mutable std::map<std::vector<int>, T> cache_;
};

template <class T>
T mixed_moment(const std::vector<int>& word, const FreeFamily<T>& family, int r_max = kDefaultRMax) {
  return family.mixed_moment(word, r_max);
}

// Cumulants of sum_{i in subset} x_i: free cumulants add.
template <class T>
CumulantSequence<T> sum_cumulants(const FreeFamily<T>& family, const std::vector<int>& subset) {
  if (subset.empty()) throw std::domain_error("sum_cumulants: empty subset");
  CumulantSequence<T> out = family.cumulants(subset.front());
  for (size_t i = 1; i < subset.size(); ++i) {
    const auto& k = family.cumulants(subset[i]);
    if (k.order() != out.order()) throw std::domain_error("sum_cumulants: mismatched orders");
    for (int r = 0; r < out.order(); ++r) out.k[r] += k.k[r];
  }
  return out;
}

// Hankel positive-semidefiniteness test [m_{i+j}], i,j = 0..floor(N/2).
// Evaluated in double with a relative eigenvalue tolerance.
bool hankel_psd(const std::vector<double>& m, double tol = 1e-9);

template <class T>
bool hankel_psd_seq(const MomentSequence<T>& mom, double tol = 1e-9) {
  std::vector<double> m(mom.m.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = to_double(mom.m[i]);
  return hankel_psd(m, tol);
}

// Named base distributions as cumulant sequences of order N.
template <class T>
CumulantSequence<T> semicircular_cumulants(const T& mean, const T& variance, int N) {
  std::vector<T> k(N, T(0));
  if (N >= 1) k[0] = mean;
  if (N >= 2) k[1] = variance;
  return CumulantSequence<T>{std::move(k)};
}

template <class T>
CumulantSequence<T> bernoulli_cumulants(int N) {
  // symmetric Bernoulli (delta_{-1} + delta_{+1})/2: m_r = 1 for even r
  std::vector<T> m(N);
  for (int r = 1; r <= N; ++r) m[r - 1] = (r % 2 == 0) ? T(1) : T(0);
  return moments_to_cumulants(MomentSequence<T>{std::move(m)});
}

template <class T>
MomentSequence<T> uniform_moments(const T& a, const T& b, int N) {
  if (!(a < b)) throw std::domain_error("uniform_moments: need a < b");
  std::vector<T> m(N);
  T pa = a, pb = b;  // a^{r+1}, b^{r+1}
  for (int r = 1; r <= N; ++r) {
    pa *= a;
    pb *= b;
    m[r - 1] = (pb - pa) / (scalar_from_int<T>(r + 1) * (b - a));
  }
  return MomentSequence<T>{std::move(m)};
}

template <class T>
CumulantSequence<T> uniform_cumulants(const T& a, const T& b, int N) {
  return moments_to_cumulants(uniform_moments(a, b, N));
}

template <class T>
CumulantSequence<T> point_mass_cumulants(const T& a, int N) {
  std::vector<T> k(N, T(0));
  if (N >= 1) k[0] = a;
  return CumulantSequence<T>{std::move(k)};
}

}  // namespace freeprob::moments
