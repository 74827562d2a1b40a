#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "freeprob/moments.hpp"

namespace freeprob::algebra {

// A word in the free self-adjoint letters; empty word = unit.
using Word = std::vector<int>;

// Graded lexicographic order: by length, then lexicographically.
struct GradedLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

// Formal linear combination of words; zero coefficients are never stored.
template <class T>
class Polynomial {
 public:
  using TermMap = std::map<Word, T, GradedLex>;

  Polynomial() = default;

  static Polynomial unit() { return constant(T(1)); }
  static Polynomial constant(const T& c) {
    Polynomial p;
    if (!is_zero(c)) p.terms_[Word{}] = c;
    return p;
  }
  static Polynomial letter(int label) {
    Polynomial p;
    p.terms_[Word{label}] = T(1);
    return p;
  }
  static Polynomial monomial(Word w, const T& c = T(1)) {
    Polynomial p;
    if (!is_zero(c)) p.terms_[std::move(w)] = c;
    return p;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero_poly() const { return terms_.empty(); }
  int degree() const { return terms_.empty() ? 0 : static_cast<int>(terms_.rbegin()->first.size()); }

  T coeff(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? T(0) : it->second;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const T& s, const Polynomial& p) {
    Polynomial out;
    if (is_zero(s)) return out;
    for (const auto& [w, c] : p.terms_) out.terms_[w] = s * c;
    return out;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) {
        Word w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        out.add_term(w, ca * cb);
      }
    return out;
  }

  // p*: reverse each word (letters are self-adjoint, coefficients real).
  Polynomial adjoint() const {
    Polynomial out;
    for (const auto& [w, c] : terms_) {
      Word rw(w.rbegin(), w.rend());
      out.terms_[std::move(rw)] = c;
    }
    return out;
  }

  Polynomial pow(int e) const {
    Polynomial out = unit();
    for (int i = 0; i < e; ++i) out = out * (*this);
    return out;
  }

  // Relabel letters via perm[label].
  Polynomial relabel(const std::vector<int>& perm) const {
    Polynomial out;
    for (const auto& [w, c] : terms_) {
      Word nw;
      nw.reserve(w.size());
      for (int l : w) nw.push_back(perm[l]);
      out.add_term(nw, c);
    }
    return out;
  }

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

  void add_term(const Word& w, const T& c) {
    if (is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (is_zero(it->second)) terms_.erase(it);
    }
  }

 private:
  TermMap terms_;
};

// s_k = x_1 + ... + x_k.
template <class T>
Polynomial<T> expand_sum(int k) {
  if (k < 1) throw std::domain_error("expand_sum: k must be positive");
  Polynomial<T> p;
  for (int i = 1; i <= k; ++i) p += Polynomial<T>::letter(i);
  return p;
}

// Linear extension of the mixed-moment functional.
template <class T>
T trace(const Polynomial<T>& p, const moments::FreeFamily<T>& family, int r_max = kDefaultRMax) {
  T acc(0);
  for (const auto& [w, c] : p.terms()) acc += c * family.mixed_moment(w, r_max);
  return acc;
}

template <class T>
T inner_product(const Polynomial<T>& p, const Polynomial<T>& q,
                const moments::FreeFamily<T>& family, int r_max = kDefaultRMax) {
  return trace(p.adjoint() * q, family, r_max);
}

template <class T>
T norm2_sq(const Polynomial<T>& p, const moments::FreeFamily<T>& family, int r_max = kDefaultRMax) {
  return inner_product(p, p, family, r_max);
}

template <class T>
Polynomial<T> center(const Polynomial<T>& p, const moments::FreeFamily<T>& family,
                     int r_max = kDefaultRMax) {
  return p - Polynomial<T>::constant(trace(p, family, r_max));
}

template <class T>
T covariance(const Polynomial<T>& p, const Polynomial<T>& q,
             const moments::FreeFamily<T>& family, int r_max = kDefaultRMax) {
  return inner_product(center(p, family, r_max), center(q, family, r_max), family, r_max);
}

// Centered monomials of degree 1..D in the given letters, graded-lex order.
template <class T>
std::vector<Polynomial<T>> monomial_basis(const std::vector<int>& letters, int D,
                                          const moments::FreeFamily<T>& family,
                                          int r_max = kDefaultRMax) {
  if (D < 1) throw std::domain_error("monomial_basis: D must be >= 1");
  std::vector<Polynomial<T>> out;
  std::vector<Word> level{Word{}};
  for (int d = 1; d <= D; ++d) {
    std::vector<Word> next;
    for (const auto& w : level)
      for (int l : letters) {
        Word nw = w;
        nw.push_back(l);
        next.push_back(std::move(nw));
      }
    for (const auto& w : next) out.push_back(center(Polynomial<T>::monomial(w), family, r_max));
    level = std::move(next);
  }
  return out;
}

// Centered powers s_k^1..s_k^D.
template <class T>
std::vector<Polynomial<T>> sum_power_basis(int k, int D, const moments::FreeFamily<T>& family,
                                           int r_max = kDefaultRMax) {
  if (D < 1) throw std::domain_error("sum_power_basis: D must be >= 1");
  std::vector<Polynomial<T>> out;
  Polynomial<T> s = expand_sum<T>(k), pw = Polynomial<T>::unit();
  for (int d = 1; d <= D; ++d) {
    pw = pw * s;
    out.push_back(center(pw, family, r_max));
  }
  return out;
}

}  // namespace freeprob::algebra
