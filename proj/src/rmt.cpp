#include "freeprob/rmt.hpp"

#include <cmath>
#include <map>
#include <random>

#include <Eigen/Dense>

#include "freeprob/maxcorr.hpp"

namespace freeprob::rmt {

namespace {

// Documented stream split: one splitmix64 walk per (seed, trial, label), so
// parallel and serial trial orders agree.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_rng(std::uint64_t seed, int trial, int label) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ (0x100000001ULL * static_cast<std::uint64_t>(trial + 1)));
  s = splitmix64(s ^ (0x200000003ULL * static_cast<std::uint64_t>(label + 1)));
  return std::mt19937_64(s);
}

// Haar orthogonal via QR of a Gaussian matrix with the R-diagonal sign fix.
Eigen::MatrixXd haar_orthogonal(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd G(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) G(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd d = qr.matrixQR().diagonal();
  for (int j = 0; j < N; ++j)
    if (d(j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

Eigen::MatrixXd rotated_diagonal(int N, const QuantileFn& q, std::mt19937_64& rng) {
  Eigen::VectorXd diag(N);
  for (int k = 0; k < N; ++k) diag(k) = q((k + 0.5) / N);
  Eigen::MatrixXd U = haar_orthogonal(N, rng);
  return U * diag.asDiagonal() * U.transpose();
}

struct Trie {
  // child letter -> index of child node; terminal word indices per next letter
  std::map<int, Trie> children;
  std::vector<std::pair<int, int>> terminals;  // (last letter, word index)
};

void insert_word(Trie& root, const std::vector<int>& w, int idx) {
  Trie* node = &root;
  for (size_t i = 0; i + 1 < w.size(); ++i) node = &node->children[w[i]];
  node->terminals.emplace_back(w.back(), idx);
}

// tr(P * X_l) with X_l symmetric.
double trace_with(const Eigen::MatrixXd& P, const Eigen::MatrixXd& X) {
  return P.cwiseProduct(X).sum();
}

void dfs(const Trie& node, const Eigen::MatrixXd* prefix,
         const std::vector<Eigen::MatrixXd>& X, std::vector<double>& traces) {
  for (auto& [last, idx] : node.terminals) {
    if (prefix)
      traces[idx] = trace_with(*prefix, X[last]);
    else
      traces[idx] = X[last].trace();
  }
  for (auto& [letter, child] : node.children) {
    Eigen::MatrixXd next = prefix ? Eigen::MatrixXd(*prefix * X[letter]) : X[letter];
    dfs(child, &next, X, traces);
  }
}

}  // namespace

QuantileFn quantile_of(const transforms::Measure& mu) {
  if (const auto* a = std::get_if<transforms::Atomic>(&mu)) {
    auto atoms = a->atoms;
    std::sort(atoms.begin(), atoms.end());
    return [atoms](double u) {
      double acc = 0.0;
      for (auto& [t, w] : atoms) {
        acc += w;
        if (u <= acc) return t;
      }
      return atoms.back().first;
    };
  }
  if (const auto* g = std::get_if<transforms::GridDensity>(&mu)) {
    transforms::GridDensity d = *g;
    return [d](double u) {
      double acc = 0.0;
      const double h = d.h();
      for (size_t i = 0; i < d.rho.size(); ++i) {
        const double cell = d.rho[i] * h;
        if (acc + cell >= u && cell > 0)
          return d.a + (static_cast<double>(i) + (u - acc) / cell) * h;
        acc += cell;
      }
      return d.b;
    };
  }
  const auto s = std::get<transforms::Semicircular>(mu);
  return [s](double u) {
    // invert the semicircle CDF by bisection
    const double rad = 2.0 * std::sqrt(s.variance);
    auto cdf = [&](double x) {
      const double y = x / rad;
      return 0.5 + (y * std::sqrt(1.0 - y * y) + std::asin(y)) / M_PI;
    };
    double lo = -rad, hi = rad;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < u ? lo : hi) = mid;
    }
    return s.mean + 0.5 * (lo + hi);
  };
}

std::vector<WordEstimate> estimate_mixed_moments(const std::vector<std::vector<int>>& words,
                                                 const std::vector<QuantileFn>& letters,
                                                 const EnsembleSpec& spec) {
  if (spec.N < 2 || spec.T < 1) throw std::domain_error("estimate_mixed_moments: bad spec");
  if (letters.size() > 6) throw ResourceError("estimate_mixed_moments: more than 6 labels");
  Trie trie;
  for (size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (w.empty() || w.size() > 12)
      throw ResourceError("estimate_mixed_moments: word length outside 1..12");
    for (int l : w)
      if (l < 1 || l > static_cast<int>(letters.size()))
        throw std::domain_error("estimate_mixed_moments: unknown label");
    insert_word(trie, w, static_cast<int>(i));
  }

  std::vector<std::vector<double>> samples(words.size(), std::vector<double>(spec.T));
  for (int trial = 0; trial < spec.T; ++trial) {
    std::vector<Eigen::MatrixXd> X(letters.size() + 1);
    for (size_t l = 0; l < letters.size(); ++l) {
      auto rng = stream_rng(spec.seed, trial, static_cast<int>(l));
      X[l + 1] = rotated_diagonal(spec.N, letters[l], rng);
    }
    std::vector<double> traces(words.size(), 0.0);
    dfs(trie, nullptr, X, traces);
    for (size_t i = 0; i < words.size(); ++i) samples[i][trial] = traces[i] / spec.N;
  }

  std::vector<WordEstimate> out(words.size());
  for (size_t i = 0; i < words.size(); ++i) {
    out[i].word = words[i];
    double mean = 0.0;
    for (double v : samples[i]) mean += v;
    mean /= spec.T;
    out[i].mean = mean;
    // two-pass variance: near-deterministic words would cancel catastrophically
    // in the sum-of-squares form
    double ss = 0.0;
    for (double v : samples[i]) ss += (v - mean) * (v - mean);
    out[i].stderr_ = spec.T > 1 ? std::sqrt(ss / (spec.T - 1) / spec.T) : 0.0;
  }
  return out;
}

WordEstimate estimate_mixed_moment(const std::vector<int>& word, const QuantileFn& letter,
                                   const EnsembleSpec& spec) {
  int max_label = 1;
  for (int l : word) max_label = std::max(max_label, l);
  std::vector<QuantileFn> letters(max_label, letter);
  return estimate_mixed_moments({word}, letters, spec)[0];
}

double empirical_max_correlation(int m, int n, int D, const QuantileFn& letter,
                                 const EnsembleSpec& spec) {
  if (m < 1 || n < m) throw std::domain_error("empirical_max_correlation: need 1 <= m <= n");
  // averaged normalized traces of S_n^i, S_m^i and S_n^i S_m^j
  std::vector<double> mom_n(2 * D + 1, 0.0), mom_m(2 * D + 1, 0.0);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(D + 1, D + 1);
  for (int trial = 0; trial < spec.T; ++trial) {
    Eigen::MatrixXd Sn = Eigen::MatrixXd::Zero(spec.N, spec.N);
    Eigen::MatrixXd Sm = Eigen::MatrixXd::Zero(spec.N, spec.N);
    for (int l = 0; l < n; ++l) {
      auto rng = stream_rng(spec.seed, trial, l);
      Eigen::MatrixXd X = rotated_diagonal(spec.N, letter, rng);
      Sn += X;
      if (l < m) Sm += X;
    }
    std::vector<Eigen::MatrixXd> pn(D + 1), pm(D + 1);
    pn[0] = pm[0] = Eigen::MatrixXd::Identity(spec.N, spec.N);
    for (int i = 1; i <= D; ++i) {
      pn[i] = pn[i - 1] * Sn;
      pm[i] = pm[i - 1] * Sm;
    }
    for (int r = 1; r <= 2 * D; ++r) {
      mom_n[r] += (r <= D ? pn[r].trace() : trace_with(pn[D], pn[r - D])) / spec.N;
      mom_m[r] += (r <= D ? pm[r].trace() : trace_with(pm[D], pm[r - D])) / spec.N;
    }
    for (int i = 1; i <= D; ++i)
      for (int j = 1; j <= D; ++j) cross(i, j) += trace_with(pn[i], pm[j]) / spec.N;
  }
  for (auto& v : mom_n) v /= spec.T;
  for (auto& v : mom_m) v /= spec.T;
  cross /= spec.T;
  mom_n[0] = mom_m[0] = 1.0;

  Eigen::MatrixXd A(D, D), B(D, D), C(D, D);
  for (int i = 1; i <= D; ++i)
    for (int j = 1; j <= D; ++j) {
      A(i - 1, j - 1) = mom_n[i + j] - mom_n[i] * mom_n[j];
      B(i - 1, j - 1) = mom_m[i + j] - mom_m[i] * mom_m[j];
      C(i - 1, j - 1) = cross(i, j) - mom_n[i] * mom_m[j];
    }
  return maxcorr::cca_rho(A, B, C, 1e-10);
}

}  // namespace freeprob::rmt
