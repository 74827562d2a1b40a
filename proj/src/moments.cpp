#include "freeprob/moments.hpp"

#include <Eigen/Dense>

namespace freeprob::moments {

bool hankel_psd(const std::vector<double>& m, double tol) {
  const int N = static_cast<int>(m.size());
  const int h = N / 2 + 1;  // indices 0..floor(N/2)
  auto moment = [&](int r) { return r == 0 ? 1.0 : m[r - 1]; };
  Eigen::MatrixXd H(h, h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) H(i, j) = moment(i + j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const double scale = std::max(1.0, H.trace());
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

}  // namespace freeprob::moments
