#include "analysis/chirp_fit.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include <Eigen/Cholesky>

#include "core/errors.hpp"
#include "core/units.hpp"

namespace spm {

namespace {

double wrap_pi(double a) {
  while (a > std::numbers::pi) a -= units::kTwoPi;
  while (a < -std::numbers::pi) a += units::kTwoPi;
  return a;
}

}  // namespace

ChirpFit fit_chirp(const Jsa& jsa, double amplitude_floor) {
  const int n1 = jsa.grid1().n_bins();
  const int n2 = jsa.grid2().n_bins();
  const Eigen::ArrayXXd mag = jsa.f().cwiseAbs().array();
  const double peak = mag.maxCoeff();
  if (!(peak > 0.0)) throw NumericError("fit_chirp: zero JSA");
  const double floor = amplitude_floor * peak;

  Eigen::ArrayXXd phase = Eigen::ArrayXXd::Zero(n1, n2);
  std::vector<char> accepted(static_cast<std::size_t>(n1) * n2, 0);
  std::vector<char> visited(accepted.size(), 0);
  auto idx = [n2](int i, int j) { return static_cast<std::size_t>(i) * n2 + j; };
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if (mag(i, j) >= floor) accepted[idx(i, j)] = 1;

  // Quality-guided unwrap: grow from the peak bin, always extending the
  // highest-amplitude frontier bin next.
  struct Node {
    double quality;
    int i, j;
    bool operator<(const Node& o) const { return quality < o.quality; }
  };
  Eigen::Index pi_, pj_;
  mag.maxCoeff(&pi_, &pj_);
  const int pi0 = static_cast<int>(pi_), pj0 = static_cast<int>(pj_);
  phase(pi0, pj0) = std::arg(jsa.f()(pi0, pj0));
  visited[idx(pi0, pj0)] = 1;
  std::priority_queue<Node> frontier;
  frontier.push({mag(pi0, pj0), pi0, pj0});
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  int n_accepted = 0;
  while (!frontier.empty()) {
    const Node node = frontier.top();
    frontier.pop();
    ++n_accepted;
    for (int d = 0; d < 4; ++d) {
      const int i = node.i + di[d], j = node.j + dj[d];
      if (i < 0 || i >= n1 || j < 0 || j >= n2) continue;
      if (!accepted[idx(i, j)] || visited[idx(i, j)]) continue;
      visited[idx(i, j)] = 1;
      const double raw = std::arg(jsa.f()(i, j));
      phase(i, j) = phase(node.i, node.j) + wrap_pi(raw - phase(node.i, node.j));
      frontier.push({mag(i, j), i, j});
    }
  }
  if (n_accepted < 6)
    throw NumericError("fit_chirp: too few bins above the amplitude floor");

  // Consistency check: between accepted, visited neighbours the unwrapped
  // difference must equal the wrapped raw difference (no 2*pi residues).
  long pairs = 0, bad = 0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      if (!visited[idx(i, j)]) continue;
      if (i + 1 < n1 && visited[idx(i + 1, j)]) {
        ++pairs;
        const double d = phase(i + 1, j) - phase(i, j);
        if (std::abs(d - wrap_pi(d)) > std::numbers::pi) ++bad;
      }
      if (j + 1 < n2 && visited[idx(i, j + 1)]) {
        ++pairs;
        const double d = phase(i, j + 1) - phase(i, j);
        if (std::abs(d - wrap_pi(d)) > std::numbers::pi) ++bad;
      }
    }
  if (pairs > 0 && static_cast<double>(bad) / pairs > 0.02)
    throw NumericError(
        "fit_chirp: phase unwrapping is inconsistent on the accepted support");

  const Eigen::ArrayXd w1 = jsa.grid1().detunings();
  const Eigen::ArrayXd w2 = jsa.grid2().detunings();
  Eigen::Matrix<double, 6, 6> ata = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> atb = Eigen::Matrix<double, 6, 1>::Zero();
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      if (!visited[idx(i, j)]) continue;
      const double wgt = mag(i, j) * mag(i, j);
      Eigen::Matrix<double, 6, 1> row;
      row << 1.0, w1(i), w2(j), w1(i) * w1(i), w2(j) * w2(j), w1(i) * w2(j);
      ata += wgt * row * row.transpose();
      atb += wgt * phase(i, j) * row;
    }
  const Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt(ata);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("fit_chirp: normal equations are singular");
  const Eigen::Matrix<double, 6, 1> coef = ldlt.solve(atb);

  double rss = 0.0, wsum = 0.0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      if (!visited[idx(i, j)]) continue;
      const double wgt = mag(i, j) * mag(i, j);
      Eigen::Matrix<double, 6, 1> row;
      row << 1.0, w1(i), w2(j), w1(i) * w1(i), w2(j) * w2(j), w1(i) * w2(j);
      const double r = phase(i, j) - row.dot(coef);
      rss += wgt * r * r;
      wsum += wgt;
    }

  ChirpFit fit;
  fit.coefficients = coef.array();
  fit.beta_fs2 = -coef(5);
  fit.n_accepted = n_accepted;
  fit.rms_residual_rad = wsum > 0.0 ? std::sqrt(rss / wsum) : 0.0;
  const double dof = std::max(1.0, static_cast<double>(n_accepted - 6));
  const double sigma2 = rss / dof;
  const Eigen::Matrix<double, 6, 6> cov =
      sigma2 * ldlt.solve(Eigen::Matrix<double, 6, 6>::Identity());
  fit.beta_stderr_fs2 = std::sqrt(std::max(cov(5, 5), 0.0));
  return fit;
}

}  // namespace spm
