#include "recon/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <thread>
#include <vector>

#include "core/errors.hpp"
#include "core/units.hpp"

namespace spm {

namespace {

using cplx = std::complex<double>;

double wrap_pi(double a) {
  while (a > std::numbers::pi) a -= units::kTwoPi;
  while (a < -std::numbers::pi) a += units::kTwoPi;
  return a;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct SliceOutcome {
  Eigen::ArrayXcd column;
  double weight = 0.0;
  double purity = 1.0;
  double hermiticity = 0.0;
  double masked = 0.0;
  double clipped = 0.0;
};

SliceOutcome estimate_one_slice(const Interferogram& slice,
                                const SpectralMode& reference,
                                const ReconstructionSettings& settings) {
  SliceOutcome out;
  const int n = reference.grid().n_bins();
  out.column = Eigen::ArrayXcd::Zero(n);
  if (!(slice.total() > 0.0)) return out;

  const Jsa gamma = fourier_filter(slice, settings.filter);
  if (!(gamma.f().cwiseAbs().maxCoeff() > 0.0)) return out;

  ModeEstimate est;
  try {
    est = remove_reference(gamma, reference, settings.tau_fs,
                           settings.division_threshold);
  } catch (const NumericError&) {
    // A noise-dominated slice can spread its apparent support past the
    // reference; drop the slice instead of failing the whole dataset.
    out.masked = 1.0;
    return out;
  }
  out.hermiticity = est.hermiticity_residual;
  out.masked = est.masked_fraction;
  if (!(est.phi.norm() > 0.0)) return out;

  const ModeDecomposition dec = extract_modes(est, 1);
  out.purity = dec.purity;
  out.clipped = dec.clipped_weight;

  const double dw = reference.grid().spacing();
  const Eigen::VectorXcd m = dec.modes[0].amp().matrix();
  const double scale =
      std::real(m.dot(est.phi * m)) * dw * dw;  // dominant eigenvalue
  if (!(scale > 0.0)) return out;
  out.weight = scale;
  out.column = std::sqrt(scale) * dec.modes[0].amp();
  return out;
}

}  // namespace

StitchResult assemble_jsa(const Jsa& columns, const Jsa& rows,
                          double support_threshold) {
  if (!(columns.grid1() == rows.grid1()) || !(columns.grid2() == rows.grid2()))
    throw ConfigError("assemble_jsa: the two estimates use different grids");
  const int n1 = columns.grid1().n_bins();
  const int n2 = columns.grid2().n_bins();
  const Eigen::MatrixXcd& A = columns.f();
  const Eigen::MatrixXcd& B = rows.f();

  Eigen::ArrayXXd w = (A.cwiseAbs().array() * B.cwiseAbs().array());
  const double w_max = w.maxCoeff();
  if (!(w_max > 0.0))
    throw NumericError("assemble_jsa: the two estimates share no support");
  const double w_cut = support_threshold * w_max;
  w = (w >= w_cut).select(w, 0.0);

  // Rows i and columns j joined through every supported bin.
  UnionFind uf(n1 + n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      if (w(i, j) > 0.0) uf.unite(i, n1 + j);

  std::vector<int> comp_of_col(n2, -1), comp_of_row(n1, -1), roots;
  auto comp_index = [&](int node) {
    const int r = uf.find(node);
    for (std::size_t c = 0; c < roots.size(); ++c)
      if (roots[c] == r) return static_cast<int>(c);
    roots.push_back(r);
    return static_cast<int>(roots.size()) - 1;
  };
  for (int i = 0; i < n1; ++i)
    if ((w.row(i) > 0.0).any()) comp_of_row[i] = comp_index(i);
  for (int j = 0; j < n2; ++j)
    if ((w.col(j) > 0.0).any()) comp_of_col[j] = comp_index(n1 + j);

  Eigen::ArrayXd theta = Eigen::ArrayXd::Zero(n2);  // applied to A columns
  Eigen::ArrayXd phi = Eigen::ArrayXd::Zero(n1);    // applied to B rows

  constexpr int kMaxIterations = 2000;
  constexpr double kTol = 1e-8;
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    double delta = 0.0;
    for (int i = 0; i < n1; ++i) {
      if (comp_of_row[i] < 0) continue;
      cplx acc = 0.0;
      for (int j = 0; j < n2; ++j)
        if (w(i, j) > 0.0)
          acc += w(i, j) * std::exp(cplx(0.0, theta(j))) * A(i, j) *
                 std::conj(B(i, j));
      if (std::abs(acc) > 0.0) {
        const double next = std::arg(acc);
        delta = std::max(delta, std::abs(wrap_pi(next - phi(i))));
        phi(i) = next;
      }
    }
    for (int j = 0; j < n2; ++j) {
      if (comp_of_col[j] < 0) continue;
      cplx acc = 0.0;
      for (int i = 0; i < n1; ++i)
        if (w(i, j) > 0.0)
          acc += w(i, j) * std::exp(cplx(0.0, phi(i))) * B(i, j) *
                 std::conj(A(i, j));
      if (std::abs(acc) > 0.0) {
        const double next = std::arg(acc);
        delta = std::max(delta, std::abs(wrap_pi(next - theta(j))));
        theta(j) = next;
      }
    }
    if (delta < kTol) break;
  }

  // Gauge per component: the first supported column carries zero correction.
  std::vector<double> gauge(roots.size(), 0.0);
  std::vector<bool> gauge_set(roots.size(), false);
  for (int j = 0; j < n2; ++j)
    if (comp_of_col[j] >= 0 && !gauge_set[comp_of_col[j]]) {
      gauge[comp_of_col[j]] = theta(j);
      gauge_set[comp_of_col[j]] = true;
    }
  for (int j = 0; j < n2; ++j)
    if (comp_of_col[j] >= 0) theta(j) = wrap_pi(theta(j) - gauge[comp_of_col[j]]);
  for (int i = 0; i < n1; ++i)
    if (comp_of_row[i] >= 0) phi(i) = wrap_pi(phi(i) - gauge[comp_of_row[i]]);

  Eigen::MatrixXcd f(n1, n2);
  double res_num = 0.0, res_den = 0.0, amp_num = 0.0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const cplx pa = std::exp(cplx(0.0, theta(j))) * A(i, j);
      const cplx pb = std::exp(cplx(0.0, phi(i))) * B(i, j);
      const double amp = std::sqrt(std::abs(A(i, j)) * std::abs(B(i, j)));
      const cplx sum = pa + pb;
      f(i, j) = (std::abs(sum) > 0.0)
                    ? amp * sum / std::abs(sum)
                    : cplx(amp, 0.0);
      if (w(i, j) > 0.0) {
        const double mism = wrap_pi(std::arg(pa * std::conj(pb)));
        res_num += w(i, j) * mism * mism;
        res_den += w(i, j);
        const double da = std::abs(A(i, j)) - std::abs(B(i, j));
        amp_num += w(i, j) * da * da;
      }
    }

  StitchResult result;
  result.iterations = it;
  result.n_components = static_cast<int>(roots.size());
  result.underdetermined = roots.size() > 1;
  result.residual = res_den > 0.0 ? std::sqrt(res_num / res_den) : 0.0;
  result.amplitude_discrepancy =
      res_den > 0.0 ? std::sqrt(amp_num / res_den) : 0.0;
  result.jsa = Jsa(columns.grid1(), columns.grid2(), std::move(f))
                   .normalized()
                   .with_canonical_phase();
  return result;
}

Jsa estimate_slices(const Interferogram& heralded, const SpectralMode& reference,
                    const ReconstructionSettings& settings,
                    ReconstructionReport* report) {
  if (!heralded.has_herald_axis())
    throw ConfigError("estimate_slices: histogram lacks a herald axis");
  if (!(heralded.grid1() == reference.grid()) ||
      !(heralded.grid2() == reference.grid()))
    throw ConfigError("estimate_slices: signal grids must match the reference");

  const int n = reference.grid().n_bins();
  const int nh = heralded.n_planes();
  std::vector<SliceOutcome> outcomes(nh);

  auto work = [&](int begin, int end) {
    for (int j = begin; j < end; ++j)
      outcomes[j] = estimate_one_slice(heralded.herald_slice(j), reference,
                                       settings);
  };
  const int n_threads = std::clamp(settings.threads, 1, nh);
  if (n_threads <= 1) {
    work(0, nh);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (nh + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back(work, t * chunk, std::min(nh, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }

  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(n, nh);
  double wsum = 0.0, purity_acc = 0.0;
  ReconstructionReport rep;
  for (int j = 0; j < nh; ++j) {
    f.col(j) = outcomes[j].column.matrix();
    wsum += outcomes[j].weight;
    purity_acc += outcomes[j].weight * outcomes[j].purity;
    rep.hermiticity_residual =
        std::max(rep.hermiticity_residual, outcomes[j].hermiticity);
    rep.masked_fraction = std::max(rep.masked_fraction, outcomes[j].masked);
    rep.clipped_weight = std::max(rep.clipped_weight, outcomes[j].clipped);
  }
  if (!(wsum > 0.0))
    throw NumericError("estimate_slices: every herald slice is empty");
  rep.mean_purity = purity_acc / wsum;
  if (report) *report = rep;
  return Jsa(reference.grid(), heralded.herald_grid(), std::move(f));
}

StitchResult reconstruct_heralded(const Interferogram& histogram_a,
                                  const Interferogram& histogram_b,
                                  const SpectralMode& reference,
                                  const ReconstructionSettings& settings,
                                  ReconstructionReport* report) {
  ReconstructionReport rep_a, rep_b;
  const Jsa columns = estimate_slices(histogram_a, reference, settings, &rep_a);
  const Jsa rows_t = estimate_slices(histogram_b, reference, settings, &rep_b);
  // histogram_b heralds on the other photon, so its slice matrix is the
  // transpose of the JSA (per-column phases become per-row phases).
  const Jsa rows(rows_t.grid2(), rows_t.grid1(), rows_t.f().transpose());

  StitchResult result = assemble_jsa(columns, rows);
  if (report) {
    report->hermiticity_residual =
        std::max(rep_a.hermiticity_residual, rep_b.hermiticity_residual);
    report->masked_fraction =
        std::max(rep_a.masked_fraction, rep_b.masked_fraction);
    report->clipped_weight = std::max(rep_a.clipped_weight, rep_b.clipped_weight);
    report->mean_purity = 0.5 * (rep_a.mean_purity + rep_b.mean_purity);
    report->stitch_residual = result.residual;
    report->stitch_components = result.n_components;
    report->underdetermined = result.underdetermined;
  }
  return result;
}

StitchResult reconstruct_seeded(
    const std::vector<std::optional<Interferogram>>& per_seed,
    const FrequencyGrid& seed_grid, const SpectralMode& reference,
    const ReconstructionSettings& settings, const Jsa* rows,
    ReconstructionReport* report) {
  if (per_seed.empty() ||
      std::none_of(per_seed.begin(), per_seed.end(),
                   [](const auto& g) { return g.has_value(); }))
    throw ConfigError("reconstruct_seeded: no seed measurements provided");
  if (static_cast<int>(per_seed.size()) != seed_grid.n_bins())
    throw ConfigError("reconstruct_seeded: seed list does not match seed grid");

  const int n = reference.grid().n_bins();
  const int ns = seed_grid.n_bins();
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(n, ns);
  ReconstructionReport rep;
  double wsum = 0.0, purity_acc = 0.0;
  int n_filled = 0;
  for (int j = 0; j < ns; ++j) {
    if (!per_seed[j]) continue;
    const SliceOutcome out =
        estimate_one_slice(*per_seed[j], reference, settings);
    f.col(j) = out.column.matrix();
    wsum += out.weight;
    purity_acc += out.weight * out.purity;
    rep.hermiticity_residual =
        std::max(rep.hermiticity_residual, out.hermiticity);
    rep.masked_fraction = std::max(rep.masked_fraction, out.masked);
    rep.clipped_weight = std::max(rep.clipped_weight, out.clipped);
    if (out.weight > 0.0) ++n_filled;
  }
  if (!(wsum > 0.0))
    throw NumericError("reconstruct_seeded: every seed measurement is empty");
  rep.mean_purity = purity_acc / wsum;

  const Jsa columns(reference.grid(), seed_grid, std::move(f));
  StitchResult result;
  if (rows) {
    result = assemble_jsa(columns, *rows);
  } else {
    // Single seed axis: the phase between cross-sections is unobservable.
    // Give each column a canonical phase (largest element real positive).
    Eigen::MatrixXcd g = columns.f();
    for (int j = 0; j < ns; ++j) {
      Eigen::Index imax;
      if (g.col(j).cwiseAbs().maxCoeff(&imax) > 0.0)
        g.col(j) *= std::polar(1.0, -std::arg(g(imax, j)));
    }
    result.jsa = Jsa(reference.grid(), seed_grid, std::move(g))
                     .normalized()
                     .with_canonical_phase();
    result.n_components = n_filled;
    result.underdetermined = n_filled > 1;
  }
  rep.stitch_residual = result.residual;
  rep.stitch_components = result.n_components;
  rep.underdetermined = result.underdetermined;
  if (report) *report = rep;
  return result;
}

}  // namespace spm
