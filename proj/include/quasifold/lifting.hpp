#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "quasifold/affine.hpp"
#include "quasifold/alpha_witness.hpp"
#include "quasifold/bimodule.hpp"
#include "quasifold/error.hpp"
#include "quasifold/group.hpp"

namespace quasifold {

using RealVector = std::vector<double>;

struct Ball {
  RealVector center;
  double radius = 1.0;

  std::size_t dim() const noexcept { return center.size(); }

  bool contains(const RealVector& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
    return s < radius * radius;
  }
};

/// Samples of a map F: B → ℝⁿ, either all exact (QAlpha) or all numeric.
class SampledMap {
 public:
  using Callback = std::function<RealVector(const RealVector&)>;

  static SampledMap exact(Ball ball, std::vector<QVector> samples, std::vector<QVector> values,
                          const AlphaWitness& w = AlphaWitness::standard()) {
    SampledMap m;
    m.ball_ = std::move(ball);
    m.data_ = ExactData{std::move(samples), std::move(values)};
    m.validate(w);
    return m;
  }

  static SampledMap numeric(Ball ball, std::vector<RealVector> samples, std::vector<RealVector> values,
                            Callback callback = {}) {
    SampledMap m;
    m.ball_ = std::move(ball);
    m.data_ = NumericData{std::move(samples), std::move(values)};
    m.callback_ = std::move(callback);
    m.validate(AlphaWitness::standard());
    return m;
  }

  /// Samples `points` through the callback.
  static SampledMap from_function(Ball ball, std::vector<RealVector> points, Callback f) {
    std::vector<RealVector> values;
    for (const auto& p : points) values.push_back(f(p));
    return numeric(std::move(ball), std::move(points), std::move(values), std::move(f));
  }

  const Ball& ball() const noexcept { return ball_; }
  bool is_exact() const noexcept { return std::holds_alternative<ExactData>(data_); }
  std::size_t size() const {
    return is_exact() ? std::get<ExactData>(data_).samples.size() : std::get<NumericData>(data_).samples.size();
  }
  const std::vector<QVector>& exact_samples() const { return std::get<ExactData>(data_).samples; }
  const std::vector<QVector>& exact_values() const { return std::get<ExactData>(data_).values; }
  const std::vector<RealVector>& numeric_samples() const { return std::get<NumericData>(data_).samples; }
  const std::vector<RealVector>& numeric_values() const { return std::get<NumericData>(data_).values; }
  const Callback& callback() const noexcept { return callback_; }

  /// The same map on a subset of the samples.
  SampledMap restricted(const std::vector<std::size_t>& idx) const {
    SampledMap m;
    m.ball_ = ball_;
    m.callback_ = callback_;
    if (is_exact()) {
      ExactData d;
      for (auto i : idx) {
        d.samples.push_back(exact_samples().at(i));
        d.values.push_back(exact_values().at(i));
      }
      m.data_ = std::move(d);
    } else {
      NumericData d;
      for (auto i : idx) {
        d.samples.push_back(numeric_samples().at(i));
        d.values.push_back(numeric_values().at(i));
      }
      m.data_ = std::move(d);
    }
    return m;
  }

 private:
  struct ExactData {
    std::vector<QVector> samples, values;
  };
  struct NumericData {
    std::vector<RealVector> samples, values;
  };

  template <class D>
  void check_sizes(const D& d) const {
    if (d.samples.size() != d.values.size()) throw Error("invalid-samples", "sample and value counts differ");
    for (std::size_t i = 0; i < d.samples.size(); ++i)
      if (d.samples[i].size() != ball_.dim() || d.values[i].size() != ball_.dim())
        throw Error("dimension-mismatch", "sample " + std::to_string(i));
  }

  void validate(const AlphaWitness& w) const {
    if (ball_.dim() == 0 || !(ball_.radius > 0)) throw Error("invalid-samples", "degenerate ball");
    std::visit([&](const auto& d) { check_sizes(d); }, data_);
    for (std::size_t i = 0; i < size(); ++i) {
      RealVector x;
      if (is_exact())
        for (const auto& c : exact_samples()[i]) x.push_back(w.evaluate(c));
      else
        x = numeric_samples()[i];
      if (!ball_.contains(x)) throw Error("invalid-samples", "sample " + std::to_string(i) + " lies outside the ball");
    }
  }

  Ball ball_;
  std::variant<ExactData, NumericData> data_;
  Callback callback_;
};

inline RealVector to_real(const QVector& v, const AlphaWitness& w = AlphaWitness::standard()) {
  RealVector x;
  for (const auto& c : v) x.push_back(w.evaluate(c));
  return x;
}

/// γ·x evaluated numerically.
inline RealVector apply_numeric(const AffineElement& g, const RealVector& x, const AlphaWitness& w) {
  RealVector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = w.evaluate(g.shift()[i]);
    for (std::size_t j = 0; j < x.size(); ++j) s += g.linear()(i, j).to_double() * x[j];
    y[i] = s;
  }
  return y;
}

inline double max_norm_diff(const RealVector& a, const RealVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct AffinePiece {
  AffineElement gamma;
  std::vector<std::size_t> samples;
};

/// The decomposition B ⊇ ∪ Δ_γ, Δ_γ = {r | F(r) = γ·r}, on the samples.
struct AffinePieceReport {
  std::vector<AffinePiece> pieces;              // in enumeration order of γ
  std::vector<std::size_t> unmatched;           // "no-match-at-bound"
  std::vector<std::vector<std::size_t>> matches;  // per sample: indices into `candidates` of every match
  std::vector<AffineElement> candidates;        // enumerate(Γ, bound)
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double coverage = 0.0;
  std::size_t total = 0;
};

/// Assigns every sample to the first γ ∈ enumerate(Γ, bound) with
/// F(r) = γ·r (exact kind) or |F(r) − γ·r|∞ ≤ tol (numeric kind).
inline AffinePieceReport detect_pieces(const SampledMap& f, const GroupPresentation& group, int bound, double tol = 1e-9,
                                       const AlphaWitness& w = AlphaWitness::standard()) {
  if (tol < 0) throw Error("invalid-argument", "tolerance must be non-negative");
  if (group.dimension() != f.ball().dim()) throw Error("dimension-mismatch", "group and sampled map");
  AffinePieceReport rep;
  rep.candidates = group.enumerate(bound);
  rep.total = f.size();
  rep.matches.resize(f.size());
  std::vector<std::vector<std::size_t>> by_gamma(rep.candidates.size());
  std::vector<RealVector> gamma_real;
  double residual_sum = 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double best = -1.0;
    for (std::size_t k = 0; k < rep.candidates.size(); ++k) {
      const auto& g = rep.candidates[k];
      bool hit;
      double residual = 0.0;
      if (f.is_exact()) {
        hit = affine_apply(g, f.exact_samples()[i]) == f.exact_values()[i];
      } else {
        residual = max_norm_diff(apply_numeric(g, f.numeric_samples()[i], w), f.numeric_values()[i]);
        hit = residual <= tol;
      }
      if (!hit) continue;
      if (rep.matches[i].empty()) {
        by_gamma[k].push_back(i);
        best = residual;
      }
      rep.matches[i].push_back(k);
    }
    if (rep.matches[i].empty()) {
      rep.unmatched.push_back(i);
    } else {
      ++matched;
      residual_sum += best;
      rep.max_residual = std::max(rep.max_residual, best);
    }
  }
  for (std::size_t k = 0; k < by_gamma.size(); ++k)
    if (!by_gamma[k].empty()) rep.pieces.push_back({rep.candidates[k], std::move(by_gamma[k])});
  rep.coverage = f.size() ? static_cast<double>(matched) / static_cast<double>(f.size()) : 0.0;
  rep.mean_residual = matched ? residual_sum / static_cast<double>(matched) : 0.0;
  return rep;
}

/// Numeric affine map x ↦ Ax + b.
struct NumericAffine {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  RealVector operator()(const RealVector& x) const {
    Eigen::VectorXd v = A * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) + b;
    return {v.data(), v.data() + v.size()};
  }
};

struct AffineFit {
  NumericAffine map;
  double max_residual = 0.0;
  double second_derivative = 0.0;  // max |∂²F_k/∂x_i∂x_j| over the stencil centres
  bool second_derivative_checked = false;
  bool accepted = false;
};

/// Central second differences with a dyadic step; centres are snapped to a
/// dyadic grid so that r ± h is exact.
inline double second_derivative_norm(const SampledMap::Callback& f, const RealVector& centre) {
  constexpr double h = 0x1p-10;
  const std::size_t n = centre.size();
  RealVector c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = std::ldexp(std::round(std::ldexp(centre[i], 20)), -20);
  auto at = [&](int di, std::size_t i, int dj, std::size_t j) {
    RealVector x = c;
    x[i] += di * h;
    x[j] += dj * h;
    return f(x);
  };
  double m = 0.0;
  const RealVector f0 = f(c);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      RealVector d(f0.size());
      if (i == j) {
        auto p = at(1, i, 0, j), q = at(-1, i, 0, j);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = (p[k] - 2 * f0[k] + q[k]) / (h * h);
      } else {
        auto pp = at(1, i, 1, j), pm = at(1, i, -1, j), mp = at(-1, i, 1, j), mm = at(-1, i, -1, j);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = (pp[k] - pm[k] - mp[k] + mm[k]) / (4 * h * h);
      }
      for (double v : d) m = std::max(m, std::abs(v));
    }
  return m;
}

/// Least-squares (A, b) with residual and D²F = 0 diagnostics. The second
/// derivative is probed at the (up to five) samples nearest the centroid,
/// when a callback is available.
inline AffineFit fit_affine(const SampledMap& f, double residual_tol = 1e-9, double second_tol = 1e-6) {
  if (f.is_exact()) throw Error("invalid-argument", "fit_affine takes numeric samples");
  const auto n = static_cast<Eigen::Index>(f.ball().dim());
  const auto m = static_cast<Eigen::Index>(f.size());
  if (m < (n + 1) * (n + 2) / 2)
    throw Error("degenerate-sample-configuration",
                "need at least " + std::to_string((n + 1) * (n + 2) / 2) + " samples, got " + std::to_string(m));
  Eigen::MatrixXd X(m, n + 1), Y(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      X(i, j) = f.numeric_samples()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      Y(i, j) = f.numeric_values()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    X(i, n) = 1.0;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < n + 1) throw Error("degenerate-sample-configuration", "samples are affinely dependent");
  Eigen::MatrixXd sol = qr.solve(Y);  // (n+1) × n
  AffineFit fit;
  fit.map.A = sol.topRows(n).transpose();
  fit.map.b = sol.row(n).transpose();
  fit.max_residual = (X * sol - Y).cwiseAbs().maxCoeff();
  if (f.callback()) {
    RealVector centroid(static_cast<std::size_t>(n), 0.0);
    for (const auto& s : f.numeric_samples())
      for (std::size_t j = 0; j < s.size(); ++j) centroid[j] += s[j] / static_cast<double>(m);
    std::vector<std::size_t> order(f.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return max_norm_diff(f.numeric_samples()[a], centroid) < max_norm_diff(f.numeric_samples()[b], centroid);
    });
    for (std::size_t k = 0; k < std::min<std::size_t>(5, order.size()); ++k)
      fit.second_derivative =
          std::max(fit.second_derivative, second_derivative_norm(f.callback(), f.numeric_samples()[order[k]]));
    fit.second_derivative_checked = true;
  }
  fit.accepted = fit.max_residual < residual_tol && (!fit.second_derivative_checked || fit.second_derivative < second_tol);
  return fit;
}

inline std::optional<NumericAffine> reconstruct_affine(const SampledMap& f, double residual_tol = 1e-9,
                                                       double second_tol = 1e-6) {
  auto fit = fit_affine(f, residual_tol, second_tol);
  if (!fit.accepted) return std::nullopt;
  return fit.map;
}

// --- prescribed lifts --------------------------------------------------------

struct LiftResult {
  AffineElement lift;
  AffineElement adjustment;  // γ' with lift = γ'∘seed
};

/// f̃ = γ'∘seed with γ'·seed(r) = r', so f̃(r) = r' exactly.
inline LiftResult lift_diffeo(const AffineElement& seed, const GroupPresentation& target_group, const QVector& r,
                              const QVector& r_prime, int bound) {
  QVector image = affine_apply(seed, r);
  auto d = target_group.decide_orbit(image, r_prime, bound);
  if (d.absent())
    throw Error("fibers-incompatible", to_string(r_prime) + " is not in the fiber of " + to_string(image));
  if (!d.found())
    throw Error("inconclusive-at-bound", "no element of Γ' up to bound " + std::to_string(bound) + " carries " +
                                             to_string(image) + " to " + to_string(r_prime));
  return {affine_compose(*d.witness, seed), *d.witness};
}

/// Lift through a bi-atlas link: seed = link map, Γ' = group of its target chart.
inline LiftResult lift_diffeo(const BiAtlas& bi, std::size_t link, const QVector& r, const QVector& r_prime, int bound) {
  const auto& l = bi.links.at(link);
  return lift_diffeo(l.map, bi.right.chart(l.to).group, r, r_prime, bound);
}

// --- k-piece synthetic maps --------------------------------------------------

/// F = γ_i on the i-th of k consecutive slabs of the first coordinate,
/// split at `cuts` (increasing). Exact on exact inputs.
struct StitchedMap {
  std::vector<AffineElement> gammas;
  std::vector<QAlpha> cuts;

  std::size_t piece_of(const QVector& x, const AlphaWitness& w = AlphaWitness::standard()) const {
    std::size_t i = 0;
    while (i < cuts.size() && !w.less(x[0], cuts[i])) ++i;
    return i;
  }
  std::size_t piece_of(const RealVector& x, const AlphaWitness& w = AlphaWitness::standard()) const {
    std::size_t i = 0;
    while (i < cuts.size() && x[0] >= w.evaluate(cuts[i])) ++i;
    return i;
  }
  QVector operator()(const QVector& x) const { return affine_apply(gammas.at(piece_of(x)), x); }
  RealVector operator()(const RealVector& x, const AlphaWitness& w = AlphaWitness::standard()) const {
    return apply_numeric(gammas.at(piece_of(x, w)), x, w);
  }
};

// --- the non-equivariantly-liftable map ---------------------------------------

using Big = boost::multiprecision::cpp_bin_float_50;

/// ρ_n(r) = exp(−1/((r − a)(b − r))) on (a, b) = (1/(n+1), 1/n), 0 outside.
inline Big flat_bump(int n, const Big& r) {
  Big a = Big(1) / (n + 1), b = Big(1) / n;
  if (r <= a || r >= b) return Big(0);
  return exp(-1 / ((r - a) * (b - r)));
}

struct BigComplex {
  Big re, im;
};

inline BigComplex operator*(const BigComplex& x, const BigComplex& y) {
  return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}

/// f(z) = e^{−1/r} ρ_n(r)·r on even annuli, e^{−1/r} ρ_n(r)·z on odd ones,
/// 0 for r > 1 or r = 0; annulus n is 1/(n+1) < r ≤ 1/n.
inline BigComplex flip_map(const BigComplex& z) {
  Big r = sqrt(z.re * z.re + z.im * z.im);
  if (r == 0 || r > 1) return {Big(0), Big(0)};
  int n = static_cast<int>(floor(1 / r).convert_to<long long>());
  if (Big(1) / (n + 1) >= r) ++n;  // guard the floor at exact reciprocals
  if (Big(1) / n < r) --n;
  Big s = exp(-1 / r) * flat_bump(n, r);
  if (n % 2 == 0) return {s * r, Big(0)};
  return {s * z.re, s * z.im};
}

struct FlipRow {
  int n = 0;
  std::string h;  // "1" or "tau"
  std::size_t samples = 0;
  double max_abs_error = 0.0;  // |f(τz) − h(τ)f(z)|
  double max_rel_error = 0.0;  // relative to |f(z)|
  double other_rel_gap = 0.0;  // the wrong homomorphism's relative error, min over samples
  bool passed = false;
};

struct FlipReport {
  std::vector<FlipRow> rows;
  bool outside_unit_disk_zero = true;
  bool passed() const {
    return outside_unit_disk_zero && std::all_of(rows.begin(), rows.end(), [](const FlipRow& r) { return r.passed; });
  }
};

/// Checks f(τz) = h(τ)f(z) at random τ ∈ U(1) and z in each annulus n ≤ n_max.
inline FlipReport nonliftable_demo(int n_max, int samples_per_annulus, double tol, std::uint64_t seed = 1) {
  if (n_max < 2) throw Error("invalid-argument", "n_max must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Big two_pi = 2 * boost::math::constants::pi<Big>();
  FlipReport rep;
  for (double r : {1.5, 2.0, 10.0}) {
    auto v = flip_map({Big(r), Big(0)});
    rep.outside_unit_disk_zero = rep.outside_unit_disk_zero && v.re == 0 && v.im == 0;
  }
  for (int n = 1; n <= n_max; ++n) {
    FlipRow row{n, n % 2 == 0 ? "1" : "tau", 0, 0.0, 0.0, std::numeric_limits<double>::infinity(), true};
    Big a = Big(1) / (n + 1), b = Big(1) / n;
    for (int s = 0; s < samples_per_annulus; ++s) {
      // Interior radii only: ρ_n underflows even 50-digit floats within ~1e-3 of the edges for large n.
      Big r = a + (b - a) * Big(0.05 + 0.9 * unit(rng));
      Big phi = two_pi * Big(unit(rng)), theta = two_pi * Big(unit(rng));
      BigComplex z{r * cos(phi), r * sin(phi)}, tau{cos(theta), sin(theta)};
      BigComplex fz = flip_map(z), ftz = flip_map(tau * z);
      BigComplex hfz = n % 2 == 0 ? fz : tau * fz;
      BigComplex other = n % 2 == 0 ? tau * fz : fz;
      Big norm = sqrt(fz.re * fz.re + fz.im * fz.im);
      Big err = sqrt((ftz.re - hfz.re) * (ftz.re - hfz.re) + (ftz.im - hfz.im) * (ftz.im - hfz.im));
      Big gap = sqrt((ftz.re - other.re) * (ftz.re - other.re) + (ftz.im - other.im) * (ftz.im - other.im));
      row.max_abs_error = std::max(row.max_abs_error, err.convert_to<double>());
      if (norm > 0) {
        row.max_rel_error = std::max(row.max_rel_error, (err / norm).convert_to<double>());
        row.other_rel_gap = std::min(row.other_rel_gap, (gap / norm).convert_to<double>());
      } else {
        row.passed = false;  // the bump must not vanish inside its interval
      }
      ++row.samples;
    }
    row.passed = row.passed && row.max_abs_error < tol && row.max_rel_error < tol;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace quasifold
