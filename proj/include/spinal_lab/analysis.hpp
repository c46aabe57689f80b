#pragma once

// Quantitative machinery: graph gradient, Lp norms, the Nash-type functional
// and its test-function curves, dimension certification, the dimension
// inequality and its consequences, the critical exponent, volume lower
// bounds, and log-log exponent fitting.

#include "spinal_lab/spinal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spinal_lab {

namespace detail {

// Neumaier-compensated accumulator; the walk and norm sums run over millions
// of terms and the acceptance bar on mass drift is 1e-12.
class CompensatedSum {
public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0, comp_ = 0;
};

}  // namespace detail

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;
  std::size_t points = 0;
};

/// Least squares on (log r, log v).
inline ExponentFit fit_exponent(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 3)
    fail("TooFewPoints", "exponent fit needs at least 3 samples, got " +
                             std::to_string(samples.size()));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [r, v] : samples) {
    if (!(r > 0) || !(v > 0))
      fail("NonPositive", "exponent fit needs positive samples, got (" +
                              format_g17(r) + ", " + format_g17(v) + ")");
    double x = std::log(r), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  bool distinct = false;
  for (const auto& [r, v] : samples) distinct |= r != samples.front().first;
  auto n = static_cast<double>(samples.size());
  double denom = n * sxx - sx * sx;
  // denom is n^2 Var(log r); cancellation can leave dust, so test the inputs
  if (!distinct || denom <= 0)
    fail("DomainError", "exponent fit needs distinct r values");
  ExponentFit fit;
  fit.points = samples.size();
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (const auto& [r, v] : samples)
    fit.max_residual = std::max(
        fit.max_residual,
        std::abs(std::log(v) - (fit.intercept + fit.slope * std::log(r))));
  return fit;
}

/// |grad f|(x) = sqrt( (1/2) sum over neighbors y of |f(y)-f(x)|^2 / m(x) ).
inline std::vector<double> graph_gradient(const Graph& g, std::span<const double> f) {
  if (f.size() != g.vertex_count())
    fail("DomainError", "gradient needs one value per vertex");
  std::vector<double> grad(f.size());
  for (VertexId x = 0; x < f.size(); ++x) {
    double acc = 0;
    for (VertexId y : g.neighbors(x)) {
      double d = f[y] - f[x];
      acc += d * d;
    }
    grad[x] = g.degree(x) ? std::sqrt(acc / (2.0 * g.degree(x))) : 0.0;
  }
  return grad;
}

/// Counting-measure Lp norm; p may be infinity.
inline double lp_norm(std::span<const double> f, double p) {
  if (std::isinf(p) && p > 0) {
    double top = 0;
    for (double x : f) top = std::max(top, std::abs(x));
    return top;
  }
  if (!(p > 0)) fail("DomainError", "Lp norm needs p > 0 or p = inf");
  detail::CompensatedSum sum;
  for (double x : f)
    if (x != 0) sum.add(std::pow(std::abs(x), p));
  return std::pow(sum.value(), 1.0 / p);
}

namespace detail {

inline double conjugate_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

inline double nash_ratio_from_norms(double norm1, double normp, double gradp,
                                    double p, double beta) {
  double pp = conjugate_exponent(p);
  if (gradp == 0) return std::numeric_limits<double>::infinity();
  return std::pow(normp, 1.0 + pp / beta) / (std::pow(norm1, pp / beta) * gradp);
}

}  // namespace detail

/// The functional whose uniform boundedness over finitely supported f is the
/// Nash-type inequality: ||f||_p^(1+p'/beta) / (||f||_1^(p'/beta) ||grad f||_p).
inline double nash_ratio(const Graph& g, std::span<const double> f, double p,
                         double beta) {
  if (!(p > 1)) fail("DomainError", "nash ratio needs p > 1");
  if (!(beta > 0)) fail("DomainError", "nash ratio needs beta > 0");
  if (g.vertex_count() < 2)
    fail("DegenerateGraph", "nash ratio needs at least 2 vertices");
  double norm1 = lp_norm(f, 1.0);
  if (norm1 == 0) fail("DomainError", "nash ratio needs a nonzero function");
  std::vector<double> grad = graph_gradient(g, f);
  return detail::nash_ratio_from_norms(norm1, lp_norm(f, p), lp_norm(grad, p), p,
                                       beta);
}

struct NashPoint {
  std::uint32_t n = 0;
  double norm1 = 0, normp = 0, gradp = 0, ratio = 0;
};

struct NashCurve {
  double p = 2, beta = 1;
  VertexId center = 0;
  std::vector<NashPoint> entries;
  ExponentFit fit;  // log ratio against log n
};

/// Expected log-log slope of the ratio curve on a graph with the given
/// dimensions: 1 + (deltaG - deltaSigma)/p - deltaG/beta. A positive value
/// sustained over unbounded n is what refutes S(p, beta).
inline double nash_slope_law(double p, double beta, double delta_sigma,
                             double delta_g) {
  return 1.0 + (delta_g - delta_sigma) / p - delta_g / beta;
}

/// Evaluates the cutoff family f = g_{2n} for each n in n_list and fits the
/// ratio's growth exponent.
inline NashCurve nash_curve(const SpinalGraph& sg, VertexId x0, double p,
                            double beta, std::span<const std::uint32_t> n_list,
                            std::uint32_t safe_radius) {
  if (!(p > 1)) fail("DomainError", "nash curve needs p > 1");
  if (!(beta > 0)) fail("DomainError", "nash curve needs beta > 0");
  if (n_list.empty()) fail("DomainError", "nash curve needs at least one n");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) fail("DomainError", "nash curve needs n >= 1");
    if (i && n_list[i] <= n_list[i - 1])
      fail("DomainError", "nash curve needs strictly increasing n");
  }
  if (2ull * n_list.back() > safe_radius)
    fail("RadiusUnsafe", "2n = " + std::to_string(2ull * n_list.back()) +
                             " exceeds the safe radius " + std::to_string(safe_radius));

  NashCurve curve;
  curve.p = p;
  curve.beta = beta;
  curve.center = x0;
  for (std::uint32_t n : n_list) {
    TestFunction f = test_function(sg, x0, 2 * n);
    std::vector<double> values = f.values();
    // ||g||_1 has an exact integer numerator; keep that exactness.
    std::int64_t numerator_sum = 0;
    for (std::int64_t num : f.numerators) numerator_sum += num;
    NashPoint point;
    point.n = n;
    point.norm1 = static_cast<double>(numerator_sum) / f.denominator;
    point.normp = lp_norm(values, p);
    std::vector<double> grad = graph_gradient(sg.graph(), values);
    point.gradp = lp_norm(grad, p);
    point.ratio =
        detail::nash_ratio_from_norms(point.norm1, point.normp, point.gradp, p, beta);
    curve.entries.push_back(point);
  }
  std::vector<std::pair<double, double>> pairs;
  for (const NashPoint& e : curve.entries)
    pairs.emplace_back(static_cast<double>(e.n), e.ratio);
  curve.fit = fit_exponent(pairs);
  return curve;
}

/// Explicit bounds extracted from the volume-estimate argument for g_{2n}:
/// the L1 norm against |D(x0,2n)|, the Lp norm against |D(x0,n)|^(1/p)/2,
/// the gradient norm against (2 sqrt(2) n)^(-1) |B_Sigma(x0,2n)|^(1/p),
/// plus the two support identities the argument rests on.
struct Lemma4Report {
  std::uint32_t n = 0;
  double p = 2;
  std::uint64_t d_n = 0, d_2n = 0, b_2n = 0;
  double norm1 = 0, normp = 0, gradp = 0;
  double normp_floor = 0, gradp_ceiling = 0;
  bool norm1_ok = false;
  bool normp_ok = false;
  bool gradp_ok = false;
  bool grad_support_ok = false;
  bool fn_support_ok = false;
  bool all_ok() const {
    return norm1_ok && normp_ok && gradp_ok && grad_support_ok && fn_support_ok;
  }
};

inline Lemma4Report lemma4_bounds_check(const SpinalGraph& sg, VertexId x0,
                                        std::uint32_t n, double p,
                                        std::uint32_t safe_radius) {
  if (n == 0) fail("DomainError", "bound check needs n >= 1");
  if (!(p > 1) || std::isinf(p)) fail("DomainError", "bound check needs finite p > 1");
  if (2ull * n > safe_radius)
    fail("RadiusUnsafe", "2n = " + std::to_string(2ull * n) +
                             " exceeds the safe radius " + std::to_string(safe_radius));

  TestFunction f = test_function(sg, x0, 2 * n);
  std::vector<double> values = f.values();
  std::vector<double> grad = graph_gradient(sg.graph(), values);
  SpinalProfile profile = spinal_volume_profile(sg, x0, 2 * n);
  std::vector<std::int32_t> skel_dist = sg.skeleton_distances(x0);

  Lemma4Report report;
  report.n = n;
  report.p = p;
  report.d_n = profile.spinal_set[n];
  report.d_2n = profile.spinal_set[2 * n];
  report.b_2n = profile.spine_ball[2 * n];

  std::int64_t numerator_sum = 0;
  for (std::int64_t num : f.numerators) numerator_sum += num;
  report.norm1 = static_cast<double>(numerator_sum) / f.denominator;
  report.normp = lp_norm(values, p);
  report.gradp = lp_norm(grad, p);
  report.normp_floor = std::pow(static_cast<double>(report.d_n), 1.0 / p) / 2.0;
  report.gradp_ceiling = std::pow(static_cast<double>(report.b_2n), 1.0 / p) /
                         (2.0 * std::sqrt(2.0) * n);

  // The inequalities are exact facts; the slack only absorbs floating-point
  // evaluation noise.
  constexpr double kSlack = 1e-9;
  report.norm1_ok = report.norm1 <= static_cast<double>(report.d_2n) * (1 + kSlack);
  report.normp_ok = report.normp >= report.normp_floor * (1 - kSlack);
  report.gradp_ok = report.gradp <= report.gradp_ceiling * (1 + kSlack);

  report.grad_support_ok = true;
  report.fn_support_ok = true;
  for (VertexId v = 0; v < values.size(); ++v) {
    std::int64_t dist = skel_dist[sg.skeleton_id(v)];
    if (grad[v] != 0 && (!sg.on_spine(v) || dist > 2 * n))
      report.grad_support_ok = false;
    bool in_support = f.numerators[v] > 0;
    if (in_support != (dist <= 2 * n - 1)) report.fn_support_ok = false;
  }
  return report;
}

struct CertifyThresholds {
  double double_max = 8.0;
  double spine_max = 8.0;
  double window_max = 8.0;
};

/// Measured constants for the three growth conditions along n_k: spinal-set
/// doubling, spine-ball growth at exponent deltaSigma, and the two-sided
/// window for |D(x0, n_k)| / n_k^deltaG.
struct DimensionCertificate {
  VertexId x0 = 0;
  double delta_sigma = 1, delta_g = 1;
  std::vector<std::uint32_t> n_k;
  std::vector<std::uint64_t> d_n, d_2n, b_2n;
  double c_double = 0;       // max |D(x0,2n)| / |D(x0,n)|
  double c_spine = 0;        // max |B_Sigma(x0,2n)| / (2n)^deltaSigma
  double c_lo = 0, c_hi = 0; // range of |D(x0,n)| / n^deltaG
  CertifyThresholds thresholds;
  bool pass_double = false, pass_spine = false, pass_window = false;
  bool pass() const { return pass_double && pass_spine && pass_window; }
};

inline DimensionCertificate certify_dimensions(
    const SpinalGraph& sg, VertexId x0, std::span<const std::uint32_t> n_list,
    double delta_sigma, double delta_g, std::uint32_t safe_radius,
    CertifyThresholds thresholds = {}) {
  if (n_list.empty()) fail("DomainError", "certificate needs at least one n_k");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) fail("DomainError", "certificate needs n_k >= 1");
    if (i && n_list[i] <= n_list[i - 1])
      fail("DomainError", "certificate needs strictly increasing n_k");
  }
  if (2ull * n_list.back() > safe_radius)
    fail("RadiusUnsafe", "2n_k = " + std::to_string(2ull * n_list.back()) +
                             " exceeds the safe radius " + std::to_string(safe_radius));

  SpinalProfile profile = spinal_volume_profile(sg, x0, 2 * n_list.back());
  DimensionCertificate cert;
  cert.x0 = x0;
  cert.delta_sigma = delta_sigma;
  cert.delta_g = delta_g;
  cert.thresholds = thresholds;
  cert.n_k.assign(n_list.begin(), n_list.end());
  cert.c_lo = std::numeric_limits<double>::infinity();
  for (std::uint32_t n : n_list) {
    std::uint64_t dn = profile.spinal_set[n];
    std::uint64_t d2n = profile.spinal_set[2 * n];
    std::uint64_t b2n = profile.spine_ball[2 * n];
    cert.d_n.push_back(dn);
    cert.d_2n.push_back(d2n);
    cert.b_2n.push_back(b2n);
    cert.c_double = std::max(cert.c_double,
                             static_cast<double>(d2n) / static_cast<double>(dn));
    cert.c_spine =
        std::max(cert.c_spine, static_cast<double>(b2n) /
                                   std::pow(2.0 * n, delta_sigma));
    double window = static_cast<double>(dn) / std::pow(n, delta_g);
    cert.c_lo = std::min(cert.c_lo, window);
    cert.c_hi = std::max(cert.c_hi, window);
  }
  cert.pass_double = cert.c_double <= thresholds.double_max;
  cert.pass_spine = cert.c_spine <= thresholds.spine_max;
  cert.pass_window = cert.c_hi / cert.c_lo <= thresholds.window_max;
  return cert;
}

struct DimInequality {
  bool holds = false;
  double slack = 0;  // (deltaG - deltaSigma)/p - deltaG/beta + 1; holds iff <= 0
};

inline DimInequality dim_inequality(double p, double beta, double delta_sigma,
                                    double delta_g) {
  if (!(p > 1)) fail("DomainError", "dimension inequality needs p > 1");
  if (!(beta > 0)) fail("DomainError", "dimension inequality needs beta > 0");
  if (!(delta_sigma >= 1) || !(delta_g >= 1))
    fail("DomainError", "dimension inequality needs deltas >= 1");
  DimInequality out;
  out.slack = (delta_g - delta_sigma) / p - delta_g / beta + 1.0;
  out.holds = out.slack <= 0;
  return out;
}

inline double beta_from_nu(double nu) {
  if (!(nu > 0)) fail("DomainError", "beta_from_nu needs nu > 0");
  return 2.0 * nu / (nu + 1.0);
}

/// Least p compatible with S(p, beta) on a graph of the given dimensions.
inline double p_lower_bound(double beta, double delta_sigma, double delta_g) {
  if (!(beta > 0)) fail("DomainError", "p lower bound needs beta > 0");
  if (!(delta_g > delta_sigma))
    fail("DomainError", "p lower bound needs delta_g > delta_sigma");
  if (!(delta_g > beta))
    fail("BetaTooLarge", "delta_g = " + format_g17(delta_g) +
                             " must exceed beta = " + format_g17(beta));
  return beta * (delta_g - delta_sigma) / (delta_g - beta);
}

/// p_c = 2 (deltaG - deltaSigma) / (deltaG/nu' - 2 deltaSigma + 2), the
/// threshold above which no thickening of the graph supports the Riesz
/// bound. Holder-conjugate to p_lower_bound(2 nu/(nu+1), ...).
inline double critical_p(double delta_sigma, double delta_g, double nu) {
  if (!(delta_sigma >= 1)) fail("DomainError", "critical p needs delta_sigma >= 1");
  if (!(delta_g > delta_sigma))
    fail("DomainError", "critical p needs delta_g > delta_sigma");
  if (!(nu > 1)) fail("DomainError", "critical p needs nu > 1 for a finite conjugate");
  double denom = delta_g * (nu - 1.0) / nu - 2.0 * delta_sigma + 2.0;
  if (!(denom > 0))
    fail("DomainError", "critical p needs delta_g/nu' - 2 delta_sigma + 2 > 0, got " +
                            format_g17(denom));
  return 2.0 * (delta_g - delta_sigma) / denom;
}

struct VolumeLowerBound {
  double min_constant = 0;  // min over samples of |B(x,r)| / r^D
  VertexId arg_x = 0;
  std::uint32_t arg_r = 0;
  std::uint64_t samples = 0;
};

inline VolumeLowerBound volume_lower_bound_check(const Graph& g, double D,
                                                 std::span<const VertexId> centers,
                                                 std::span<const std::uint32_t> r_list,
                                                 std::uint32_t safe_radius) {
  if (centers.empty() || r_list.empty())
    fail("EmptySample", "volume lower bound needs centers and radii");
  std::uint32_t r_max = 0;
  for (std::uint32_t r : r_list) {
    if (r == 0) fail("DomainError", "volume lower bound needs r >= 1");
    r_max = std::max(r_max, r);
  }
  if (r_max > safe_radius)
    fail("RadiusUnsafe", "r = " + std::to_string(r_max) +
                             " exceeds the safe radius " + std::to_string(safe_radius));

  struct PerCenter {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg_r = 0;
  };
  std::vector<PerCenter> per_center(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) {
    VolumeTable table = volume_table(g, centers[i], r_max);
    for (std::uint32_t r : r_list) {
      double c = static_cast<double>(table.volumes[r]) / std::pow(r, D);
      if (c < per_center[i].best) {
        per_center[i].best = c;
        per_center[i].arg_r = r;
      }
    }
  });

  VolumeLowerBound out;
  out.min_constant = std::numeric_limits<double>::infinity();
  out.samples = centers.size() * r_list.size();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (per_center[i].best < out.min_constant) {
      out.min_constant = per_center[i].best;
      out.arg_x = centers[i];
      out.arg_r = per_center[i].arg_r;
    }
  }
  return out;
}

}  // namespace spinal_lab
