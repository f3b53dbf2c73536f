#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tgbtsp/error.hpp"
#include "tgbtsp/moments.hpp"

namespace tgbtsp {

// Beta distribution rescaled to the support [A, B].
struct GBParams {
  double alpha = 1.0;
  double beta = 1.0;
  double A = 0.0;
  double B = 1.0;

  bool valid() const noexcept {
    return alpha > 0.0 && beta > 0.0 && B > A && std::isfinite(alpha) && std::isfinite(beta) &&
           std::isfinite(A) && std::isfinite(B);
  }
  double range() const noexcept { return B - A; }
  double normalize(double x) const noexcept { return (x - A) / (B - A); }
};

inline void require_valid(const GBParams& p, const char* who) {
  if (!p.valid()) {
    std::ostringstream msg;
    msg << who << ": invalid GB parameters (alpha=" << p.alpha << ", beta=" << p.beta << ", A=" << p.A
        << ", B=" << p.B << ")";
    throw DomainError("invalid-params", msg.str());
  }
}

// Upper truncation window in normalized coordinates x^ = (x - A) / (B - A).
struct TruncationWindow {
  double a_hat = 0.0;
  double b_hat = 1.0;
};

// ---------------------------------------------------------------------------
// Beta function and incomplete beta.

inline double log_beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("domain", "beta_function: arguments must be > 0");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double beta_function(double a, double b) { return std::exp(log_beta_function(a, b)); }

namespace detail {

// Continued fraction of the incomplete beta (modified Lentz).
inline double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw DomainError("no-convergence", "incomplete_beta: continued fraction did not converge");
}

inline void check_incomplete_args(double t, double a, double b) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("domain", "incomplete_beta: t must lie in [0, 1]");
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("domain", "incomplete_beta: alpha, beta must be > 0");
}

}  // namespace detail

// log of B2(0, t, a, b) = int_0^t x^(a-1) (1-x)^(b-1) dx. Stays finite where
// the integral itself underflows (large a, small t).
inline double log_incomplete_beta(double t, double a, double b) {
  detail::check_incomplete_args(t, a, b);
  if (t == 0.0) return -std::numeric_limits<double>::infinity();
  const double lbeta = log_beta_function(a, b);
  if (t == 1.0) return lbeta;
  if (t < (a + 1.0) / (a + b + 2.0)) {
    return a * std::log(t) + b * std::log1p(-t) - std::log(a) +
           std::log(detail::beta_continued_fraction(t, a, b));
  }
  // Complement: B(a,b) * (1 - I_{1-t}(b, a)).
  const double upper = std::exp(b * std::log1p(-t) + a * std::log(t) - std::log(b) - lbeta) *
                       detail::beta_continued_fraction(1.0 - t, b, a);
  return lbeta + std::log1p(-std::min(upper, 1.0));
}

inline double incomplete_beta(double t, double a, double b) {
  return std::exp(log_incomplete_beta(t, a, b));
}

// Regularized I_t(a, b).
inline double regularized_incomplete_beta(double t, double a, double b) {
  detail::check_incomplete_args(t, a, b);
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  const double lbeta = log_beta_function(a, b);
  if (t < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(a * std::log(t) + b * std::log1p(-t) - std::log(a) - lbeta) *
           detail::beta_continued_fraction(t, a, b);
  }
  return 1.0 - std::exp(b * std::log1p(-t) + a * std::log(t) - std::log(b) - lbeta) *
                   detail::beta_continued_fraction(1.0 - t, b, a);
}

namespace detail {

inline double gauss_series(double a, double b, double c, double x);

}  // namespace detail

// Gauss series F(a, b; c; x) for |x| < 1, summed to relative tolerance 1e-12.
// Stops once the term and a geometric bound on the remaining tail are both
// below tolerance. A series whose terms change sign for x > 0 is rewritten
// with Euler's transformation (1-x)^(c-a-b) F(c-a, c-b; c; x) when that one
// has positive terms, which avoids cancellation as x approaches 1.
inline double hypergeometric_2f1(double a, double b, double c, double x) {
  if (!(std::fabs(x) < 1.0)) throw DomainError("domain", "hypergeometric_2f1: |x| must be < 1");
  if (c <= 0.0 && c == std::floor(c)) {
    throw DomainError("domain", "hypergeometric_2f1: c must not be a non-positive integer");
  }
  const bool alternating = x > 0.0 && ((a < 0.0) != (b < 0.0));
  if (alternating && c > 0.0 && c - a > 0.0 && c - b > 0.0) {
    return std::pow(1.0 - x, c - a - b) * detail::gauss_series(c - a, c - b, c, x);
  }
  return detail::gauss_series(a, b, c, x);
}

namespace detail {

inline double gauss_series(double a, double b, double c, double x) {
  constexpr double kTol = 1e-12;
  constexpr long kMaxTerms = 10'000'000;
  double term = 1.0;
  double sum = 1.0;
  for (long k = 0; k < kMaxTerms; ++k) {
    const double kk = static_cast<double>(k);
    const double ratio = (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * x;
    term *= ratio;
    sum += term;
    if (term == 0.0) return sum;  // terminating series
    // Successive-term ratio tends to x; once it is below 1 in magnitude and
    // no longer growing, the tail is bounded by a geometric series.
    const double kn = kk + 1.0;
    const double next_ratio = std::fabs((a + kn) * (b + kn) / ((c + kn) * (kn + 1.0)) * x);
    if (next_ratio < 1.0) {
      const double r = std::max(next_ratio, std::fabs(x));
      const double tail = std::fabs(term) * r / (1.0 - r);
      if (std::fabs(term) <= kTol * std::fabs(sum) && tail <= kTol * std::fabs(sum)) return sum;
    }
  }
  throw DomainError("no-convergence", "hypergeometric_2f1: series did not converge within the term cap");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Density, CDF, moments.

// Normalized GB density, including the (B-A)^(alpha+beta-1) support factor.
inline double gb_pdf(double x, const GBParams& p) {
  require_valid(p, "gb_pdf");
  if (x < p.A || x > p.B) return 0.0;
  const double u = p.normalize(x);
  if ((u == 0.0 && p.alpha < 1.0) || (u == 1.0 && p.beta < 1.0)) {
    return std::numeric_limits<double>::infinity();
  }
  if ((u == 0.0 && p.alpha > 1.0) || (u == 1.0 && p.beta > 1.0)) return 0.0;
  const double log_u = u == 0.0 ? 0.0 : std::log(u);
  const double log_v = u == 1.0 ? 0.0 : std::log1p(-u);
  return std::exp((p.alpha - 1.0) * log_u + (p.beta - 1.0) * log_v - log_beta_function(p.alpha, p.beta)) /
         p.range();
}

inline double gb_cdf(double x, const GBParams& p) {
  require_valid(p, "gb_cdf");
  if (x <= p.A) return 0.0;
  if (x >= p.B) return 1.0;
  return regularized_incomplete_beta(p.normalize(x), p.alpha, p.beta);
}

inline double gb_mode(const GBParams& p) {
  if (p.alpha > 1.0 && p.beta > 1.0) return p.A + p.range() * (p.alpha - 1.0) / (p.alpha + p.beta - 2.0);
  return p.alpha < p.beta ? p.A : p.B;
}

inline double gb_excess_kurtosis(double a, double b) {
  return 6.0 * (a * a * a + a * a * (1.0 - 2.0 * b) + b * b * (1.0 + b) - 2.0 * a * b * (2.0 + b)) /
         (a * b * (a + b + 2.0) * (a + b + 3.0));
}

// Standard Beta skewness; the denominator carries sqrt(alpha * beta).
inline double gb_skewness(double a, double b) {
  return 2.0 * (b - a) * std::sqrt(1.0 + a + b) / (std::sqrt(a * b) * (2.0 + a + b));
}

inline MomentSet gb_moments(const GBParams& p) {
  require_valid(p, "gb_moments");
  const double a = p.alpha, b = p.beta, s = a + b, r = p.range();
  MomentSet m;
  m.basis = MomentBasis::closed_form;
  m.mean = p.A + r * a / s;
  m.variance = r * r * a * b / (s * s * (s + 1.0));
  m.skewness = gb_skewness(a, b);
  m.kurtosis = gb_excess_kurtosis(a, b) + 3.0;
  m.min = p.A;
  m.max = p.B;
  return m;
}

// ---------------------------------------------------------------------------
// Moment matching.

// Four-moment match. Shape from (skewness, excess kurtosis), then support
// from mean and variance.
inline GBParams fit_from_four_moments(const MomentSet& m) {
  if (!(m.variance > 0.0)) {
    throw InfeasibleMoments("degenerate-variance", "fit_from_four_moments: variance must be > 0");
  }
  const double g2 = m.skewness * m.skewness;
  const double k = m.excess_kurtosis();
  if (!(k > g2 - 2.0)) {
    std::ostringstream msg;
    msg << "fit_from_four_moments: kurtosis " << m.kurtosis << " violates kurtosis > 1 + skewness^2 = "
        << 1.0 + g2;
    throw InfeasibleMoments("below-kurtosis-floor", msg.str());
  }
  if (!(k < 1.5 * g2)) {
    std::ostringstream msg;
    msg << "fit_from_four_moments: kurtosis " << m.kurtosis
        << " violates kurtosis < 3 + 1.5 * skewness^2 = " << 3.0 + 1.5 * g2
        << " (outside the Pearson Type I region)";
    throw InfeasibleMoments("outside-pearson-type-i", msg.str());
  }
  const double nu = 3.0 * (k - g2 + 2.0) / (1.5 * g2 - k);
  double alpha = 0.5 * nu, beta = 0.5 * nu;
  if (g2 > 0.0) {
    const double spread = 1.0 / std::sqrt(1.0 + 16.0 * (nu + 1.0) / ((nu + 2.0) * (nu + 2.0) * g2));
    // Positive skew puts the mass low: beta > alpha.
    if (m.skewness > 0.0) {
      alpha = 0.5 * nu * (1.0 - spread);
      beta = 0.5 * nu * (1.0 + spread);
    } else {
      alpha = 0.5 * nu * (1.0 + spread);
      beta = 0.5 * nu * (1.0 - spread);
    }
  }
  const double range = std::sqrt(m.variance * nu * nu * (nu + 1.0) / (alpha * beta));
  const double A = m.mean - range * alpha / nu;
  return {alpha, beta, A, A + range};
}

struct BoundFitDiagnostics {
  double bracket_lo = 0.0;  // beta bracket that held the root
  double bracket_hi = 0.0;
  double residual_mean = 0.0;      // relative
  double residual_variance = 0.0;  // relative
  double residual_skewness = 0.0;  // absolute
};

namespace detail {

// Given beta and q = variance / (mean - A)^2, the alpha satisfying
// q = beta / (alpha (alpha + beta + 1)).
inline double alpha_for_beta(double beta, double q) {
  const double bp1 = beta + 1.0;
  const double disc = bp1 * bp1 + 4.0 * beta / q;
  // Stable positive root of alpha^2 + (beta+1) alpha - beta/q = 0.
  return (2.0 * beta / q) / (bp1 + std::sqrt(disc));
}

}  // namespace detail

// Solves mean, variance and skewness for (B, alpha, beta) with A fixed. B and
// alpha are eliminated through the mean/variance relations; the remaining
// skewness equation in beta is bracketed on a log grid over [1e-3, 1e6] and
// bisected.
inline GBParams fit_from_bound_and_moments(double A, double mean, double variance, double skewness,
                                           BoundFitDiagnostics* diag = nullptr) {
  if (!(A < mean)) throw DomainError("bound-not-below-mean", "fit_from_bound_and_moments: need A < mean");
  if (!(variance > 0.0)) {
    throw InfeasibleMoments("degenerate-variance", "fit_from_bound_and_moments: variance must be > 0");
  }
  const double d = mean - A;
  const double q = variance / (d * d);
  auto residual = [&](double log_beta) {
    const double b = std::exp(log_beta);
    return gb_skewness(detail::alpha_for_beta(b, q), b) - skewness;
  };

  constexpr double kLo = 1e-3, kHi = 1e6;
  constexpr int kGrid = 400;
  const double llo = std::log(kLo), lhi = std::log(kHi);
  double x0 = llo, f0 = residual(x0);
  bool found = f0 == 0.0;
  double x1 = x0, f1 = f0;
  for (int i = 1; i <= kGrid && !found; ++i) {
    x1 = llo + (lhi - llo) * i / kGrid;
    f1 = residual(x1);
    if (f1 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
      found = true;
      break;
    }
    x0 = x1;
    f0 = f1;
  }
  if (!found) {
    std::ostringstream msg;
    msg << "fit_from_bound_and_moments: skewness " << skewness << " not attainable for beta in [" << kLo << ", "
        << kHi << "] given A=" << A << ", mean=" << mean << ", variance=" << variance;
    throw InfeasibleMoments("no-root", msg.str());
  }
  double root = f0 == 0.0 ? x0 : x1;
  if (f0 != 0.0 && f1 != 0.0) {
    double lo = x0, hi = x1, flo = f0;
    // 1e-12 relative on beta == 1e-12 absolute on log(beta).
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      const double fm = residual(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    root = 0.5 * (lo + hi);
  }
  const double beta = std::exp(root);
  const double alpha = detail::alpha_for_beta(beta, q);
  const double B = A + d * (alpha + beta) / alpha;
  GBParams p{alpha, beta, A, B};
  if (diag) {
    const MomentSet fit = gb_moments(p);
    diag->bracket_lo = std::exp(x0);
    diag->bracket_hi = std::exp(x1);
    diag->residual_mean = (fit.mean - mean) / mean;
    diag->residual_variance = (fit.variance - variance) / variance;
    diag->residual_skewness = fit.skewness - skewness;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Truncation.

// Mean of the GB conditioned on X <= A + b_hat (B - A):
//   A + (B - A) * B2(0, b_hat, alpha + 1, beta) / B2(0, b_hat, alpha, beta).
// The ratio is formed in log space so it survives large alpha.
inline double truncated_mean(const GBParams& p, const TruncationWindow& w) {
  require_valid(p, "truncated_mean");
  if (!(w.b_hat > 0.0)) throw DomainError("bad-window", "truncated_mean: b_hat must be > 0");
  if (w.a_hat != 0.0) throw DomainError("bad-window", "truncated_mean: only upper truncation (a_hat = 0) is supported");
  const double b = std::min(w.b_hat, 1.0);
  const double ratio =
      std::exp(log_incomplete_beta(b, p.alpha + 1.0, p.beta) - log_incomplete_beta(b, p.alpha, p.beta));
  return p.A + p.range() * ratio;
}

// ---------------------------------------------------------------------------
// Goodness of fit.

// sup |F_empirical - F_GB| over the sample (samples sorted ascending).
inline double ks_statistic(std::span<const double> sorted_samples, const GBParams& p) {
  if (sorted_samples.empty()) throw DomainError("empty-sample", "ks_statistic: samples must be non-empty");
  const double m = static_cast<double>(sorted_samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double f = gb_cdf(sorted_samples[i], p);
    const double above = static_cast<double>(i + 1) / m - f;
    const double below = f - static_cast<double>(i) / m;
    d = std::max({d, above, below});
  }
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace tgbtsp
