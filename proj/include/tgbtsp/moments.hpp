#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace tgbtsp {

enum class MomentBasis { exact_enumeration, closed_form, sampled };

inline std::string_view to_string(MomentBasis b) {
  switch (b) {
    case MomentBasis::exact_enumeration: return "exact-enumeration";
    case MomentBasis::closed_form: return "closed-form";
    case MomentBasis::sampled: return "sampled";
  }
  return "unknown";
}

// Four moments of a tour-length distribution. `kurtosis` is ordinary
// (normal == 3), not excess.
struct MomentSet {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  std::optional<double> min;
  std::optional<double> max;
  MomentBasis basis = MomentBasis::closed_form;
  std::uint64_t count = 0;             // tours aggregated (0 for closed form)
  std::uint64_t sample_size = 0;       // sampled basis only
  std::uint64_t seed = 0;              // sampled basis only

  double stddev() const { return std::sqrt(variance); }
  double excess_kurtosis() const { return kurtosis - 3.0; }
};

// One-pass central moments (count, mean, M2..M4) with the pairwise update and
// merge formulas of Terriberry/Pebay. Merging is associative up to rounding.
class MomentAccumulator {
 public:
  void add(double x) noexcept {
    const double n1 = n_;
    n_ += 1.0;
    const double delta = x - mean_;
    const double dn = delta / n_;
    const double dn2 = dn * dn;
    const double term1 = delta * dn * n1;
    mean_ += dn;
    m4_ += term1 * dn2 * (n_ * n_ - 3.0 * n_ + 3.0) + 6.0 * dn2 * m2_ - 4.0 * dn * m3_;
    m3_ += term1 * dn * (n_ - 2.0) - 3.0 * dn * m2_;
    m2_ += term1;
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }

  // Adds a block already reduced to central sums about its own mean.
  void merge_central(double count, double mean, double m2, double m3, double m4, double lo,
                     double hi) noexcept {
    if (count == 0.0) return;
    if (n_ == 0.0) {
      n_ = count;
      mean_ = mean;
      m2_ = m2;
      m3_ = m3;
      m4_ = m4;
      min_ = lo;
      max_ = hi;
      return;
    }
    const double na = n_, nb = count, n = na + nb;
    const double d = mean - mean_;
    const double d2 = d * d;
    const double new_mean = mean_ + d * nb / n;
    const double new_m2 = m2_ + m2 + d2 * na * nb / n;
    const double new_m3 = m3_ + m3 + d2 * d * na * nb * (na - nb) / (n * n) +
                          3.0 * d * (na * m2 - nb * m2_) / n;
    const double new_m4 = m4_ + m4 + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                          6.0 * d2 * (na * na * m2 + nb * nb * m2_) / (n * n) +
                          4.0 * d * (na * m3 - nb * m3_) / n;
    n_ = n;
    mean_ = new_mean;
    m2_ = new_m2;
    m3_ = new_m3;
    m4_ = new_m4;
    min_ = std::min(min_, lo);
    max_ = std::max(max_, hi);
  }

  void merge(const MomentAccumulator& o) noexcept {
    merge_central(o.n_, o.mean_, o.m2_, o.m3_, o.m4_, o.min_, o.max_);
  }

  double count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 0 ? m2_ / n_ : 0.0; }

  // Population skewness/kurtosis; a zero-variance stream reports 0 and 3.
  MomentSet finish(MomentBasis basis) const {
    MomentSet m;
    m.basis = basis;
    m.count = static_cast<std::uint64_t>(n_);
    m.mean = mean_;
    m.variance = variance();
    if (m2_ > 0.0 && n_ > 0.0) {
      m.skewness = std::sqrt(n_) * m3_ / std::pow(m2_, 1.5);
      m.kurtosis = n_ * m4_ / (m2_ * m2_);
    } else {
      m.skewness = 0.0;
      m.kurtosis = 3.0;
    }
    if (n_ > 0.0) {
      m.min = min_;
      m.max = max_;
    }
    return m;
  }

 private:
  double n_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

// Hot-loop accumulator: raw power sums of (x - shift) over a bounded block,
// flushed into a MomentAccumulator. With shift near the mean the raw-to-central
// conversion loses nothing measurable.
class ShiftedBlock {
 public:
  explicit ShiftedBlock(double shift) noexcept : shift_(shift) {}

  void add(double x) noexcept {
    const double y = x - shift_;
    const double y2 = y * y;
    s1_ += y;
    s2_ += y2;
    s3_ += y2 * y;
    s4_ += y2 * y2;
    lo_ = std::min(lo_, x);
    hi_ = std::max(hi_, x);
    n_ += 1;
  }

  std::uint64_t size() const noexcept { return n_; }

  void flush_into(MomentAccumulator& acc) noexcept {
    if (n_ == 0) return;
    const double n = static_cast<double>(n_);
    const double m = s1_ / n;
    const double m2 = s2_ - n * m * m;
    const double m3 = s3_ - 3.0 * m * s2_ + 2.0 * n * m * m * m;
    const double m4 = s4_ - 4.0 * m * s3_ + 6.0 * m * m * s2_ - 3.0 * n * m * m * m * m;
    acc.merge_central(n, shift_ + m, std::max(m2, 0.0), m3, std::max(m4, 0.0), lo_, hi_);
    *this = ShiftedBlock(shift_);
  }

 private:
  double shift_;
  double s1_ = 0.0, s2_ = 0.0, s3_ = 0.0, s4_ = 0.0;
  double lo_ = std::numeric_limits<double>::infinity();
  double hi_ = -std::numeric_limits<double>::infinity();
  std::uint64_t n_ = 0;
};

}  // namespace tgbtsp
