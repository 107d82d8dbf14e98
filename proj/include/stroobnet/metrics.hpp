#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stroobnet/error.hpp"
#include "stroobnet/network.hpp"

namespace stroobnet {

enum class HistogramSource { Original, Inserted, Combined };

constexpr std::string_view to_string(HistogramSource s) {
  switch (s) {
    case HistogramSource::Original: return "original";
    case HistogramSource::Inserted: return "inserted";
    case HistogramSource::Combined: return "combined";
  }
  return "original";
}

struct DegreeHistogram {
  std::vector<std::size_t> bin_edges;  // bin b is [edges[b], edges[b+1])
  std::vector<std::size_t> counts;
  HistogramSource source = HistogramSource::Original;

  friend bool operator==(const DegreeHistogram&, const DegreeHistogram&) = default;
};

/// Integer bins of width bin_width from 0 up to the bin holding the largest
/// degree.
inline DegreeHistogram degree_histogram(std::span<const std::size_t> degrees, std::size_t bin_width,
                                        HistogramSource source = HistogramSource::Original) {
  if (bin_width < 1) throw Error(ErrorCode::ValidationError, "bin_width must be >= 1");
  if (degrees.empty()) throw Error(ErrorCode::EmptyInput, "degrees");
  const std::size_t max_degree = *std::max_element(degrees.begin(), degrees.end());
  const std::size_t bins = max_degree / bin_width + 1;
  DegreeHistogram h;
  h.source = source;
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) h.bin_edges.push_back(b * bin_width);
  for (auto d : degrees) ++h.counts[d / bin_width];
  return h;
}

struct CoverageStats {
  std::size_t observed = 0;
  std::size_t unobserved = 0;
  double fraction_observed = 0.0;

  friend bool operator==(const CoverageStats&, const CoverageStats&) = default;
};

inline CoverageStats coverage_stats(const NetworkState& state) {
  CoverageStats s;
  s.observed = state.observed().size();
  s.unobserved = state.unobserved().size();
  const std::size_t total = s.observed + s.unobserved;
  s.fraction_observed = total == 0 ? 0.0 : static_cast<double>(s.observed) / static_cast<double>(total);
  return s;
}

struct ShiftSummary {
  double mean_before = 0.0;
  double mean_after = 0.0;
  double median_before = 0.0;
  double median_after = 0.0;
  double skewness_before = 0.0;
  double skewness_after = 0.0;
  std::optional<double> inserted_mean;
};

struct SampleStats {
  double mean = 0.0;
  double median = 0.0;
  double skewness = 0.0;
};

/// Mean, median and adjusted Fisher-Pearson skewness G1. Skewness is reported
/// as 0 for fewer than three samples or zero variance.
inline SampleStats sample_stats(std::vector<double> xs) {
  SampleStats s;
  const auto n = static_cast<double>(xs.size());
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / n;
  const std::size_t mid = xs.size() / 2;
  s.median = xs.size() % 2 == 1 ? xs[mid] : (xs[mid - 1] + xs[mid]) / 2.0;
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (xs.size() >= 3 && m2 > 0.0) {
    const double g1 = m3 / std::pow(m2, 1.5);
    s.skewness = std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
  }
  return s;
}

inline ShiftSummary shift_summary(std::span<const std::size_t> before,
                                  std::span<const std::size_t> inserted) {
  if (before.empty()) throw Error(ErrorCode::EmptyBefore, "before");
  std::vector<double> b(before.begin(), before.end());
  std::vector<double> after = b;
  after.insert(after.end(), inserted.begin(), inserted.end());
  const auto sb = sample_stats(std::move(b));
  const auto sa = sample_stats(std::move(after));
  ShiftSummary out{sb.mean, sa.mean, sb.median, sa.median, sb.skewness, sa.skewness, std::nullopt};
  if (!inserted.empty()) {
    out.inserted_mean = sample_stats(std::vector<double>(inserted.begin(), inserted.end())).mean;
  }
  return out;
}

}  // namespace stroobnet
