#include "p2stc/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace p2stc {

unsigned diversity_bound(unsigned l_blocks, unsigned n_tx, Rational rate) {
  if (l_blocks < 1 || n_tx < 1) throw std::invalid_argument("diversity_bound: L and N must be positive");
  if (rate.num <= 0 || rate.num > rate.den) throw std::invalid_argument("diversity_bound: rate must be in (0, 1]");
  const std::int64_t numer = std::int64_t{l_blocks} * n_tx * (rate.den - rate.num);
  return static_cast<unsigned>(1 + numer / rate.den);
}

DiversityEstimate estimate_diversity(const std::vector<CurvePoint>& curve, double fer_high, double fer_low) {
  DiversityEstimate est;
  for (const auto& p : curve) {
    if (!(p.fer > 0.0) || !(p.fer < fer_high) || !(p.fer > fer_low)) continue;
    if (p.frames > 0 && !(p.fer > 10.0 / static_cast<double>(p.frames))) continue;
    est.fit_points.push_back(p);
  }
  if (est.fit_points.size() < 2)
    throw std::invalid_argument("estimate_diversity: fewer than two statistically resolved points in the fit window");

  const double n = static_cast<double>(est.fit_points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : est.fit_points) {
    const double y = std::log10(p.fer);
    sx += p.eb_n0_db;
    sy += y;
    sxx += p.eb_n0_db * p.eb_n0_db;
    sxy += p.eb_n0_db * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0)) throw std::invalid_argument("estimate_diversity: fit points share one Eb/N0");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0;
  for (const auto& p : est.fit_points) {
    const double r = std::log10(p.fer) - (intercept + slope * p.eb_n0_db);
    ss += r * r;
  }
  est.order = -10.0 * slope;
  est.residual = std::sqrt(ss / n);
  est.flat = std::abs(est.order) < 0.1;
  return est;
}

std::vector<CurvePoint> fer_curve(const SimResult& result) {
  std::vector<CurvePoint> out;
  for (const auto& p : result.points) out.push_back(CurvePoint{p.eb_n0_db, p.fer(), p.counts.frames});
  return out;
}

double analytic_ber(ChannelKind kind, double eb_n0_db) {
  const double g = std::pow(10.0, eb_n0_db / 10.0);
  if (kind == ChannelKind::awgn) return 0.5 * std::erfc(std::sqrt(g));
  return 0.5 * (1.0 - std::sqrt(g / (1.0 + g)));
}

double snr_at_ber(const std::vector<std::pair<double, double>>& db_ber, double target) {
  for (std::size_t i = 1; i < db_ber.size(); ++i) {
    const auto [x0, y0] = db_ber[i - 1];
    const auto [x1, y1] = db_ber[i];
    if (y0 >= target && y1 <= target && y0 > 0 && y1 > 0) {
      if (y0 == y1) return x0;
      const double l0 = std::log10(y0), l1 = std::log10(y1), lt = std::log10(target);
      return x0 + (lt - l0) / (l1 - l0) * (x1 - x0);
    }
  }
  throw std::invalid_argument("snr_at_ber: curve never crosses the target");
}

PairedComparison paired_compare(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                                std::size_t bits_per_frame) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("paired_compare: unequal or empty samples");
  const double n = static_cast<double>(a.size());
  const double bits = static_cast<double>(bits_per_frame);
  double sa = 0, sb = 0, sd = 0, sdd = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (static_cast<double>(a[i]) - static_cast<double>(b[i])) / bits;
    sa += a[i];
    sb += b[i];
    sd += d;
    sdd += d * d;
  }
  PairedComparison c;
  c.mean_a = sa / (n * bits);
  c.mean_b = sb / (n * bits);
  c.diff = sd / n;
  const double var = n > 1 ? (sdd - n * c.diff * c.diff) / (n - 1) : 0.0;
  c.std_err = std::sqrt(std::max(0.0, var) / n);
  return c;
}

std::vector<BetaSweepRow> sweep_beta(const SimScenario& scenario, const std::vector<double>& beta_grid,
                                     std::uint64_t frames_per_point) {
  if (beta_grid.empty()) throw std::invalid_argument("sweep_beta: empty beta grid");
  std::vector<std::unique_ptr<Link>> links;
  std::vector<const Link*> ptrs;
  for (double beta : beta_grid) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("sweep_beta: beta outside [0, 1]");
    auto sc = scenario;
    sc.metric.beta = beta;
    sc.metric.beta_rule = BetaRule::fixed;
    links.push_back(std::make_unique<Link>(sc));
    ptrs.push_back(links.back().get());
  }
  std::vector<BetaSweepRow> rows;
  for (std::size_t pi = 0; pi < scenario.eb_n0_db.size(); ++pi) {
    const double db = scenario.eb_n0_db[pi];
    auto errors = run_paired(ptrs, db, pi, frames_per_point, scenario.workers);
    for (std::size_t k = 0; k < beta_grid.size(); ++k) {
      BetaSweepRow row;
      row.beta = beta_grid[k];
      row.eb_n0_db = db;
      row.frames = frames_per_point;
      for (auto e : errors[k]) {
        row.bit_errors += e;
        row.frame_errors += e > 0;
      }
      const auto bits = frames_per_point * links[k]->info_bits();
      row.ber = bits ? static_cast<double>(row.bit_errors) / static_cast<double>(bits) : 0.0;
      row.ci = wilson_interval(row.bit_errors, bits);
      row.per_frame = std::move(errors[k]);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

const BetaSweepRow& argmin_beta(const std::vector<BetaSweepRow>& rows, double eb_n0_db) {
  const BetaSweepRow* best = nullptr;
  for (const auto& r : rows)
    if (r.eb_n0_db == eb_n0_db && (!best || r.ber < best->ber)) best = &r;
  if (!best) throw std::invalid_argument("argmin_beta: no rows at the requested Eb/N0");
  return *best;
}

PuncturingMatrix embed_pattern(const std::vector<std::string>& block, unsigned period, unsigned offset) {
  if (block.empty() || block.front().size() + offset > period)
    throw std::invalid_argument("embed_pattern: pattern does not fit in the period");
  std::vector<std::string> rows(block.size(), std::string(period, '1'));
  for (std::size_t i = 0; i < block.size(); ++i) rows[i].replace(offset, block[i].size(), block[i]);
  return PuncturingMatrix(std::move(rows));
}

std::vector<PatternCandidate> enumerate_basic_patterns(unsigned n_tx, unsigned n_zeros, unsigned max_width,
                                                       unsigned period, unsigned offset) {
  if (n_tx == 0 || n_zeros == 0 || max_width == 0) throw std::invalid_argument("pattern search: empty search space");
  if (n_zeros > n_tx * max_width) throw std::invalid_argument("pattern search: more zeros than cells");
  std::vector<PatternCandidate> out;
  for (unsigned w = 1; w <= max_width; ++w) {
    const unsigned cells = n_tx * w;
    if (cells > 24 || n_zeros > cells) continue;
    for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
      if (static_cast<unsigned>(std::popcount(mask)) != n_zeros) continue;
      // cell index = column * n_tx + row
      const std::uint32_t col_bits = (1u << n_tx) - 1;
      if (!(mask & col_bits) || !((mask >> ((w - 1) * n_tx)) & col_bits)) continue;
      std::vector<std::string> block(n_tx, std::string(w, '1'));
      for (unsigned c = 0; c < w; ++c)
        for (unsigned r = 0; r < n_tx; ++r)
          if ((mask >> (c * n_tx + r)) & 1u) block[r][c] = '0';
      try {
        auto embedded = embed_pattern(block, period, offset);
        const auto map = spanning_map(embedded);
        out.push_back(PatternCandidate{block, w, map.delta(), std::move(embedded)});
      } catch (const std::invalid_argument&) {
        // violates the two-transition limit or silences a row
      }
    }
  }
  return out;
}

std::vector<PatternScore> search_patterns(unsigned n_tx, unsigned n_zeros, unsigned max_width,
                                          const SimScenario& scenario, const std::vector<double>& beta_grid,
                                          std::uint64_t frames, unsigned period) {
  if (scenario.eb_n0_db.empty()) throw std::invalid_argument("search_patterns: scenario needs an Eb/N0 point");
  auto candidates = enumerate_basic_patterns(n_tx, n_zeros, max_width, period);
  std::vector<PatternScore> scores;
  for (auto& cand : candidates) {
    auto sc = scenario;
    sc.matrix = cand.embedded.str();
    sc.eb_n0_db = {scenario.eb_n0_db.front()};
    std::vector<BetaSweepRow> rows;
    try {
      rows = sweep_beta(sc, beta_grid, frames);
    } catch (const std::invalid_argument&) {
      continue;  // frame length incompatible with this placement
    }
    const auto& best = argmin_beta(rows, sc.eb_n0_db.front());
    scores.push_back(
        PatternScore{std::move(cand), best.beta, best.ber, best.ci, best.frames, best.bit_errors, best.frame_errors});
  }
  if (scores.empty()) throw std::invalid_argument("search_patterns: no feasible placements");
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.ber < b.ber; });
  return scores;
}

PositionCheck position_invariance(const std::vector<std::string>& block, unsigned offset_a, unsigned offset_b,
                                  const SimScenario& scenario, std::uint64_t frames, unsigned period) {
  if (scenario.eb_n0_db.empty()) throw std::invalid_argument("position_invariance: scenario needs an Eb/N0 point");
  auto sa = scenario;
  auto sb = scenario;
  sa.matrix = embed_pattern(block, period, offset_a).str();
  sb.matrix = embed_pattern(block, period, offset_b).str();
  const Link la(sa), lb(sb);
  const auto errors = run_paired({&la, &lb}, scenario.eb_n0_db.front(), 0, frames, scenario.workers);
  PositionCheck check;
  check.comparison = paired_compare(errors[0], errors[1], la.info_bits());
  check.within_3_sigma = std::abs(check.comparison.diff) <= 3.0 * check.comparison.std_err;
  return check;
}

}  // namespace p2stc
