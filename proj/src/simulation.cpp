#include "p2stc/simulation.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "p2stc/config.hpp"
#include "p2stc/rng.hpp"

namespace p2stc {

namespace {

PuncturingMatrix scenario_matrix(const SimScenario& sc, unsigned n_tx) {
  if (sc.matrix.empty() || sc.matrix == "identity") return PuncturingMatrix::identity(n_tx);
  return resolve_matrix(sc.matrix);
}

template <typename Fn>
void parallel_for_workers(unsigned workers, Fn&& body) {
  if (workers <= 1) {
    body();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
}

}  // namespace

std::size_t default_frame_info_bits(unsigned n_tx) {
  switch (n_tx) {
    case 2: return 130;
    case 3: return 120;
    default: return 128;
  }
}

Link::Link(const SimScenario& scenario)
    : scenario_(scenario),
      code_(ConvCode::from_octal(scenario.generators)),
      trellis_(code_),
      matrix_(scenario_matrix(scenario, code_.n_outputs())),
      rate_(punctured_rate(matrix_)),
      info_bits_(scenario.frame_info_bits ? scenario.frame_info_bits : default_frame_info_bits(code_.n_outputs())) {
  if (matrix_.rows() != code_.n_outputs())
    throw std::invalid_argument("scenario '" + scenario.id + "': matrix has " + std::to_string(matrix_.rows()) +
                                " rows but the code has " + std::to_string(code_.n_outputs()) + " outputs");
  if (scenario.n_rx == 0 || scenario.l_blocks == 0)
    throw std::invalid_argument("scenario '" + scenario.id + "': n_rx and L must be positive");
  layout_ = build_layout(matrix_, info_bits_ + code_.memory());
  if (layout_.n_symbols() % scenario.l_blocks != 0)
    throw std::invalid_argument("scenario '" + scenario.id + "': " + std::to_string(layout_.n_symbols()) +
                                " super-symbols per frame not divisible by L=" + std::to_string(scenario.l_blocks));
  schedule_ = build_schedule(layout_, scenario.metric);
}

ChannelConfig Link::channel(double eb_n0_db) const {
  const auto e = eb_n0_to_es(eb_n0_db, rate_, n_tx());
  ChannelConfig cfg;
  cfg.n_tx = n_tx();
  cfg.n_rx = scenario_.n_rx;
  cfg.n_blocks = scenario_.l_blocks;
  cfg.es_per_antenna = e.es_per_antenna;
  cfg.n0 = scenario_.noiseless ? 0.0 : e.n0;
  return cfg;
}

Link::Frame Link::make_frame(double eb_n0_db, std::uint64_t point, std::uint64_t frame) const {
  const auto seed = scenario_.seed;
  auto info_rng = derive_stream({seed, point, frame, static_cast<std::uint64_t>(StreamPurpose::info_bits)});
  auto fade_rng = derive_stream({seed, point, frame, static_cast<std::uint64_t>(StreamPurpose::fading)});
  auto noise_rng = derive_stream({seed, point, frame, static_cast<std::uint64_t>(StreamPurpose::noise)});

  Frame f;
  f.info.resize(info_bits_);
  for (auto& b : f.info) b = static_cast<std::uint8_t>(info_rng() >> 63);
  const auto cfg = channel(eb_n0_db);
  const auto symbols = map_to_supersymbols(apply_puncture(encode(code_, f.info, true), matrix_), n_tx());
  const auto realization = sample_realization(cfg, fade_rng);
  f.rx = transmit(symbols, realization, cfg, noise_rng);
  return f;
}

unsigned Link::run_frame(ViterbiDecoder& decoder, double eb_n0_db, std::uint64_t point, std::uint64_t frame) const {
  const auto f = make_frame(eb_n0_db, point, frame);
  const auto decoded = decoder.decode(f.rx);
  unsigned errors = 0;
  for (std::size_t i = 0; i < info_bits_; ++i) errors += decoded.info_bits[i] != f.info[i];
  return errors;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The interval endpoints are exact at the boundaries; avoid rounding residue there.
  const double low = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

double PointResult::ber() const {
  const auto bits = counts.frames * info_bits_per_frame;
  return bits ? static_cast<double>(counts.bit_errors) / static_cast<double>(bits) : 0.0;
}

double PointResult::fer() const {
  return counts.frames ? static_cast<double>(counts.frame_errors) / static_cast<double>(counts.frames) : 0.0;
}

Interval PointResult::ber_ci() const { return wilson_interval(counts.bit_errors, counts.frames * info_bits_per_frame); }

PointResult simulate_point(const Link& link, double eb_n0_db, std::uint64_t point_index) {
  const auto& sc = link.scenario();
  if (sc.max_frames == 0) throw std::invalid_argument("simulate: max_frames must be positive");
  const std::uint64_t batch = std::max<std::size_t>(1, sc.batch_frames);
  const std::uint64_t n_batches = (sc.max_frames + batch - 1) / batch;

  std::vector<PointCounts> done(n_batches);
  std::vector<bool> finished(n_batches, false);
  std::mutex mu;
  std::atomic<std::uint64_t> next_batch{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;

  auto prefix_satisfied = [&] {
    PointCounts acc;
    for (std::uint64_t b = 0; b < n_batches && finished[b]; ++b) {
      acc += done[b];
      if (acc.frame_errors >= sc.min_frame_errors) return true;
    }
    return false;
  };

  parallel_for_workers(sc.workers, [&] {
    try {
      auto decoder = link.make_decoder();
      while (!stop.load()) {
        const auto b = next_batch.fetch_add(1);
        if (b >= n_batches) break;
        PointCounts c;
        const auto first = b * batch;
        const auto last = std::min(sc.max_frames, first + batch);
        for (auto fr = first; fr < last; ++fr) {
          const auto errors = link.run_frame(decoder, eb_n0_db, point_index, fr);
          ++c.frames;
          c.bit_errors += errors;
          c.frame_errors += errors > 0;
        }
        std::lock_guard lock(mu);
        done[b] = c;
        finished[b] = true;
        if (prefix_satisfied()) stop = true;
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  });
  if (failure) std::rethrow_exception(failure);

  PointResult res;
  res.eb_n0_db = eb_n0_db;
  res.info_bits_per_frame = link.info_bits();
  for (std::uint64_t b = 0; b < n_batches && finished[b]; ++b) {
    res.counts += done[b];
    if (res.counts.frame_errors >= sc.min_frame_errors) {
      res.stopped_on_errors = true;
      break;
    }
  }
  return res;
}

SimResult run_scenario(const SimScenario& scenario) {
  const auto start = std::chrono::steady_clock::now();
  const Link link(scenario);
  SimResult result;
  result.id = scenario.id;
  result.beta_label = beta_label(scenario.metric);
  result.seed = scenario.seed;
  result.scenario_hash = scenario_hash(scenario);
  for (std::size_t i = 0; i < scenario.eb_n0_db.size(); ++i)
    result.points.push_back(simulate_point(link, scenario.eb_n0_db[i], i));
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<std::vector<std::uint32_t>> run_paired(const std::vector<const Link*>& links, double eb_n0_db,
                                                   std::uint64_t point_index, std::uint64_t n_frames,
                                                   unsigned workers) {
  std::vector<std::vector<std::uint32_t>> errors(links.size(), std::vector<std::uint32_t>(n_frames, 0));
  if (links.empty() || n_frames == 0) return errors;
  for (const auto* l : links)
    if (l->info_bits() != links.front()->info_bits() || l->n_tx() != links.front()->n_tx() ||
        l->scenario().seed != links.front()->scenario().seed)
      throw std::invalid_argument("run_paired: links must share info length, antenna count and seed");

  // Links that transmit identically (they differ only in the decoder metric)
  // share one generated frame.
  std::vector<std::size_t> source(links.size());
  for (std::size_t k = 0; k < links.size(); ++k) {
    source[k] = k;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& a = links[j]->scenario();
      const auto& b = links[k]->scenario();
      if (a.generators == b.generators && links[j]->matrix() == links[k]->matrix() && a.n_rx == b.n_rx &&
          a.l_blocks == b.l_blocks && a.noiseless == b.noiseless) {
        source[k] = source[j];
        break;
      }
    }
  }

  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  parallel_for_workers(workers, [&] {
    try {
      std::vector<ViterbiDecoder> decoders;
      decoders.reserve(links.size());
      for (const auto* l : links) decoders.push_back(l->make_decoder());
      for (;;) {
        const auto first = next.fetch_add(kChunk);
        if (first >= n_frames) break;
        const auto last = std::min(n_frames, first + kChunk);
        std::vector<Link::Frame> frames(links.size());
        for (auto fr = first; fr < last; ++fr)
          for (std::size_t k = 0; k < links.size(); ++k) {
            if (source[k] == k) frames[k] = links[k]->make_frame(eb_n0_db, point_index, fr);
            const auto& f = frames[source[k]];
            const auto decoded = decoders[k].decode(f.rx);
            std::uint32_t e = 0;
            for (std::size_t i = 0; i < f.info.size(); ++i) e += decoded.info_bits[i] != f.info[i];
            errors[k][fr] = e;
          }
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      next = n_frames;
    }
  });
  if (failure) std::rethrow_exception(failure);
  return errors;
}

std::string beta_label(const MetricConfig& cfg) {
  if (cfg.beta_rule == BetaRule::rule_of_thumb) return "rule";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, cfg.beta);
  return std::string(buf, res.ptr);
}

}  // namespace p2stc
