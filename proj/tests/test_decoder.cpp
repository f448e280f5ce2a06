#include <cmath>
#include <random>

#include "doctest.h"
#include "p2stc/decoder.hpp"

using namespace p2stc;

namespace {

struct Setup {
  ConvCode code;
  Trellis trellis;
  PuncturingMatrix matrix;
  std::size_t n_info;
  SymbolLayout layout;

  Setup(const char* gens, PuncturingMatrix m, std::size_t k)
      : code(ConvCode::from_octal(gens)),
        trellis(code),
        matrix(std::move(m)),
        n_info(k),
        layout(build_layout(matrix, k + code.memory())) {}

  struct Sample {
    Bits info;
    ReceivedFrame rx;
    std::vector<cplx> noise;
  };

  Sample draw(std::uint64_t seed, double n0, unsigned n_rx = 1, unsigned l = 1) const {
    auto rng = derive_stream({seed});
    Sample out;
    out.info.resize(n_info);
    for (auto& b : out.info) b = static_cast<std::uint8_t>(rng() & 1u);
    const auto frame = map_to_supersymbols(apply_puncture(encode(code, out.info), matrix), code.n_outputs());
    ChannelConfig cfg{code.n_outputs(), n_rx, l, 1.0 / code.n_outputs(), n0};
    const auto h = sample_realization(cfg, rng);
    out.rx = transmit(frame, h, cfg, rng);
    auto clean_cfg = cfg;
    clean_cfg.n0 = 0.0;
    auto dummy = derive_stream({0});
    const auto clean = transmit(frame, h, clean_cfg, dummy);
    for (std::size_t i = 0; i < clean.samples.size(); ++i) out.noise.push_back(out.rx.samples[i] - clean.samples[i]);
    return out;
  }

  ViterbiDecoder decoder(const MetricSchedule& s) const { return ViterbiDecoder(trellis, s); }
};

MetricConfig fixed(MetricMode mode, double beta) { return MetricConfig{mode, beta, BetaRule::fixed}; }

SymbolObservation single(const std::vector<cplx>& r, const std::vector<cplx>& alpha, unsigned n, double es) {
  return SymbolObservation{r, alpha, n, es};
}

}  // namespace

TEST_CASE("metric mode names") {
  for (auto m : {MetricMode::exact, MetricMode::split_min, MetricMode::type1, MetricMode::type2})
    CHECK(parse_metric_mode(to_string(m)) == m);
  CHECK_THROWS(parse_metric_mode("type3"));
  CHECK_THROWS(fixed(MetricMode::type1, 1.5).validate());
}

TEST_CASE("exact increment") {
  const std::vector<cplx> r1{1.0}, a1{1.0};
  const std::vector<std::int8_t> zero{0}, one{1};
  CHECK(exact_increment(single(r1, a1, 1, 1.0), zero) == doctest::Approx(4.0));
  CHECK(exact_increment(single(r1, a1, 1, 1.0), one) == doctest::Approx(0.0));

  // Jointly permuting antennas and fading rows leaves the metric unchanged.
  const std::vector<cplx> r{cplx(0.3, -0.2), cplx(1.1, 0.4)};
  const std::vector<cplx> a{cplx(0.5, 0.1), cplx(-0.7, 0.2), cplx(0.9, -0.3), cplx(0.2, 0.8)};
  const std::vector<cplx> a_swapped{a[2], a[3], a[0], a[1]};
  const std::vector<std::int8_t> b{1, 0}, b_swapped{0, 1};
  CHECK(exact_increment(single(r, a, 2, 0.5), b) ==
        doctest::Approx(exact_increment(single(r, a_swapped, 2, 0.5), b_swapped)));
  // Noiseless reception of the hypothesis itself.
  const double amp = std::sqrt(0.5);
  const std::vector<cplx> clean{(a[0] - a[2]) * amp, (a[1] - a[3]) * amp};
  CHECK(exact_increment(single(clean, a, 2, 0.5), b) == doctest::Approx(0.0));
  const std::vector<std::int8_t> unk{kUnknownBit, 0};
  CHECK_THROWS(exact_increment(single(r, a, 2, 0.5), unk));
  CHECK_THROWS(exact_increment(single(r, a, 2, 0.5), std::vector<std::int8_t>{1}));
}

TEST_CASE("left and right increments") {
  const std::vector<cplx> r0{0.0}, a11{1.0, 1.0};
  const std::vector<std::int8_t> left{1, kUnknownBit};
  CHECK(left_increment(single(r0, a11, 2, 1.0), left, 0.5) == doctest::Approx(0.0));

  const std::vector<cplx> r3{cplx(0.4, 0.1)};
  const double w1 = left_increment(single(r3, a11, 2, 1.0), left, 1.0);
  CHECK(left_increment(single(r3, a11, 2, 1.0), left, 0.3) == doctest::Approx(0.3 * w1));

  const std::vector<cplx> r2{2.0};
  const std::vector<std::int8_t> pp{1, 1}, pm{1, 0};
  CHECK(right_increment(single(r2, a11, 2, 1.0), pp, 0.7) == doctest::Approx(0.0));
  CHECK(right_increment(single(r2, a11, 2, 1.0), pm, 0.7) == doctest::Approx(0.7 * 4.0));
  CHECK(right_increment(single(r2, a11, 2, 1.0), pm, 0.0) == 0.0);
  CHECK_THROWS_AS(right_increment(single(r2, a11, 2, 1.0), left, 0.5), std::logic_error);
}

TEST_CASE("beta rule of thumb") {
  CHECK(rule_of_thumb_beta(2, 1, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(rule_of_thumb_beta(1, 1, 2) == doctest::Approx(0.5));
  CHECK(rule_of_thumb_beta(2, 0, 2) == 0.0);
  CHECK_THROWS(rule_of_thumb_beta(1, 1, 0));
}

TEST_CASE("type-2 weights") {
  auto w = compute_type2_weights(0.0, 3);
  CHECK(w.omega_a == doctest::Approx(1.0));
  CHECK(w.omega_b == doctest::Approx(0.0));
  w = compute_type2_weights(0.5, 3);
  CHECK(w.omega_a == doctest::Approx(0.75));
  CHECK(w.omega_b == doctest::Approx(0.75));
  w = compute_type2_weights(1.0, 3);
  CHECK(w.omega_a == doctest::Approx(0.0));
  CHECK(w.omega_b == doctest::Approx(3.0));
  for (unsigned d = 1; d <= 6; ++d)
    for (int k = 0; k <= 10; ++k) {
      const auto x = compute_type2_weights(k / 10.0, d);
      CHECK(std::abs(d * x.omega_a + x.omega_b - d) < 1e-12);
    }
  // At δ=1 the weights reduce to (1−β, β).
  w = compute_type2_weights(0.3, 1);
  CHECK(w.omega_a == doctest::Approx(0.7));
  CHECK(w.omega_b == doctest::Approx(0.3));
  CHECK_THROWS(compute_type2_weights(0.5, 0));
}

TEST_CASE("schedule for the three-symbol event") {
  const auto layout = build_layout(catalog_lookup("Eq9"), 12);
  const auto s1 = build_schedule(layout, fixed(MetricMode::type1, 0.4));
  auto roles = [&](const MetricSchedule& s, std::size_t t) {
    std::vector<std::pair<Role, std::uint32_t>> out;
    for (const auto& c : s.transitions[t]) out.emplace_back(c.role, c.symbol);
    std::sort(out.begin(), out.end());
    return out;
  };
  using V = std::vector<std::pair<Role, std::uint32_t>>;
  CHECK(roles(s1, 0) == V{{Role::full, 0}});
  CHECK(roles(s1, 1) == V{{Role::left, 1}});
  CHECK(roles(s1, 2) == V{{Role::left, 2}, {Role::right, 1}});
  CHECK(roles(s1, 3) == V{{Role::left, 3}, {Role::right, 2}});
  CHECK(roles(s1, 4) == V{{Role::right, 3}});
  CHECK(roles(s1, 5) == V{{Role::full, 4}});
  for (const auto& c : s1.transitions[2])
    CHECK(c.weight == doctest::Approx(c.role == Role::left ? 0.6 : 0.4));

  const auto s2 = build_schedule(layout, fixed(MetricMode::type2, 0.4));
  CHECK(roles(s2, 1) == V{{Role::left, 1}});
  CHECK(roles(s2, 2) == V{{Role::left, 2}});
  CHECK(roles(s2, 3) == V{{Role::left, 3}});
  CHECK(roles(s2, 4) == V{{Role::right, 3}});
  const auto w = compute_type2_weights(0.4, 3);
  CHECK(s2.transitions[1][0].weight == doctest::Approx(w.omega_a));
  CHECK(s2.transitions[4][0].weight == doctest::Approx(w.omega_b));

  const auto sm = build_schedule(layout, fixed(MetricMode::split_min, 0.4));
  CHECK(roles(sm, 2) == V{{Role::left, 2}, {Role::right_min, 1}});

  CHECK_THROWS_AS(build_schedule(layout, fixed(MetricMode::exact, 0.5)), std::invalid_argument);
}

TEST_CASE("unpunctured schedules are all full in every mode") {
  const auto layout = build_layout(PuncturingMatrix::identity(2), 20);
  for (auto m : {MetricMode::exact, MetricMode::split_min, MetricMode::type1, MetricMode::type2}) {
    const auto s = build_schedule(layout, fixed(m, 0.3));
    for (std::size_t t = 0; t < 20; ++t) {
      REQUIRE(s.transitions[t].size() == 1);
      CHECK(s.transitions[t][0].role == Role::full);
      CHECK(s.transitions[t][0].symbol == t);
    }
  }
}

TEST_CASE("weight conservation and causality over the catalog") {
  for (const auto& e : catalog()) {
    CAPTURE(e.name);
    const auto layout = build_layout(e.matrix, 2 * e.matrix.period() * e.matrix.rows());
    const auto events = spanning_events(layout);
    for (auto m : {MetricMode::split_min, MetricMode::type1, MetricMode::type2}) {
      for (auto cfg : {fixed(m, 0.35), MetricConfig{m, 0.5, BetaRule::rule_of_thumb}}) {
        const auto s = build_schedule(layout, cfg);
        const auto w = symbol_weights(s);
        if (m != MetricMode::type2) {
          for (double x : w) CHECK(x == doctest::Approx(1.0));
        } else {
          for (const auto& ev : events) {
            double sum = 0.0;
            for (unsigned k = 0; k < ev.delta; ++k) sum += w[ev.first_symbol + k];
            CHECK(sum == doctest::Approx(static_cast<double>(ev.delta)));
          }
        }
        for (std::size_t t = 0; t < s.n_transitions(); ++t)
          for (const auto& c : s.transitions[t])
            if (c.role == Role::right) CHECK(c.partner < t);
      }
    }
  }
}

TEST_CASE("noiseless decoding recovers the information") {
  const Setup unp("133,171", PuncturingMatrix::identity(2), 40);
  auto dec = unp.decoder(build_schedule(unp.layout, fixed(MetricMode::exact, 0.5)));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = unp.draw(seed, 0.0);
    const auto r = dec.decode(s.rx);
    CHECK(r.info_bits == s.info);
    CHECK(r.metric == doctest::Approx(0.0));
  }

  const Setup eq5("5,7", catalog_lookup("Eq5"), 42);
  for (double beta : {0.2, 0.5, 0.8}) {
    auto d = eq5.decoder(build_schedule(eq5.layout, fixed(MetricMode::type1, beta)));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto s = eq5.draw(1000 + seed, 0.0);
      REQUIRE(d.decode(s.rx).info_bits == s.info);
    }
  }

  const Setup t2("133,145,175", catalog_lookup("TableII-10/18"), 63);
  for (auto m : {MetricMode::split_min, MetricMode::type1, MetricMode::type2}) {
    auto d = t2.decoder(build_schedule(t2.layout, MetricConfig{m, 0.5, BetaRule::rule_of_thumb}));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = t2.draw(2000 + seed, 0.0, 2);
      CHECK(d.decode(s.rx).info_bits == s.info);
    }
  }
}

TEST_CASE("exact metric of the transmitted path is the noise energy") {
  const Setup unp("133,171", PuncturingMatrix::identity(2), 60);
  const auto sched = build_schedule(unp.layout, fixed(MetricMode::exact, 0.5));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = unp.draw(seed, 0.8, seed % 3 + 1, seed % 2 ? 2 : 1);
    double energy = 0.0;
    for (const auto& z : s.noise) energy += std::norm(z);
    const double m = path_metric(sched, unp.layout, unp.code, s.rx, s.info);
    CHECK(std::abs(m - energy) <= 1e-9 * energy);
  }
}

TEST_CASE("decoder metric equals the reference path metric of its output") {
  struct Case {
    const char* gens;
    const char* matrix;
    std::size_t k;
  };
  for (const auto& c : {Case{"5,7", "Eq5", 42}, Case{"133,171", "Eq9", 49}, Case{"133,171", "TableI-5/8", 64},
                        Case{"133,145,175", "TableII-10/21", 64}, Case{"5,7", "101011/110111", 46}}) {
    CAPTURE(c.matrix);
    const Setup st(c.gens, resolve_matrix(c.matrix), c.k);
    for (auto m : {MetricMode::split_min, MetricMode::type1, MetricMode::type2}) {
      for (auto cfg : {fixed(m, 0.3), MetricConfig{m, 0.5, BetaRule::rule_of_thumb}}) {
        const auto sched = build_schedule(st.layout, cfg);
        auto dec = st.decoder(sched);
        for (std::uint64_t seed = 0; seed < 15; ++seed) {
          const auto s = st.draw(seed, 1.0);
          const auto r = dec.decode(s.rx);
          const double ref = path_metric(sched, st.layout, st.code, s.rx, r.info_bits);
          CHECK(std::abs(r.metric - ref) <= 1e-9 * std::max(1.0, ref));
        }
      }
    }
  }
}

TEST_CASE("survivor term depth beyond one transition") {
  // The middle column is fully erased, so one symbol joins transitions two apart.
  const auto m = parse_matrix("101/100");
  const auto layout = build_layout(m, 30);
  bool found = false;
  for (std::size_t s = 0; s < layout.n_symbols(); ++s)
    if (layout.last_transition(s) - layout.first_transition(s) == 2) found = true;
  CHECK(found);
  const Setup st("5,7", m, 28);
  const auto sched = build_schedule(st.layout, fixed(MetricMode::type1, 0.5));
  auto dec = st.decoder(sched);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto noisy = st.draw(seed, 0.7);
    const auto r = dec.decode(noisy.rx);
    CHECK(r.metric == doctest::Approx(path_metric(sched, st.layout, st.code, noisy.rx, r.info_bits)));
    CHECK(st.decoder(sched).decode(st.draw(seed, 0.0).rx).info_bits == st.draw(seed, 0.0).info);
  }
}

TEST_CASE("type-1 with minimized right terms at beta one half is split-min") {
  const Setup st("133,171", catalog_lookup("Eq9"), 49);
  const auto sm = build_schedule(st.layout, fixed(MetricMode::split_min, 0.5));
  auto t1 = build_schedule(st.layout, fixed(MetricMode::type1, 0.5));
  for (auto& terms : t1.transitions)
    for (auto& c : terms)
      if (c.role == Role::right) c.role = Role::right_min;
  auto a = st.decoder(sm);
  auto b = st.decoder(t1);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = st.draw(seed, 1.5);
    const auto ra = a.decode(s.rx);
    const auto rb = b.decode(s.rx);
    REQUIRE(ra.info_bits == rb.info_bits);
    CHECK(ra.metric == doctest::Approx(rb.metric));
  }
}

TEST_CASE("beta zero drops the right terms") {
  const Setup st("5,7", catalog_lookup("Eq5"), 42);
  auto t1 = st.decoder(build_schedule(st.layout, fixed(MetricMode::type1, 0.0)));
  auto sm = st.decoder(build_schedule(st.layout, fixed(MetricMode::split_min, 0.0)));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = st.draw(seed, 1.0);
    CHECK(t1.decode(s.rx).info_bits == sm.decode(s.rx).info_bits);
  }
}

TEST_CASE("viterbi and both ML oracles agree") {
  const Setup unp("5,7", PuncturingMatrix::identity(2), 10);
  const ExhaustiveMl ex_unp(unp.code, unp.matrix, 10);
  auto vit = unp.decoder(build_schedule(unp.layout, fixed(MetricMode::exact, 0.5)));
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto s = unp.draw(seed, 2.0);
    const auto v = vit.decode(s.rx).info_bits;
    REQUIRE(v == ex_unp.decode(s.rx));
    REQUIRE(v == ml_joint_decode(s.rx, unp.trellis, unp.layout, 10));
  }

  const Setup eq5("5,7", catalog_lookup("Eq5"), 10);
  const ExhaustiveMl ex(eq5.code, eq5.matrix, 10);
  CHECK(ex.n_symbols() == eq5.layout.n_symbols());
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto s = eq5.draw(seed, 2.0, 1 + seed % 2);
    REQUIRE(ml_joint_decode(s.rx, eq5.trellis, eq5.layout, 10) == ex.decode(s.rx));
  }

  const Setup eq9("5,7", catalog_lookup("Eq9"), 10);
  const ExhaustiveMl ex9(eq9.code, eq9.matrix, 10);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = eq9.draw(seed, 1.5);
    REQUIRE(ml_joint_decode(s.rx, eq9.trellis, eq9.layout, 10) == ex9.decode(s.rx));
    CHECK(ml_joint_decode(eq9.draw(seed, 0.0).rx, eq9.trellis, eq9.layout, 10) == eq9.draw(seed, 0.0).info);
  }
}

TEST_CASE("ML oracle limits") {
  const auto code = ConvCode::from_octal("5,7");
  CHECK_THROWS(ExhaustiveMl(code, PuncturingMatrix::identity(2), 21));
  CHECK_THROWS(ExhaustiveMl(code, PuncturingMatrix::identity(3), 8));
  const Setup eq9("5,7", catalog_lookup("Eq9"), 10);
  const auto s = eq9.draw(1, 1.0);
  CHECK_THROWS(ml_joint_decode(s.rx, eq9.trellis, eq9.layout, 10, 3));
  CHECK_THROWS(ml_joint_decode(s.rx, eq9.trellis, eq9.layout, 9));
}

TEST_CASE("decoder input validation") {
  const Setup st("5,7", catalog_lookup("Eq5"), 42);
  auto dec = st.decoder(build_schedule(st.layout, fixed(MetricMode::type1, 0.5)));
  const Setup other("5,7", catalog_lookup("Eq5"), 46);
  CHECK_THROWS(dec.decode(other.draw(1, 1.0).rx));
  const Setup three("133,145,175", PuncturingMatrix::identity(3), 10);
  CHECK_THROWS(ViterbiDecoder(st.trellis, build_schedule(three.layout, fixed(MetricMode::exact, 0.5))));
}
