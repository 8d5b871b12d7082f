#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "fv/data/divergence.hpp"
#include "fv/data/replay_queue.hpp"
#include "fv/data/scenario.hpp"
#include "fv/errors.hpp"
#include "fv/exp/config.hpp"
#include "fv/exp/experiments.hpp"

using namespace fv;
using namespace fv::data;

namespace {

Frame tiny_frame(uint8_t label, int8_t snr = 0) {
  Frame f;
  f.iq = {0.1, 0.2, 0.3, 0.4};
  f.label = label;
  f.snr_db = snr;
  return f;
}

Dataset dataset_of(std::initializer_list<uint8_t> labels, int classes = 8) {
  Dataset ds;
  for (uint8_t l : labels) ds.frames.push_back(tiny_frame(l));
  ds.meta.schemes.resize(static_cast<size_t>(classes));
  return ds;
}

// Stratified pool for the scenario samplers (built straight from config).
Dataset sampler_pool(int classes, int frames_per_cell) {
  exp::RunConfig cfg = exp::default_config();
  cfg.schemes.resize(static_cast<size_t>(classes));
  cfg.frame_len = 16;
  cfg.seed = 404;
  return exp::make_pool(cfg, "pool", frames_per_cell);
}

}  // namespace

TEST_CASE("label distribution") {
  SUBCASE("one frame per class is uniform") {
    Dataset ds = dataset_of({0, 1, 2, 3, 4, 5, 6, 7});
    auto probs = label_distribution(ds, 8);
    for (double p : probs) CHECK(p == doctest::Approx(0.125));
  }
  SUBCASE("single-class data is a point mass") {
    Dataset ds = dataset_of({3, 3, 3});
    auto probs = label_distribution(ds, 8);
    CHECK(probs[3] == doctest::Approx(1.0));
    for (size_t c = 0; c < 8; ++c) {
      if (c != 3) CHECK(probs[c] == 0.0);
    }
  }
  SUBCASE("random multiset matches a hand count") {
    Rng rng(5);
    std::vector<uint8_t> labels;
    std::vector<int> counts(8, 0);
    for (int i = 0; i < 873; ++i) {
      const auto l = static_cast<uint8_t>(rng.below(8));
      labels.push_back(l);
      counts[l] += 1;
    }
    auto probs = label_distribution(labels, 8);
    for (size_t c = 0; c < 8; ++c) {
      CHECK(probs[c] == doctest::Approx(counts[c] / 873.0).epsilon(1e-12));
    }
  }
  SUBCASE("empty dataset is rejected") {
    Dataset ds;
    CHECK_THROWS_AS(label_distribution(ds, 8), EmptyInputError);
  }
}

TEST_CASE("kl divergence") {
  SUBCASE("identical distributions cost nothing") {
    CHECK(kl_divergence({0.3, 0.7}, {0.3, 0.7}) == 0.0);
  }
  SUBCASE("point mass against a fair coin is ln 2") {
    CHECK(kl_divergence({1.0, 0.0}, {0.5, 0.5}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("term-by-term hand evaluation") {
    // 0.5 ln(0.5/0.25) + 0.5 ln(0.5/0.75)
    const double want = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    CHECK(kl_divergence({0.5, 0.5}, {0.25, 0.75}) == doctest::Approx(want).epsilon(1e-12));
    CHECK(want == doctest::Approx(0.143841).epsilon(1e-5));
  }
  SUBCASE("support violation is flagged") {
    CHECK_THROWS_AS(kl_divergence({0.5, 0.5}, {1.0, 0.0}), DivergenceUndefinedError);
  }
}

TEST_CASE("js divergence") {
  SUBCASE("identical distributions cost nothing") {
    CHECK(js_divergence({0.25, 0.75}, {0.25, 0.75}) == 0.0);
  }
  SUBCASE("disjoint point masses reach ln 2") {
    CHECK(js_divergence({1.0, 0.0}, {0.0, 1.0}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("hand-derived mixed case") {
    CHECK(js_divergence({0.5, 0.5}, {0.25, 0.75}) ==
          doctest::Approx(0.03382207556860521).epsilon(1e-9));
  }
  SUBCASE("symmetry, range and identity over random pairs") {
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> p(6), q(6);
      double ps = 0.0, qs = 0.0;
      for (size_t i = 0; i < 6; ++i) {
        p[i] = rng.uniform();
        q[i] = rng.uniform();
        ps += p[i];
        qs += q[i];
      }
      for (size_t i = 0; i < 6; ++i) {
        p[i] /= ps;
        q[i] /= qs;
      }
      const double ab = js_divergence(p, q);
      const double ba = js_divergence(q, p);
      CHECK(std::abs(ab - ba) < 1e-12);
      CHECK(ab >= 0.0);
      CHECK(ab <= std::log(2.0) + 1e-12);
      CHECK(js_divergence(p, p) == 0.0);
    }
  }
}

TEST_CASE("snr filtering") {
  Dataset ds;
  for (int snr : {-20, 0, 18}) ds.frames.push_back(tiny_frame(0, static_cast<int8_t>(snr)));
  ds.meta.schemes.resize(8);

  SUBCASE("threshold keeps everything at or above it") {
    Dataset kept = filter_by_snr(ds, -12);
    REQUIRE(kept.size() == 2);
    CHECK(kept.frames[0].snr_db == 0);
    CHECK(kept.frames[1].snr_db == 18);
  }
  SUBCASE("lowest threshold keeps the whole dataset") {
    CHECK(filter_by_snr(ds, -20).size() == ds.size());
  }
  SUBCASE("highest threshold keeps only the top cell") {
    Dataset kept = filter_by_snr(ds, 18);
    REQUIRE(kept.size() == 1);
    CHECK(kept.frames[0].snr_db == 18);
  }
  SUBCASE("filtering is idempotent and composes by maximum") {
    Dataset big;
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      big.frames.push_back(
          tiny_frame(static_cast<uint8_t>(rng.below(8)),
                     static_cast<int8_t>(-20 + 2 * static_cast<int>(rng.below(20)))));
    }
    big.meta.schemes.resize(8);
    Dataset once = filter_by_snr(big, -4);
    Dataset twice = filter_by_snr(once, -4);
    CHECK(once.size() == twice.size());
    Dataset chained = filter_by_snr(filter_by_snr(big, -4), 6);
    Dataset direct = filter_by_snr(big, 6);
    REQUIRE(chained.size() == direct.size());
    for (size_t i = 0; i < chained.size(); ++i) {
      CHECK(chained.frames[i].iq == direct.frames[i].iq);
    }
  }
}

TEST_CASE("replay queue") {
  SUBCASE("insert appends in order without evicting") {
    ReplayQueue q(4, 8);
    Dataset batch = dataset_of({1, 2, 3, 4, 5, 6});
    q.insert(batch, 1);
    CHECK(q.size() == 6);  // over capacity until evict runs
    auto snap = q.contents();
    for (size_t i = 0; i < 6; ++i) CHECK(snap.frames[i].label == batch.frames[i].label);
  }
  SUBCASE("two inserts preserve round order") {
    ReplayQueue q(10, 8);
    q.insert(dataset_of({1, 1}), 1);
    q.insert(dataset_of({2, 2}), 2);
    auto labels = q.labels();
    CHECK(labels == std::vector<uint8_t>{1, 1, 2, 2});
  }
  SUBCASE("insert preserves frame payloads bit-exactly") {
    ReplayQueue q(10, 8);
    Dataset batch;
    Rng rng(4);
    for (int i = 0; i < 3; ++i) {
      Frame f = tiny_frame(static_cast<uint8_t>(i));
      for (double& v : f.iq) v = rng.uniform(-1.0, 1.0);
      batch.frames.push_back(f);
    }
    q.insert(batch, 1);
    auto snap = q.contents();
    for (size_t i = 0; i < 3; ++i) CHECK(snap.frames[i].iq == batch.frames[i].iq);
  }
  SUBCASE("at-capacity queue evicts nothing") {
    ReplayQueue q(4, 8);
    q.insert(dataset_of({0, 1, 2, 3}), 1);
    Dataset removed = q.evict();
    CHECK(removed.size() == 0);
    CHECK(q.size() == 4);
  }
  SUBCASE("eviction picks the over-represented class, oldest frame first") {
    // Brute force over single removals confirms class 0 minimizes the JS
    // distance to uniform for labels [0,0,0,1,2] at capacity 4.
    const std::vector<uint8_t> labels = {0, 0, 0, 1, 2};
    double best = 1e9;
    size_t best_class = 99;
    for (size_t drop = 0; drop < labels.size(); ++drop) {
      std::vector<uint8_t> rest;
      for (size_t i = 0; i < labels.size(); ++i) {
        if (i != drop) rest.push_back(labels[i]);
      }
      const double js = js_divergence(label_distribution(rest, 8), uniform_distribution(8));
      if (js < best - 1e-15) {
        best = js;
        best_class = labels[drop];
      }
    }
    CHECK(best_class == 0);

    ReplayQueue q(4, 8);
    Dataset batch;
    for (size_t i = 0; i < labels.size(); ++i) {
      Frame f = tiny_frame(labels[i]);
      f.iq[0] = static_cast<double>(i);  // identity marker
      batch.frames.push_back(f);
    }
    q.insert(batch, 1);
    Dataset removed = q.evict();
    REQUIRE(removed.size() == 1);
    CHECK(removed.frames[0].label == 0);
    CHECK(removed.frames[0].iq[0] == 0.0);  // the oldest of the three zeros
    CHECK(q.size() == 4);
  }
  SUBCASE("snapshot is unaffected by later eviction") {
    ReplayQueue q(2, 8);
    q.insert(dataset_of({0, 0, 1}), 1);
    Dataset snap = q.contents();
    q.evict();
    CHECK(snap.size() == 3);
  }
  SUBCASE("randomized interleavings keep capacity and uniformity monotone") {
    // Round-sized batches, as the protocol produces them: each insert pushes
    // the queue well past capacity and eviction rebalances in one sweep.
    Rng rng(2024);
    int eviction_events = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const size_t cap = 32 + rng.below(128);
      ReplayQueue q(cap, 8);
      // Skewed class weights per trial.
      std::vector<double> w(8);
      double wsum = 0.0;
      for (double& x : w) {
        x = rng.uniform() + 0.05;
        wsum += x;
      }
      for (int step = 0; step < 12; ++step) {
        Dataset batch;
        const size_t n = cap / 4 + rng.below(cap / 2);
        for (size_t i = 0; i < n; ++i) {
          double u = rng.uniform() * wsum;
          size_t c = 0;
          while (c + 1 < 8 && u >= w[c]) {
            u -= w[c];
            ++c;
          }
          batch.frames.push_back(tiny_frame(static_cast<uint8_t>(c)));
        }
        q.insert(batch, step);
        const double before = js_divergence(q.stored_distribution(), uniform_distribution(8));
        Dataset removed = q.evict();
        CHECK(q.size() <= cap);
        if (!removed.empty()) {
          ++eviction_events;
          const double after = js_divergence(q.stored_distribution(), uniform_distribution(8));
          CHECK(after <= before + 1e-12);
        }
      }
    }
    CHECK(eviction_events > 1500);
  }
  SUBCASE("uniformity diagnostic") {
    ReplayQueue q(8, 4);
    q.insert(dataset_of({0, 1, 2, 3}, 4), 1);
    CHECK(q.within_uniform_tolerance(0.05));
    q.insert(dataset_of({0, 0, 0, 0}, 4), 2);
    CHECK_FALSE(q.within_uniform_tolerance(0.05));
  }
}

TEST_CASE("scenario samplers") {
  const int classes = 4;
  Dataset pool = sampler_pool(classes, 40);  // 4 classes x 20 snrs x 40
  ScenarioSpec spec;
  spec.base_samples = 400;
  spec.feat_var_min = 40;
  spec.feat_var_max = 60;

  SUBCASE("iid per-class counts stay within three sigmas") {
    spec.kind = ScenarioKind::IID;
    Rng rng = derive_rng(1, "data", 1, 0);
    Dataset draw = sample_scenario(spec, pool, 0, 1, rng);
    REQUIRE(draw.size() == 400);
    std::vector<int> counts(classes, 0);
    for (const auto& f : draw.frames) counts[f.label] += 1;
    const double expect = 400.0 / classes;
    const double sigma = std::sqrt(400.0 * (1.0 / classes) * (1.0 - 1.0 / classes));
    for (int c = 0; c < classes; ++c) {
      CHECK(std::abs(counts[c] - expect) < 3.5 * sigma);
    }
  }
  SUBCASE("feature variance draws one snr and a bounded count") {
    spec.kind = ScenarioKind::FEATURE_VARIANCE;
    for (uint64_t round = 1; round <= 50; ++round) {
      Rng rng = derive_rng(2, "data", round, 3);
      Dataset draw = sample_scenario(spec, pool, 3, static_cast<int>(round), rng);
      REQUIRE(!draw.empty());
      CHECK(draw.size() >= 40);
      CHECK(draw.size() <= 60);
      const int8_t snr = draw.frames[0].snr_db;
      for (const auto& f : draw.frames) CHECK(f.snr_db == snr);
    }
  }
  SUBCASE("volume imbalance never exceeds the base count and can be empty") {
    spec.kind = ScenarioKind::VOLUME_IMBALANCE;
    bool saw_small = false;
    for (uint64_t round = 1; round <= 60; ++round) {
      Rng rng = derive_rng(3, "data", round, 0);
      Dataset draw = sample_scenario(spec, pool, 0, static_cast<int>(round), rng);
      CHECK(draw.size() <= 400);
      if (draw.size() < 40) saw_small = true;
    }
    CHECK(saw_small);
  }
  SUBCASE("class imbalance is reproducible per (seed, client, round)") {
    spec.kind = ScenarioKind::CLASS_IMBALANCE;
    Rng a = derive_rng(4, "data", 7, 2);
    Rng b = derive_rng(4, "data", 7, 2);
    Dataset da = sample_scenario(spec, pool, 2, 7, a);
    Dataset db = sample_scenario(spec, pool, 2, 7, b);
    REQUIRE(da.size() == db.size());
    for (size_t i = 0; i < da.size(); ++i) {
      CHECK(da.frames[i].iq == db.frames[i].iq);
      CHECK(da.frames[i].label == db.frames[i].label);
    }
    // Different rounds give different mixes.
    Rng c = derive_rng(4, "data", 8, 2);
    Dataset dc = sample_scenario(spec, pool, 2, 8, c);
    bool differs = dc.size() != da.size();
    for (size_t i = 0; !differs && i < std::min(da.size(), dc.size()); ++i) {
      differs = da.frames[i].iq != dc.frames[i].iq;
    }
    CHECK(differs);
  }
  SUBCASE("empty pool is a stratification error") {
    Dataset empty;
    Rng rng(1);
    CHECK_THROWS_AS(sample_scenario(spec, empty, 0, 1, rng), StratificationError);
  }
}

TEST_CASE("dataset codec") {
  const std::string path = "codec_test.amcd";
  SUBCASE("round trip reproduces synthesized frames bit-exactly") {
    exp::RunConfig cfg = exp::default_config();
    cfg.schemes.resize(3);
    cfg.frame_len = 32;
    cfg.seed = 11;
    Dataset ds = exp::make_pool(cfg, "pool", 2);
    write_dataset(ds, path);
    Dataset back = read_dataset(path);
    REQUIRE(back.size() == ds.size());
    CHECK(back.class_count() == 3);
    for (size_t i = 0; i < ds.size(); ++i) {
      CHECK(back.frames[i].label == ds.frames[i].label);
      CHECK(back.frames[i].snr_db == ds.frames[i].snr_db);
      CHECK(back.frames[i].iq == ds.frames[i].iq);
      CHECK_FALSE(back.frames[i].has_clean());
    }
    std::remove(path.c_str());
  }
  SUBCASE("empty dataset writes the 19-byte header only") {
    Dataset ds;
    ds.meta.schemes.resize(8);
    write_dataset(ds, path);
    FILE* f = std::fopen(path.c_str(), "rb");
    REQUIRE(f != nullptr);
    std::fseek(f, 0, SEEK_END);
    CHECK(std::ftell(f) == 19);
    std::fclose(f);
    Dataset back = read_dataset(path);
    CHECK(back.empty());
    std::remove(path.c_str());
  }
  SUBCASE("corrupted magic fails without returning frames") {
    FILE* f = std::fopen(path.c_str(), "wb");
    std::fwrite("XXXX12345678901234567890", 1, 24, f);
    std::fclose(f);
    CHECK_THROWS_AS(read_dataset(path), FormatError);
    std::remove(path.c_str());
  }
  SUBCASE("truncation names a byte offset") {
    Dataset ds = dataset_of({1, 2, 3});
    write_dataset(ds, path);
    REQUIRE(truncate(path.c_str(), 25) == 0);
    try {
      read_dataset(path);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
    std::remove(path.c_str());
  }
  SUBCASE("property: random datasets survive the round trip") {
    Rng rng(91);
    for (int trial = 0; trial < 100; ++trial) {
      Dataset ds;
      ds.meta.schemes.resize(8);
      const size_t n = rng.below(12);  // includes empty and single-frame sets
      for (size_t i = 0; i < n; ++i) {
        Frame f;
        f.iq.resize(8);
        for (double& v : f.iq) {
          v = static_cast<double>(static_cast<float>(rng.uniform(-2.0, 2.0)));
        }
        f.label = static_cast<uint8_t>(rng.below(8));
        f.snr_db = static_cast<int8_t>(-20 + 2 * static_cast<int>(rng.below(20)));
        ds.frames.push_back(std::move(f));
      }
      write_dataset(ds, path);
      Dataset back = read_dataset(path);
      REQUIRE(back.size() == ds.size());
      for (size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.frames[i].iq == ds.frames[i].iq);
        CHECK(back.frames[i].label == ds.frames[i].label);
        CHECK(back.frames[i].snr_db == ds.frames[i].snr_db);
      }
    }
    std::remove(path.c_str());
  }
}
