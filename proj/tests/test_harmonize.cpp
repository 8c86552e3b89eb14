#include <doctest.h>

#include <harmonidiff/errors.hpp>
#include <harmonidiff/harmonize.hpp>

#include <atomic>
#include <cmath>
#include <memory>
#include <random>

using namespace harmonidiff;

namespace {

LatentTensor random_tensor(std::mt19937& rng, int c, int h, int w) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  LatentTensor z(c, h, w);
  for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] = dist(rng);
  return z;
}

// 8-periodic pattern whose every aligned 8x8 block shares the global mean.
double tile_value(int c, int y, int x) {
  const int yy = y % 8, xx = x % 8;
  return 0.35 + 0.25 * std::sin(0.7 * xx + 1.3 * yy + 0.4 * c) + 0.05 * ((xx + yy) % 2);
}

ImageGrid tiled_image(int w, int h) {
  ImageGrid img(w, h, 3);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) img.at(c, y, x) = tile_value(c, y, x);
  return img;
}

HarmonizeEngine small_engine() {
  HarmonizeEngine engine;
  engine.schedule = build_schedule(1000, 20, 8.5e-4, 1.2e-2);
  engine.codec = std::make_shared<IdentityCodec>();
  LatentTensor mean(1, 1, 1);
  mean.at(0, 0, 0) = 0.5;
  engine.predictor =
      std::make_shared<AnalyticGaussianPredictor>(engine.schedule, mean, 1.0);
  engine.params.harmonious_depths = {3, 4, 5, 6};
  engine.params.preservation_depth = 2;
  return engine;
}

CompositionTask self_paste_task() {
  CompositionTask task;
  task.target = tiled_image(32, 32);
  task.source = ImageGrid(16, 16, 3);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) task.source.at(c, y, x) = tile_value(c, y + 8, x + 8);
  task.paste_x = 8;
  task.paste_y = 8;
  return task;
}

}  // namespace

TEST_CASE("conditioning text follows the label template") {
  CompositionTask task;
  task.source_label = "stadium";
  task.target_country = "Kenya";
  const ConditioningBlob blob = task_conditioning(task);
  const std::string text(blob.bytes.begin(), blob.bytes.end());
  CHECK(text == "A satellite image of a stadium in Kenya");

  task.target_country.clear();
  CHECK(task_conditioning(task).bytes.empty());
  task.target_country = "Kenya";
  task.source_label.clear();
  CHECK(task_conditioning(task).bytes.empty());
}

TEST_CASE("place_source resamples and zero-pads around the footprint") {
  CompositionTask task;
  task.target = ImageGrid(12, 10, 3, 0.9);
  task.source = ImageGrid(6, 4, 3, 0.4);
  task.paste_x = 2;
  task.paste_y = 3;
  task.source_gsd = 2.0;  // 2 m/px onto 1 m/px doubles the size
  task.target_gsd = 1.0;

  // 12x8 resampled source lands inside the 12x10 target only at x=0.
  CHECK_THROWS_AS(place_source(task), PlacementError);
  task.paste_x = 0;
  task.paste_y = 1;
  const PlacedSource placed = place_source(task);
  CHECK(placed.width == 12);
  CHECK(placed.height == 8);
  CHECK(placed.canvas.width() == 12);
  CHECK(placed.canvas.height() == 10);
  CHECK(placed.omega.count() == 12 * 8);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 12; ++x) {
      const bool inside = y >= 1 && y < 9;
      CHECK(placed.omega.at(y, x) == inside);
      CHECK(placed.canvas.at(0, y, x) == (inside ? 0.4 : 0.0));
    }
  }
}

TEST_CASE("place_source respects an irregular source mask") {
  CompositionTask task;
  task.target = ImageGrid(8, 8, 1, 0.5);
  task.source = ImageGrid(3, 3, 1, 0.2);
  task.source_mask = RegionMask(3, 3);
  task.source_mask.set(1, 1, true);
  task.source_mask.set(1, 2, true);
  task.paste_x = 2;
  task.paste_y = 2;
  const PlacedSource placed = place_source(task);
  CHECK(placed.omega.count() == 2);
  CHECK(placed.omega.at(3, 3));
  CHECK(placed.omega.at(3, 4));
  CHECK(placed.canvas.at(0, 3, 3) == 0.2);
  CHECK(placed.canvas.at(0, 2, 2) == 0.0);  // unmasked source cell stays out
}

TEST_CASE("place_source validates inputs") {
  CompositionTask task;
  task.target = ImageGrid(8, 8, 3, 0.5);
  task.source = ImageGrid(4, 4, 1, 0.2);
  CHECK_THROWS_AS(place_source(task), ContractError);  // channel mismatch

  task.source = ImageGrid(4, 4, 3, 0.2);
  task.source_mask = RegionMask(3, 3, true);
  CHECK_THROWS_AS(place_source(task), ContractError);  // mask dims

  task.source_mask = RegionMask();
  task.paste_x = -1;
  CHECK_THROWS_AS(place_source(task), PlacementError);
  task.paste_x = 5;
  CHECK_THROWS_AS(place_source(task), PlacementError);
  task.paste_x = 4;
  task.paste_y = 4;
  CHECK_NOTHROW(place_source(task));
}

TEST_CASE("channel means over the whole tensor and a region") {
  LatentTensor z(2, 2, 2);
  z.at(0, 0, 0) = 1.0;
  z.at(0, 0, 1) = 2.0;
  z.at(0, 1, 0) = 3.0;
  z.at(0, 1, 1) = 4.0;
  z.at(1, 0, 0) = -1.0;
  z.at(1, 0, 1) = -2.0;
  z.at(1, 1, 0) = -3.0;
  z.at(1, 1, 1) = -4.0;
  const auto whole = channel_means(z);
  REQUIRE(whole.size() == 2);
  CHECK(whole[0] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(whole[1] == doctest::Approx(-2.5).epsilon(1e-15));

  RegionMask region(2, 2);
  region.set(0, 1, true);
  region.set(1, 1, true);
  const auto part = channel_means(z, region);
  CHECK(part[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(part[1] == doctest::Approx(-3.0).epsilon(1e-15));

  CHECK_THROWS_AS(channel_means(z, RegionMask(2, 2)), ContractError);
  CHECK_THROWS_AS(channel_means(z, RegionMask(3, 2, true)), ContractError);
}

TEST_CASE("mean shift matches the hand-worked example") {
  // tar mean 0.5, src omega mean 0.2 -> shift +0.3 inside omega.
  LatentTensor tar(1, 1, 4), src(1, 1, 4);
  tar.at(0, 0, 0) = 0.2;
  tar.at(0, 0, 1) = 0.4;
  tar.at(0, 0, 2) = 0.6;
  tar.at(0, 0, 3) = 0.8;
  src.at(0, 0, 0) = 0.1;
  src.at(0, 0, 1) = 0.3;
  src.at(0, 0, 2) = 0.9;
  src.at(0, 0, 3) = 0.9;
  RegionMask omega(4, 1);
  omega.set(0, 0, true);
  omega.set(0, 1, true);
  const LatentTensor out = latent_mean_shift(src, tar, omega);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(out.at(0, 0, 1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(out.at(0, 0, 2) == 0.6);  // outside omega: tar, bit-exact
  CHECK(out.at(0, 0, 3) == 0.8);
}

TEST_CASE("mean shift aligns the footprint mean with the scene mean") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> coord(0, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    const LatentTensor src = random_tensor(rng, 3, 6, 6);
    const LatentTensor tar = random_tensor(rng, 3, 6, 6);
    RegionMask omega(6, 6);
    const int n = 1 + trial % 12;
    for (int k = 0; k < n; ++k) omega.set(coord(rng), coord(rng), true);
    const LatentTensor out = latent_mean_shift(src, tar, omega);
    const auto tar_mean = channel_means(tar);
    const auto out_mean = channel_means(out, omega);
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(out_mean[c] - tar_mean[c]) <= 1e-12);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x)
        if (!omega.at(y, x))
          for (int c = 0; c < 3; ++c) CHECK(out.at(c, y, x) == tar.at(c, y, x));
  }
}

TEST_CASE("mean shift with an empty footprint returns the target") {
  std::mt19937 rng(2);
  const LatentTensor src = random_tensor(rng, 2, 3, 3);
  const LatentTensor tar = random_tensor(rng, 2, 3, 3);
  const LatentTensor out = latent_mean_shift(src, tar, RegionMask(3, 3));
  CHECK(max_abs_diff(out, tar) == 0.0);
  CHECK_THROWS_AS(latent_mean_shift(src, tar, RegionMask(4, 3)), ContractError);
}

TEST_CASE("edge width scales with the smaller source dimension") {
  CHECK(edge_width(40, 60, 128) == 4);
  CHECK(edge_width(60, 40, 128) == 4);
  CHECK(edge_width(25, 80, 128) == 3);  // round(2.5) away from zero
  CHECK(edge_width(4, 90, 128) == 1);   // clamps up to one cell
  CHECK(edge_width(16, 16, 128, 0.25) == 4);
  CHECK_THROWS_AS(edge_width(0, 10, 128), ContractError);
  CHECK_THROWS_AS(edge_width(10, 10, 128, 0.0), ContractError);
  CHECK_THROWS_AS(edge_width(10, 10, 128, 1.0), ContractError);
}

TEST_CASE("edge mask is the dilation minus the erosion") {
  RegionMask omega(9, 9);
  for (int y = 3; y <= 6; ++y)
    for (int x = 2; x <= 6; ++x) omega.set(y, x, true);
  const RegionMask band = edge_mask(omega, 1);
  // erode(omega,1) keeps rows 4..5, cols 3..5; dilate grows to rows 2..7, cols 1..7.
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      const bool in_dilate = y >= 2 && y <= 7 && x >= 1 && x <= 7;
      const bool in_erode = y >= 4 && y <= 5 && x >= 3 && x <= 5;
      CHECK(band.at(y, x) == (in_dilate && !in_erode));
    }
  }
  CHECK_THROWS_AS(edge_mask(omega, 0), ContractError);
}

TEST_CASE("fusion picks the edge branch only on the band") {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const LatentTensor a = random_tensor(rng, 2, 6, 6);
    const LatentTensor b = random_tensor(rng, 2, 6, 6);
    RegionMask band(6, 6);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) band.set(y, x, bit(rng) == 1);
    const LatentTensor out = fuse_step(a, b, band);
    for (int c = 0; c < 2; ++c)
      for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x)
          CHECK(out.at(c, y, x) == (band.at(y, x) ? a.at(c, y, x) : b.at(c, y, x)));
  }
  CHECK_THROWS_AS(fuse_step(LatentTensor(1, 2, 2), LatentTensor(1, 3, 2), RegionMask(2, 2)),
                  ContractError);
  CHECK_THROWS_AS(fuse_step(LatentTensor(1, 2, 2), LatentTensor(1, 2, 2), RegionMask(3, 2)),
                  ContractError);
}

TEST_CASE("engine validation pins the depth relationships") {
  HarmonizeEngine engine = small_engine();
  CHECK_NOTHROW(validate_engine(engine));
  engine.params.preservation_depth = 3;  // must stay below min depth
  CHECK_THROWS_AS(validate_engine(engine), ContractError);
  engine.params.preservation_depth = 0;
  CHECK_THROWS_AS(validate_engine(engine), ContractError);
  engine.params.preservation_depth = 2;
  engine.params.harmonious_depths = {3, 21};
  CHECK_THROWS_AS(validate_engine(engine), ContractError);
  engine.params.harmonious_depths = {};
  CHECK_THROWS_AS(validate_engine(engine), ContractError);
  engine.params.harmonious_depths = {3, 4};
  engine.params.edge_width_fraction = 0.0;
  CHECK_THROWS_AS(validate_engine(engine), ContractError);
  engine.params.edge_width_fraction = 0.1;
  engine.codec.reset();
  CHECK_THROWS_AS(validate_engine(engine), ContractError);
}

TEST_CASE("pasting a scene back into itself leaves it unchanged") {
  const HarmonizeEngine engine = small_engine();
  const CompositionTask task = self_paste_task();
  const CandidateSet set = compose(task, engine);
  REQUIRE(set.entries.size() == 4);
  for (const Candidate& cand : set.entries) {
    double worst = 0.0;
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
          worst = std::max(worst, std::abs(cand.image.at(c, y, x) - task.target.at(c, y, x)));
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("composition is deterministic across parallel runs") {
  HarmonizeEngine engine = small_engine();
  engine.params.worker_threads = 4;
  const CompositionTask task = self_paste_task();
  const CandidateSet a = compose(task, engine);
  const CandidateSet b = compose(task, engine);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].depth == b.entries[i].depth);
    CHECK(a.entries[i].score == b.entries[i].score);
    REQUIRE(a.entries[i].image.data().size() == b.entries[i].image.data().size());
    for (std::size_t k = 0; k < a.entries[i].image.data().size(); ++k)
      CHECK(a.entries[i].image.data()[k] == b.entries[i].image.data()[k]);
  }
}

TEST_CASE("candidates carry the configured depths and the paste footprint") {
  HarmonizeEngine engine = small_engine();
  engine.params.harmonious_depths = {6, 3, 5};
  const CompositionTask task = self_paste_task();
  const CandidateSet set = compose(task, engine);
  REQUIRE(set.entries.size() == 3);
  CHECK(set.entries[0].depth == 6);
  CHECK(set.entries[1].depth == 3);
  CHECK(set.entries[2].depth == 5);
  CHECK(set.omega_pixel.width() == 32);
  CHECK(set.omega_pixel.count() == 16 * 16);
  for (const Candidate& cand : set.entries) CHECK(cand.score == 0.5);  // no scorer
}

TEST_CASE("the scorer callback sees each candidate with the footprint") {
  HarmonizeEngine engine = small_engine();
  std::atomic<int> calls{0};
  engine.score_fn = [&](const ImageGrid& img, const RegionMask& omega) {
    ++calls;
    CHECK(img.width() == 32);
    CHECK(omega.count() == 16 * 16);
    double sum = 0.0;
    for (int y = 0; y < omega.height(); ++y)
      for (int x = 0; x < omega.width(); ++x)
        if (omega.at(y, x)) sum += img.at(0, y, x);
    return sum / static_cast<double>(omega.count());
  };
  const CompositionTask task = self_paste_task();
  const CandidateSet set = compose(task, engine);
  CHECK(calls.load() == 4);
  for (const Candidate& cand : set.entries) {
    double sum = 0.0;
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x)
        if (set.omega_pixel.at(y, x)) sum += cand.image.at(0, y, x);
    CHECK(cand.score == doctest::Approx(sum / 256.0).epsilon(1e-12));
  }
}

TEST_CASE("selection takes the best score and breaks ties toward the front") {
  CandidateSet set;
  set.entries.resize(4);
  set.entries[0].score = 0.2;
  set.entries[1].score = 0.9;
  set.entries[2].score = 0.9;
  set.entries[3].score = 0.5;
  CHECK(select_best(set) == 1);
  set.entries[1].score = 0.1;
  CHECK(select_best(set) == 2);
  CHECK_THROWS_AS(select_best(CandidateSet{}), ContractError);
}

TEST_CASE("labels route conditioning into both branches of guided sampling") {
  HarmonizeEngine engine = small_engine();
  std::atomic<int> conditioned{0};
  std::atomic<int> unconditioned{0};
  engine.predictor = std::make_shared<FunctionPredictor>(
      [&](const LatentTensor& z, int, const ConditioningBlob* cond) {
        if (cond != nullptr && !cond->bytes.empty())
          ++conditioned;
        else
          ++unconditioned;
        LatentTensor eps(z.channels(), z.height(), z.width());
        for (std::size_t i = 0; i < eps.size(); ++i) eps.data()[i] = 0.01;
        return eps;
      });
  CompositionTask task = self_paste_task();

  SUBCASE("no labels: every query is unconditional") {
    compose(task, engine);
    CHECK(conditioned.load() == 0);
    CHECK(unconditioned.load() > 0);
  }
  SUBCASE("labels: guided sampling queries both branches") {
    task.source_label = "farm";
    task.target_country = "Chile";
    compose(task, engine);
    CHECK(conditioned.load() > 0);
    CHECK(unconditioned.load() > 0);
  }
  SUBCASE("inversion conditioning can be switched off") {
    task.source_label = "farm";
    task.target_country = "Chile";
    engine.params.condition_inversion = false;
    compose(task, engine);
    // guided sampling still queries the conditional branch
    CHECK(conditioned.load() > 0);
  }
}
