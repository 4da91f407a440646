#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "landmark2vec/embedder.hpp"
#include "oracles.hpp"

using namespace landmark2vec;

namespace {

EmbeddingModel random_model(std::mt19937_64& rng, std::size_t L, int d, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  EmbeddingModel m{Eigen::MatrixXd(L, d), Eigen::MatrixXd(d, L)};
  for (Eigen::Index i = 0; i < m.w_in.size(); ++i) m.w_in.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < m.w_out.size(); ++i) m.w_out.data()[i] = g(rng);
  return m;
}

TrainingPair random_pair(std::mt19937_64& rng, std::size_t L) {
  TrainingPair p;
  p.input_index = rng() % L;
  p.target.assign(L, 0.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double total = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    if (j == p.input_index || u(rng) < 0.3) continue;
    p.target[j] = u(rng) + 0.01;
    total += p.target[j];
  }
  if (total == 0.0) {
    const std::size_t j = (p.input_index + 1) % L;
    p.target[j] = 1.0;
    total = 1.0;
  }
  for (auto& t : p.target) t /= total;
  return p;
}

// Synthetic pairs where landmark l's context is its ring neighbours.
std::vector<TrainingPair> ring_pairs(std::size_t L, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TrainingPair> out;
  for (std::size_t i = 0; i < count; ++i) {
    TrainingPair p;
    p.input_index = rng() % L;
    p.target.assign(L, 0.0);
    p.target[(p.input_index + 1) % L] = 0.35;
    p.target[(p.input_index + L - 1) % L] = 0.35;
    p.target[(p.input_index + 2) % L] = 0.15;
    p.target[(p.input_index + L - 2) % L] = 0.15;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST_CASE("init_model range and determinism") {
  const auto a = init_model(6, 2, 1);
  CHECK(a.w_in.rows() == 6);
  CHECK(a.w_in.cols() == 2);
  CHECK(a.w_out.rows() == 2);
  CHECK(a.w_out.cols() == 6);
  CHECK(a.w_in.cwiseAbs().maxCoeff() <= 0.25);
  CHECK(a.w_out.cwiseAbs().maxCoeff() <= 0.25);

  const auto b = init_model(6, 2, 1);
  CHECK(a.w_in == b.w_in);
  CHECK(a.w_out == b.w_out);

  const auto c = init_model(6, 2, 2);
  CHECK(a.w_in != c.w_in);

  const auto three = init_model(5, 3, 9);
  CHECK(three.w_in.cwiseAbs().maxCoeff() <= 0.5 / 3);

  CHECK_THROWS_AS(init_model(6, 1, 1), Error);
  CHECK_THROWS_AS(init_model(6, 4, 1), Error);
}

TEST_CASE("forward") {
  SUBCASE("zero output weights give a uniform distribution") {
    auto m = init_model(7, 2, 3);
    m.w_out.setZero();
    const auto out = forward(m, 4);
    for (Eigen::Index j = 0; j < 7; ++j) CHECK(out(j) == doctest::Approx(1.0 / 7).epsilon(1e-15));
  }
  SUBCASE("hand-evaluated softmax") {
    EmbeddingModel m{Eigen::MatrixXd(3, 2), Eigen::MatrixXd(2, 3)};
    m.w_in << 1, 0, 0, 0, 0, 0;
    m.w_out << 1, 0, -1, 0, 0, 0;
    const auto out = forward(m, 0);
    CHECK(out(0) == doctest::Approx(0.66524).epsilon(1e-4));
    CHECK(out(1) == doctest::Approx(0.24473).epsilon(1e-4));
    CHECK(out(2) == doctest::Approx(0.09003).epsilon(1e-4));
  }
  SUBCASE("always a distribution, even with large logits") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
      const std::size_t L = 2 + rng() % 10;
      const auto m = random_model(rng, L, 2 + static_cast<int>(rng() % 2), t < 50 ? 1.0 : 30.0);
      const auto out = forward(m, rng() % L);
      CHECK(std::abs(out.sum() - 1.0) <= 1e-12);
      CHECK(out.allFinite());
      CHECK(out.minCoeff() >= 0.0);
    }
  }
  SUBCASE("bottleneck equals the map row") {
    std::mt19937_64 rng(8);
    const auto m = random_model(rng, 5, 3);
    const auto map = extract_map(m);
    for (std::size_t l = 0; l < 5; ++l) CHECK(hidden(m, l) == map.point(l));
  }
  CHECK_THROWS_AS(forward(init_model(3, 2, 1), 3), Error);
}

TEST_CASE("loss") {
  const std::vector<double> target{0, 0.5, 0.5};
  CHECK(loss(std::vector<double>{0.5, 0.25, 0.25}, target) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(loss(std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2}, std::vector<double>{0, 0.1, 0.3, 0.6, 0}) ==
        doctest::Approx(std::log(5.0)));
  CHECK(loss(std::vector<double>{1e-300, 1 - 1e-12, 1e-12}, std::vector<double>{0, 1, 0}) < 1e-11);
  // Zero-target entries are skipped even where the output is zero.
  CHECK(std::isfinite(loss(std::vector<double>{0.0, 1.0}, std::vector<double>{0, 1})));
  CHECK_THROWS_AS(loss(std::vector<double>{0.5, 0.5}, target), Error);
}

TEST_CASE("backward matches central finite differences") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int draw = 0; draw < 150; ++draw) {
    const std::size_t L = 2 + rng() % 7;
    const int d = 2 + static_cast<int>(rng() % 2);
    const auto model = random_model(rng, L, d);
    const auto pair = random_pair(rng, L);
    const auto g = backward(model, pair);
    const auto [fd_in, fd_out] = oracle::finite_difference_gradients(model, pair, 1e-5);
    worst = std::max({worst, (g.w_in - fd_in).cwiseAbs().maxCoeff(), (g.w_out - fd_out).cwiseAbs().maxCoeff()});

    for (Eigen::Index r = 0; r < g.w_in.rows(); ++r) {
      if (r != static_cast<Eigen::Index>(pair.input_index)) CHECK(g.w_in.row(r).isZero(0.0));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("backward is zero when the target equals the output") {
  std::mt19937_64 rng(11);
  const auto model = random_model(rng, 6, 2);
  const auto out = forward(model, 2);
  TrainingPair pair{2, std::vector<double>(out.data(), out.data() + out.size())};
  const auto g = backward(model, pair);
  CHECK(g.w_in.cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(g.w_out.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("a small SGD step lowers the pair loss") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 50; ++t) {
    const std::size_t L = 3 + rng() % 6;
    auto model = random_model(rng, L, 2);
    const auto pair = random_pair(rng, L);
    const double before = loss(forward(model, pair.input_index), pair.target);
    const auto g = backward(model, pair);
    if (g.w_in.squaredNorm() + g.w_out.squaredNorm() < 1e-20) continue;
    model.w_in -= 1e-4 * g.w_in;
    model.w_out -= 1e-4 * g.w_out;
    CHECK(loss(forward(model, pair.input_index), pair.target) < before);
  }
}

TEST_CASE("should_stop") {
  CHECK_FALSE(should_stop(std::vector<double>{10, 9, 8, 7}, 0.1));
  CHECK(should_stop(std::vector<double>{10, 5, 4.9}, 0.1));
  CHECK_FALSE(should_stop(std::vector<double>{10, 5, 4.9}, 0.01));
  // Loss went up at epoch 2: denominator undefined, stop.
  CHECK(should_stop(std::vector<double>{10, 11}, 0.1));
  CHECK(should_stop(std::vector<double>{10, 10}, 0.1));
  // A rise after earlier progress is a negative ratio.
  CHECK(should_stop(std::vector<double>{10, 8, 8.5}, 0.1));
  CHECK_THROWS_AS(should_stop(std::vector<double>{10}, 0.1), Error);
  CHECK_THROWS_AS(should_stop(std::vector<double>{10, 9}, 1.0), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> losses{5.0};
    const std::size_t len = 2 + rng() % 20;
    while (losses.size() < len) losses.push_back(losses.back() - u(rng));
    const double tau = 0.01 + 0.5 * u(rng);
    const double k = std::exp(8.0 * (u(rng) - 0.5));
    std::vector<double> scaled = losses;
    for (auto& v : scaled) v *= k;
    CHECK(should_stop(losses, tau) == should_stop(scaled, tau));
  }
}

TEST_CASE("TrainConfig validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.tau = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.dim = 4;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(parse_optimizer("adam") == Optimizer::kAdam);
  CHECK_THROWS_AS(parse_optimizer("rmsprop"), Error);
}

TEST_CASE("train loop contracts") {
  const auto train_pairs = ring_pairs(12, 2000, 1);
  const auto val_pairs = ring_pairs(12, 300, 2);
  TrainConfig cfg;
  cfg.context_size = 5;
  cfg.batch_size = 32;
  cfg.learning_rate = 0.2;

  SUBCASE("max_epochs = 1") {
    cfg.max_epochs = 1;
    const auto r = train(train_pairs, val_pairs, cfg);
    REQUIRE(r.log.epochs.size() == 1);
    CHECK(r.log.epochs[0].epoch == 1);
    CHECK(r.log.stop_reason == StopReason::kMaxEpochs);
  }
  SUBCASE("bit-identical reruns") {
    cfg.max_epochs = 15;
    const auto a = train(train_pairs, val_pairs, cfg);
    const auto b = train(train_pairs, val_pairs, cfg);
    CHECK(a.model.w_in == b.model.w_in);
    CHECK(a.model.w_out == b.model.w_out);
    REQUIRE(a.log.epochs.size() == b.log.epochs.size());
    for (std::size_t e = 0; e < a.log.epochs.size(); ++e) {
      CHECK(a.log.epochs[e].epoch == e + 1);
      CHECK(a.log.epochs[e].train_loss == b.log.epochs[e].train_loss);
      CHECK(a.log.epochs[e].val_loss == b.log.epochs[e].val_loss);
    }
  }
  SUBCASE("criterion stop and learning") {
    cfg.max_epochs = 500;
    const auto r = train(train_pairs, val_pairs, cfg);
    CHECK(r.log.stop_reason == StopReason::kCriterion);
    CHECK(r.log.epochs.back().val_loss < std::log(12.0));
    CHECK(should_stop(r.log.val_losses(), cfg.tau));
  }
  SUBCASE("adam runs") {
    cfg.optimizer = Optimizer::kAdam;
    cfg.learning_rate = 0.02;
    cfg.max_epochs = 200;
    const auto r = train(train_pairs, val_pairs, cfg);
    CHECK(r.log.epochs.back().val_loss < r.log.epochs.front().val_loss);
    CHECK(r.model.all_finite());
  }
  SUBCASE("non-finite loss returns the last finite model") {
    cfg.learning_rate = 1e300;
    cfg.max_epochs = 50;
    const auto init = init_model(12, 2, cfg.seed);
    const auto r = train(init, train_pairs, val_pairs, cfg);
    CHECK(r.log.stop_reason == StopReason::kNonFinite);
    CHECK(r.model.all_finite());
    if (r.log.epochs.empty()) CHECK(r.model.w_in == init.w_in);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(train(std::span<const TrainingPair>{}, val_pairs, cfg), Error);
    CHECK_THROWS_AS(train(train_pairs, std::span<const TrainingPair>{}, cfg), Error);
    auto bad = val_pairs;
    bad[0].target.push_back(0.0);
    CHECK_THROWS_AS(train(train_pairs, bad, cfg), Error);
  }
}

TEST_CASE("relabelling landmarks permutes the learned map") {
  const std::size_t L = 9;
  auto pairs = ring_pairs(L, 600, 4);
  auto val = ring_pairs(L, 100, 5);
  std::vector<std::size_t> perm(L);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(6));

  auto relabel = [&](std::vector<TrainingPair> ps) {
    for (auto& p : ps) {
      std::vector<double> t(L);
      for (std::size_t j = 0; j < L; ++j) t[perm[j]] = p.target[j];
      p.input_index = perm[p.input_index];
      p.target = std::move(t);
    }
    return ps;
  };

  TrainConfig cfg;
  cfg.context_size = 5;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.1;
  cfg.max_epochs = 8;
  const auto init = init_model(L, 2, 13);
  EmbeddingModel init_perm = init;
  for (std::size_t l = 0; l < L; ++l) {
    init_perm.w_in.row(static_cast<Eigen::Index>(perm[l])) = init.w_in.row(static_cast<Eigen::Index>(l));
    init_perm.w_out.col(static_cast<Eigen::Index>(perm[l])) = init.w_out.col(static_cast<Eigen::Index>(l));
  }

  const auto a = train(init, pairs, val, cfg);
  const auto b = train(init_perm, relabel(pairs), relabel(val), cfg);
  REQUIRE(a.log.epochs.size() == b.log.epochs.size());
  const auto map_a = extract_map(a.model);
  const auto map_b = extract_map(b.model);
  for (std::size_t l = 0; l < L; ++l) {
    CHECK((map_a.point(l) - map_b.point(perm[l])).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("extract_map reads w_in rows") {
  auto m = init_model(5, 2, 1);
  m.w_in.row(3) << 1.5, -2.0;
  const auto map = extract_map(m);
  CHECK(map.size() == 5);
  CHECK(map.coords()(3, 0) == 1.5);
  CHECK(map.coords()(3, 1) == -2.0);
  CHECK(map.ids()[3] == 3);
}
