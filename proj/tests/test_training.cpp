#include "doctest.h"
#include "support.hpp"

#include "jssr/error.hpp"
#include "jssr/training.hpp"

#include <cmath>
#include <limits>

using namespace jssr;

namespace {

void step(std::vector<double>& p, const std::vector<double>& g, AdamState& s, const AdamConfig& c) {
    const std::vector<std::span<double>> ps{std::span<double>(p)};
    const std::vector<std::span<const double>> gs{std::span<const double>(g)};
    adam_step(ps, gs, s, c);
}

} // namespace

TEST_CASE("first ADAM step moves by about the learning rate") {
    const AdamConfig c;
    for (double g : {0.3, -2.0, 1e-3}) {
        std::vector<double> p{1.0};
        AdamState s;
        step(p, {g}, s, c);
        CHECK(s.step == 1);
        // m_hat = g, v_hat = g^2.
        const double expect = 1.0 - c.lr * g / (std::abs(g) + c.eps);
        CHECK(p[0] == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("zero gradient leaves parameters and decays moments") {
    const AdamConfig c;
    std::vector<double> p{0.5, -1.0};
    AdamState s;
    step(p, {1.0, 2.0}, s, c);
    const std::vector<double> after = p;
    const double m0 = s.first[0][0], v0 = s.second[0][0];
    step(p, {0.0, 0.0}, s, c);
    CHECK(s.first[0][0] == doctest::Approx(c.beta1 * m0));
    CHECK(s.second[0][0] == doctest::Approx(c.beta2 * v0));
    // Parameters still move on momentum, but a fresh state with zero gradient does not.
    std::vector<double> q{0.5, -1.0};
    AdamState fresh;
    step(q, {0.0, 0.0}, fresh, c);
    CHECK(q == std::vector<double>{0.5, -1.0});
    CHECK(after != p);
}

TEST_CASE("ADAM keeps state across steps") {
    const AdamConfig c;
    std::vector<double> a{0.0}, b{0.0};
    AdamState sa, sb;
    step(a, {1.0}, sa, c);
    step(a, {1.0}, sa, c);
    step(b, {2.0}, sb, c);
    CHECK(a[0] != doctest::Approx(b[0]));

    // Direct recomputation of two steps.
    double m = 0, v = 0, x = 0;
    for (int t = 1; t <= 2; ++t) {
        m = c.beta1 * m + (1 - c.beta1) * 1.0;
        v = c.beta2 * v + (1 - c.beta2) * 1.0;
        x -= c.lr * (m / (1 - std::pow(c.beta1, t))) / (std::sqrt(v / (1 - std::pow(c.beta2, t))) + c.eps);
    }
    CHECK(a[0] == doctest::Approx(x).epsilon(1e-14));
}

TEST_CASE("config validation") {
    TrainConfig c;
    c.adam.lr = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = TrainConfig{};
    c.adam.beta1 = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = TrainConfig{};
    c.batch = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("overfits a tiny training set") {
    const GroupSparsityConfig g{20, 20, 0.2, 0.2};
    const Dataset train_set = generate_dataset(g, 4, 32, 1);
    const Dataset val = generate_dataset(g, 4, 16, 2);
    TrainConfig c;
    c.epochs = 500;
    c.patience = 500;
    c.batch = 32;
    c.adam.lr = 3e-3;
    c.seed = 3;
    for (FeatureKind kind : {FeatureKind::Covariance, FeatureKind::Raw}) {
        const DecoderConfig arch{6, 20, 4, 1, 0, kind};
        const TrainResult r = train(train_set, val, c, arch);
        CHECK(r.log.back().train_loss < 0.05);
        CHECK(r.log.size() == 500);
    }
}

TEST_CASE("training returns the best validation parameters") {
    const GroupSparsityConfig g{20, 5, 0.3, 0.1};
    const Dataset train_set = generate_dataset(g, 4, 400, 4);
    const Dataset val = generate_dataset(g, 4, 100, 5);
    TrainConfig c;
    c.epochs = 30;
    c.patience = 5;
    c.batch = 32;
    c.seed = 6;
    const DecoderConfig arch{6, 20, 4, 1, 0, FeatureKind::Covariance};
    const TrainResult r = train(train_set, val, c, arch);
    const double best = evaluate_loss(r.best, val, c.sigma2);
    const double last = evaluate_loss(r.last, val, c.sigma2);
    CHECK(best <= last);
    CHECK(best < r.initial_val_loss);
    REQUIRE(r.best_epoch >= 1);
    CHECK(best == doctest::Approx(r.log[static_cast<std::size_t>(r.best_epoch - 1)].val_loss).epsilon(1e-12));
    CHECK_NOTHROW(extract_sensing_matrix(r.best.encoder, 1e-9));
    CHECK_NOTHROW(extract_sensing_matrix(r.last.encoder, 1e-9));
    if (r.log.size() < 30) CHECK(static_cast<int>(r.log.size()) - r.best_epoch == c.patience);
}

TEST_CASE("single-threaded training is reproducible") {
    const GroupSparsityConfig g{12, 4, 0.3, 0.2};
    const Dataset train_set = generate_dataset(g, 3, 64, 7);
    const Dataset val = generate_dataset(g, 3, 32, 8);
    TrainConfig c;
    c.epochs = 5;
    c.batch = 16;
    c.seed = 9;
    c.backend = kernels::Backend::Serial;
    const DecoderConfig arch{4, 12, 3, 1, 0, FeatureKind::Covariance};
    const TrainResult a = train(train_set, val, c, arch);
    const TrainResult b = train(train_set, val, c, arch);
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].train_loss == b.log[i].train_loss);
        CHECK(a.log[i].val_loss == b.log[i].val_loss);
    }
    CHECK(a.best.encoder.re == b.best.encoder.re);

    c.noise = NoisePolicy::FixedPerSample;
    const TrainResult f = train(train_set, val, c, arch);
    CHECK(f.log[0].train_loss != a.log[0].train_loss);
}

TEST_CASE("non-finite data aborts training") {
    const GroupSparsityConfig g{8, 2, 0.5, 0.5};
    Dataset train_set = generate_dataset(g, 2, 8, 10);
    const Dataset val = generate_dataset(g, 2, 4, 11);
    for (auto& s : train_set.samples) s.X.re(0, 0) = std::numeric_limits<double>::quiet_NaN();
    TrainConfig c;
    c.epochs = 2;
    const DecoderConfig arch{3, 8, 2, 1, 0, FeatureKind::Covariance};
    CHECK_THROWS_AS(train(train_set, val, c, arch), DivergenceError);
}

TEST_CASE("dataset shape must match the architecture") {
    const GroupSparsityConfig g{8, 2, 0.5, 0.5};
    const Dataset d = generate_dataset(g, 2, 4, 12);
    const DecoderConfig arch{3, 10, 2, 1, 0, FeatureKind::Covariance};
    CHECK_THROWS_AS(train(d, d, TrainConfig{}, arch), DimensionError);
}

TEST_CASE("measure_dataset uses the shared per-sample noise") {
    const GroupSparsityConfig g{10, 2, 0.5, 0.5};
    const Dataset d = generate_dataset(g, 3, 6, 13);
    const ComplexMatrix A = test::random_complex(4, 10, 14);
    const ComplexMatrix Y = measure_dataset(A, d, 0.2);
    for (Index i = 0; i < 6; ++i) {
        const ComplexMatrix expect = apply_sensing(A, d.samples[static_cast<std::size_t>(i)].X,
                                                   sample_noise_for(4, 3, 0.2, 13, i));
        CHECK(Y.col_block(i * 3, 3) == expect);
    }
    CHECK(measure_dataset(A, d, 0.2, 2, 3) == Y.col_block(6, 9));
}
