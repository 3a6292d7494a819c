#include "chunkcount/errors.hpp"
#include "chunkcount/kalman.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <random>

using namespace chunkcount;

namespace {

double asymmetry(const Eigen::Matrix4d& p) { return (p - p.transpose()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Eigen::Matrix4d& p) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(0.5 * (p + p.transpose()));
    return es.eigenvalues().minCoeff();
}

KalmanParams params(double q, double r, double v0) {
    KalmanParams k;
    k.process_noise_q = q;
    k.measurement_noise_r = r;
    k.initial_velocity_var = v0;
    return k;
}

}  // namespace

TEST_CASE("init_state") {
    const auto s = init_state({10, 20}, params(1, 1, 100));
    CHECK(s.mean == Eigen::Vector4d(10, 20, 0, 0));
    Eigen::Matrix4d expected = Eigen::Vector4d(1, 1, 100, 100).asDiagonal();
    CHECK(s.covariance == expected);
    CHECK(asymmetry(s.covariance) == 0.0);
    CHECK(min_eigenvalue(s.covariance) >= 0.0);
    CHECK(init_state({0, 0}, params(1, 1, 100)).mean.isZero());
}

TEST_CASE("predict: noiseless motion") {
    KalmanState s;
    s.mean << 0, 0, 1, 1;
    auto out = predict(s, params(0, 1, 1));
    CHECK(out.mean == Eigen::Vector4d(1, 1, 1, 1));
    CHECK(out.covariance.isZero());

    s.mean << 5, 5, -2, 0;
    CHECK(predict(s, params(0, 1, 1)).mean == Eigen::Vector4d(3, 5, -2, 0));
}

TEST_CASE("predict: P = I, q = 0.1 against hand-computed F F^T + Q") {
    // F F^T = [[2,0,1,0],[0,2,0,1],[1,0,1,0],[0,1,0,1]];
    // Q = 0.1 * [[1/4,0,1/2,0],[0,1/4,0,1/2],[1/2,0,1,0],[0,1/2,0,1]].
    Eigen::Matrix4d golden;
    golden << 2.025, 0, 1.05, 0,
              0, 2.025, 0, 1.05,
              1.05, 0, 1.1, 0,
              0, 1.05, 0, 1.1;
    KalmanState s;
    s.covariance.setIdentity();
    const auto out = predict(s, params(0.1, 1, 1));
    CHECK((out.covariance - golden).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("update examples") {
    KalmanState s;
    s.covariance.setIdentity();
    SUBCASE("near-exact measurement dominates") {
        const auto out = update(s, {3, 4}, params(1, 1e-12, 1));
        CHECK(std::abs(out.state.mean(0) - 3.0) <= 1e-6);
        CHECK(std::abs(out.state.mean(1) - 4.0) <= 1e-6);
    }
    SUBCASE("zero innovation") {
        CHECK(update(s, {0, 0}, params(1, 1, 1)).innovation_distance == 0.0);
    }
    SUBCASE("scalar gain 1/(1+1)") {
        const auto out = update(s, {1, 0}, params(1, 1, 1));
        CHECK(std::abs(out.state.mean(0) - 0.5) <= 1e-12);
        CHECK(std::abs(out.state.covariance(0, 0) - 0.5) <= 1e-12);
        // Residual 1 against innovation variance 2.
        CHECK(out.innovation_distance == doctest::Approx(0.5));
    }
    SUBCASE("singular innovation covariance") {
        KalmanState zero;
        CHECK_THROWS_AS(update(zero, {1, 1}, params(0, 0, 0)), ValidationError);
    }
}

TEST_CASE("negative variances are rejected") {
    CHECK_THROWS_AS(validate(params(-1, 1, 1)), ValidationError);
    CHECK_THROWS_AS(validate(params(1, -1, 1)), ValidationError);
    CHECK_THROWS_AS(validate(params(1, 1, -1)), ValidationError);
    CHECK_NOTHROW(validate(params(0, 0, 0)));
}

TEST_CASE("constant-velocity trajectory recovered after three updates") {
    const auto kp = params(0, 1e-6, 1000);
    const Eigen::Vector2d p0(12.5, -7.0), v(3.25, 1.5);
    auto truth = [&](int t) { return Point2{p0(0) + t * v(0), p0(1) + t * v(1)}; };
    auto s = init_state(truth(0), kp);
    for (int t = 1; t <= 3; ++t) {
        s = predict(s, kp);
        s = update(s, truth(t), kp).state;
    }
    CHECK(std::abs(s.mean(0) - truth(3).x) <= 1e-6);
    CHECK(std::abs(s.mean(1) - truth(3).y) <= 1e-6);
}

TEST_CASE("predict twice equals one dt = 2 step on the mean") {
    KalmanState s;
    s.mean << 1, 2, 3, -4;
    auto kp = params(0, 1, 1);
    const auto twice = predict(predict(s, kp), kp);
    kp.dt = 2.0;
    CHECK(twice.mean == predict(s, kp).mean);
}

TEST_CASE("update never increases the position-block trace") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50), var(0.01, 10);
    for (int i = 0; i < 2000; ++i) {
        const auto kp = params(var(rng), var(rng), var(rng) * 100);
        auto s = init_state({u(rng), u(rng)}, kp);
        s = predict(s, kp);
        const double before = s.covariance(0, 0) + s.covariance(1, 1);
        const auto out = update(s, {u(rng), u(rng)}, kp);
        CHECK(out.state.covariance(0, 0) + out.state.covariance(1, 1) <= before + 1e-12);
    }
}

TEST_CASE("covariance stays symmetric PSD over long random runs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-200, 200), var(0.01, 20);
    std::uniform_int_distribution<int> coin(0, 2);
    const auto kp = params(var(rng), var(rng), 1000);
    auto s = init_state({0, 0}, kp);
    double worst_asym = 0, worst_eig = 0;
    for (int i = 0; i < 10000; ++i) {
        if (coin(rng) == 0) {
            s = update(s, {u(rng), u(rng)}, kp).state;
        } else {
            s = predict(s, kp);
        }
        worst_asym = std::max(worst_asym, asymmetry(s.covariance));
        worst_eig = std::min(worst_eig, min_eigenvalue(s.covariance));
    }
    CHECK(worst_asym <= 1e-9);
    CHECK(worst_eig >= -1e-9);
}
