#include "chunkcount/kalman.hpp"

#include "chunkcount/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace chunkcount {

namespace {

struct Innovation {
    Eigen::Vector2d residual;
    Eigen::Matrix2d cov_inverse;
};

Innovation innovation(const KalmanState& s, Point2 z, const KalmanParams& params) {
    Eigen::Matrix2d cov = s.covariance.topLeftCorner<2, 2>();
    cov(0, 0) += params.measurement_noise_r;
    cov(1, 1) += params.measurement_noise_r;
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
    if (!std::isfinite(det) || std::abs(det) < kSingularDeterminant) {
        throw ValidationError("kalman", "innovation covariance is singular (det=" + std::to_string(det) +
                                            "); check q, r and v0");
    }
    Eigen::Matrix2d inv;
    inv << cov(1, 1), -cov(0, 1), -cov(1, 0), cov(0, 0);
    inv /= det;
    return {Eigen::Vector2d(z.x - s.mean(0), z.y - s.mean(1)), inv};
}

}  // namespace

void validate(const KalmanParams& params) {
    auto check = [](double v, const char* field) {
        if (!std::isfinite(v) || v < 0.0) {
            throw ValidationError(field, "must be a finite value >= 0");
        }
    };
    check(params.process_noise_q, "kalman.q");
    check(params.measurement_noise_r, "kalman.r");
    check(params.initial_velocity_var, "kalman.v0");
    if (!std::isfinite(params.dt) || params.dt <= 0.0) {
        throw ValidationError("kalman.dt", "must be positive");
    }
}

Eigen::Matrix4d transition_matrix(double dt) {
    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 2) = dt;
    f(1, 3) = dt;
    return f;
}

Eigen::Matrix4d process_noise(double q, double dt) {
    const double a = dt * dt * dt * dt / 4.0;
    const double b = dt * dt * dt / 2.0;
    const double c = dt * dt;
    Eigen::Matrix4d m;
    m << a, 0, b, 0,
         0, a, 0, b,
         b, 0, c, 0,
         0, b, 0, c;
    return q * m;
}

KalmanState init_state(Point2 centroid, const KalmanParams& params) {
    KalmanState s;
    s.mean << centroid.x, centroid.y, 0.0, 0.0;
    s.covariance.diagonal() << params.measurement_noise_r, params.measurement_noise_r,
        params.initial_velocity_var, params.initial_velocity_var;
    return s;
}

KalmanState predict(const KalmanState& s, const KalmanParams& params) {
    const Eigen::Matrix4d f = transition_matrix(params.dt);
    KalmanState out;
    out.mean = f * s.mean;
    out.covariance = f * s.covariance * f.transpose() + process_noise(params.process_noise_q, params.dt);
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

KalmanUpdate update(const KalmanState& s, Point2 z, const KalmanParams& params) {
    const Innovation inn = innovation(s, z, params);

    // H selects the position block, so P H^T is the first two columns of P.
    const Eigen::Matrix<double, 4, 2> pht = s.covariance.leftCols<2>();
    const Eigen::Matrix<double, 4, 2> gain = pht * inn.cov_inverse;

    KalmanUpdate out;
    out.state.mean = s.mean + gain * inn.residual;
    // Joseph form keeps the posterior PSD under rounding.
    Eigen::Matrix<double, 4, 4> ikh = Eigen::Matrix4d::Identity();
    ikh.leftCols<2>() -= gain;
    Eigen::Matrix4d cov = ikh * s.covariance * ikh.transpose() +
                          params.measurement_noise_r * gain * gain.transpose();
    out.state.covariance = 0.5 * (cov + cov.transpose());
    out.innovation_distance = inn.residual.dot(inn.cov_inverse * inn.residual);
    return out;
}

double innovation_distance(const KalmanState& s, Point2 z, const KalmanParams& params) {
    const Innovation inn = innovation(s, z, params);
    return inn.residual.dot(inn.cov_inverse * inn.residual);
}

}  // namespace chunkcount
