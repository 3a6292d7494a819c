#pragma once

#include "chunkcount/geometry.hpp"

#include <Eigen/Core>

namespace chunkcount {

struct KalmanParams {
    double dt = 1.0;                       // frames per step
    double process_noise_q = 1.0;          // px^2 / frame^2
    double measurement_noise_r = 1.0;      // px^2
    double initial_velocity_var = 1000.0;  // (px / frame)^2

    friend bool operator==(const KalmanParams&, const KalmanParams&) = default;
};

// Throws ValidationError if any variance is negative or dt is not positive.
void validate(const KalmanParams& params);

// Constant-velocity state [px, py, vx, vy].
struct KalmanState {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();

    Point2 position() const { return {mean(0), mean(1)}; }
    Point2 velocity() const { return {mean(2), mean(3)}; }
};

struct KalmanUpdate {
    KalmanState state;
    double innovation_distance;  // squared Mahalanobis distance of the innovation
};

// Innovation covariance determinant below this is treated as singular.
inline constexpr double kSingularDeterminant = 1e-12;

KalmanState init_state(Point2 centroid, const KalmanParams& params);

// x <- F x, P <- F P F^T + Q with Q the piecewise-constant white-acceleration
// noise q * G G^T, G = [dt^2/2, dt]^T per axis.
KalmanState predict(const KalmanState& s, const KalmanParams& params);

// Position-only measurement update. Throws ValidationError when the
// innovation covariance is singular.
KalmanUpdate update(const KalmanState& s, Point2 z, const KalmanParams& params);

// Squared Mahalanobis distance of z from the predicted measurement, without
// updating. Used for the optional Mahalanobis gating metric.
double innovation_distance(const KalmanState& s, Point2 z, const KalmanParams& params);

Eigen::Matrix4d transition_matrix(double dt);
Eigen::Matrix4d process_noise(double q, double dt);

}  // namespace chunkcount
