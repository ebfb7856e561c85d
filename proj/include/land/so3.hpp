// SPDX-License-Identifier: BSD-3-Clause
// SO(3) numerics for the landing stack: Z-Y-X Euler angles, Rodrigues
// exponential, matrix logarithm, and the body-frame attitude error used by
// the proportional attitude loop.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "land/errors.hpp"

namespace land {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Row-major 3x3 rotation matrix mapping body vectors into the inertial
// frame: v_inertial = R * v_body.
struct RotationMatrix {
    std::array<std::array<double, 3>, 3> m{{{1.0, 0.0, 0.0},
                                            {0.0, 1.0, 0.0},
                                            {0.0, 0.0, 1.0}}};

    static RotationMatrix identity() { return {}; }

    double operator()(int r, int c) const { return m[r][c]; }
    double& operator()(int r, int c) { return m[r][c]; }

    RotationMatrix transposed() const {
        RotationMatrix t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t.m[r][c] = m[c][r];
        return t;
    }

    RotationMatrix operator*(const RotationMatrix& o) const {
        RotationMatrix p;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                p.m[r][c] = m[r][0] * o.m[0][c] + m[r][1] * o.m[1][c] + m[r][2] * o.m[2][c];
        return p;
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }

    double trace() const { return m[0][0] + m[1][1] + m[2][2]; }

    // max |(R^T R - I)_ij|; the orthonormality defect checked by tests.
    double orthonormality_defect() const {
        const RotationMatrix g = transposed() * (*this);
        double worst = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                const double target = (r == c) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(g.m[r][c] - target));
            }
        return worst;
    }
};

struct EulerAngles {
    double roll = 0.0;   // phi, rad
    double pitch = 0.0;  // theta, rad
    double yaw = 0.0;    // psi, rad
};

// R = Rz(yaw) * Ry(pitch) * Rx(roll), aerospace Z-Y-X order.
inline RotationMatrix euler_to_rotation(const EulerAngles& e) {
    const double cphi = std::cos(e.roll), sphi = std::sin(e.roll);
    const double cth = std::cos(e.pitch), sth = std::sin(e.pitch);
    const double cpsi = std::cos(e.yaw), spsi = std::sin(e.yaw);
    RotationMatrix R;
    R.m[0][0] = cpsi * cth;
    R.m[0][1] = cpsi * sth * sphi - spsi * cphi;
    R.m[0][2] = cpsi * sth * cphi + spsi * sphi;
    R.m[1][0] = spsi * cth;
    R.m[1][1] = spsi * sth * sphi + cpsi * cphi;
    R.m[1][2] = spsi * sth * cphi - cpsi * sphi;
    R.m[2][0] = -sth;
    R.m[2][1] = cth * sphi;
    R.m[2][2] = cth * cphi;
    return R;
}

// Inverse of euler_to_rotation on |pitch| < pi/2. R(2,0) = -sin(pitch);
// throws GimbalLock within 1e-6 of the singularity.
inline EulerAngles rotation_to_euler(const RotationMatrix& R) {
    if (std::abs(R(2, 0)) >= 1.0 - 1e-6) {
        throw GimbalLock("rotation_to_euler: |pitch| at the +-90 deg singularity");
    }
    EulerAngles e;
    e.pitch = -std::asin(R(2, 0));
    e.roll = std::atan2(R(2, 1), R(2, 2));
    e.yaw = std::atan2(R(1, 0), R(0, 0));
    return e;
}

// Total variant for plant/telemetry use: clamps through the singularity
// instead of throwing. atan2(0,0) = 0 covers the exactly-singular case.
inline EulerAngles rotation_to_euler_clamped(const RotationMatrix& R) {
    EulerAngles e;
    e.pitch = -std::asin(std::clamp(R(2, 0), -1.0, 1.0));
    e.roll = std::atan2(R(2, 1), R(2, 2));
    e.yaw = std::atan2(R(1, 0), R(0, 0));
    return e;
}

// Rodrigues form of exp(skew(v)). Below 1e-5 rad the sin/cos ratios switch
// to their series so the zero-angle limit has no 0/0.
inline RotationMatrix rotation_exp(const Vec3& v) {
    const double angle2 = v.dot(v);
    const double angle = std::sqrt(angle2);
    double a;  // sin(angle)/angle
    double b;  // (1 - cos(angle))/angle^2
    if (angle < 1e-5) {
        a = 1.0 - angle2 / 6.0;
        b = 0.5 - angle2 / 24.0;
    } else {
        a = std::sin(angle) / angle;
        b = (1.0 - std::cos(angle)) / angle2;
    }
    RotationMatrix R;
    R.m[0][0] = 1.0 + b * (-v.z * v.z - v.y * v.y);
    R.m[0][1] = -a * v.z + b * v.x * v.y;
    R.m[0][2] = a * v.y + b * v.x * v.z;
    R.m[1][0] = a * v.z + b * v.x * v.y;
    R.m[1][1] = 1.0 + b * (-v.z * v.z - v.x * v.x);
    R.m[1][2] = -a * v.x + b * v.y * v.z;
    R.m[2][0] = -a * v.y + b * v.x * v.z;
    R.m[2][1] = a * v.x + b * v.y * v.z;
    R.m[2][2] = 1.0 + b * (-v.y * v.y - v.x * v.x);
    return R;
}

// Geodesic rotation angle in [0, pi]. Total on valid rotations.
inline double rotation_angle(const RotationMatrix& R) {
    return std::acos(std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0));
}

// Axis-angle vector of R, the inverse of rotation_exp; its norm is the
// geodesic rotation angle. Throws NearPiRotation within 1e-6 of pi, where
// the axis direction is ill-conditioned.
inline Vec3 rotation_log(const RotationMatrix& R) {
    const double angle = rotation_angle(R);
    if (angle >= kPi - 1e-6) {
        throw NearPiRotation("rotation_log: rotation angle within 1e-6 of pi");
    }
    const Vec3 w{R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1)};
    double factor;  // angle / (2 sin(angle))
    if (angle < 1e-5) {
        factor = 0.5 * (1.0 + angle * angle / 6.0);
    } else {
        factor = angle / (2.0 * std::sin(angle));
    }
    return w * factor;
}

// Body-frame attitude error eps = log(R_cmd^T R); zero iff R == R_cmd.
inline Vec3 attitude_error(const RotationMatrix& R_cmd, const RotationMatrix& R) {
    return rotation_log(R_cmd.transposed() * R);
}

namespace detail {

inline RotationMatrix inverse_3x3(const RotationMatrix& A) {
    const auto& m = A.m;
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    RotationMatrix inv;
    inv.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return inv;
}

}  // namespace detail

// Nearest rotation to an almost-orthonormal matrix: polar projection by
// Newton iteration X <- (X + X^-T)/2, quadratically convergent for the
// near-rotation matrices an integrator produces.
inline RotationMatrix orthonormalize(const RotationMatrix& R) {
    RotationMatrix X = R;
    for (int iter = 0; iter < 12; ++iter) {
        const RotationMatrix Y = detail::inverse_3x3(X).transposed();
        double delta = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                const double next = 0.5 * (X.m[r][c] + Y.m[r][c]);
                delta = std::max(delta, std::abs(next - X.m[r][c]));
                X.m[r][c] = next;
            }
        if (delta < 1e-15) break;
    }
    return X;
}

// Planar command rotation from inertial x/y axes into the heading frame:
// [u; v] = [[cos psi, sin psi], [-sin psi, cos psi]] [vx; vy].
inline std::pair<double, double> inertial_to_body_planar(double vx, double vy, double yaw) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {c * vx + s * vy, -s * vx + c * vy};
}

// Transpose (inverse) of inertial_to_body_planar.
inline std::pair<double, double> body_to_inertial_planar(double u, double v, double yaw) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {c * u - s * v, s * u + c * v};
}

}  // namespace land
