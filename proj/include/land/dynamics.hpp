// SPDX-License-Identifier: BSD-3-Clause
// Simulated plant: simplified planar/vertical translational dynamics, a
// first-order body-rate response per axis, and a fixed-step RK4 integrator
// that keeps the attitude on the rotation group.
#pragma once

#include <cmath>

#include "land/so3.hpp"
#include "land/vehicle.hpp"

namespace land {

struct PlanarAccel {
    double du = 0.0;  // body-forward acceleration, m/s^2
    double dv = 0.0;  // body-lateral acceleration, m/s^2
};

// Planar dynamics in the heading frame. The tilt angles enter linearly
// (small-angle thrust model); drag is quadratic and opposes the velocity,
// so pure-drag motion decays on both axes.
inline PlanarAccel planar_body_accel(double u, double v, double thrust, double pitch,
                                     double roll, const VehicleParams& p) {
    PlanarAccel a;
    a.du = (-thrust * pitch - p.drag_u * std::abs(u) * u) / p.mass_kg;
    a.dv = (thrust * roll - p.drag_v * std::abs(v) * v) / p.mass_kg;
    return a;
}

// Vertical channel, z down: +mg accelerates downward, thrust opposes it
// through cos(pitch)cos(roll), linear drag opposes vz.
inline double vertical_accel(double vz, double thrust, double pitch, double roll,
                             const VehicleParams& p) {
    return (-thrust * std::cos(pitch) * std::cos(roll) + p.mass_kg * p.gravity -
            p.drag_vz * vz) /
           p.mass_kg;
}

// First-order rate tracking per axis: each deflection commands a body rate
// of cyclic_rate_gain * deflection reached with time constant attitude_tau.
inline Vec3 attitude_rate_response(const Vec3& rates, const ActuatorCommand& cmd,
                                   const VehicleParams& p) {
    const double k = p.cyclic_rate_gain;
    return {(k * cmd.roll_cyclic - rates.x) / p.attitude_tau,
            (k * cmd.pitch_cyclic - rates.y) / p.attitude_tau,
            (k * cmd.rudder - rates.z) / p.attitude_tau};
}

struct VehicleStateDerivative {
    Vec3 dposition;
    Vec3 dvelocity;
    RotationMatrix dattitude;  // R * skew(omega); not a rotation itself
    Vec3 dbody_rates;
};

inline VehicleStateDerivative state_derivative(const VehicleState& s, const ActuatorCommand& cmd,
                                               const VehicleParams& p) {
    const double thrust = p.collective_gain * cmd.collective;
    const EulerAngles att = rotation_to_euler_clamped(s.attitude);

    const auto [u, v] = inertial_to_body_planar(s.velocity.x, s.velocity.y, att.yaw);
    const PlanarAccel pa = planar_body_accel(u, v, thrust, att.pitch, att.roll, p);
    const auto [ax, ay] = body_to_inertial_planar(pa.du, pa.dv, att.yaw);

    VehicleStateDerivative d;
    d.dposition = s.velocity;
    d.dvelocity = {ax, ay, vertical_accel(s.velocity.z, thrust, att.pitch, att.roll, p)};

    // Rdot = R * skew(omega)
    const Vec3 w = s.body_rates;
    const RotationMatrix& R = s.attitude;
    for (int r = 0; r < 3; ++r) {
        d.dattitude(r, 0) = R(r, 1) * w.z - R(r, 2) * w.y;
        d.dattitude(r, 1) = R(r, 2) * w.x - R(r, 0) * w.z;
        d.dattitude(r, 2) = R(r, 0) * w.y - R(r, 1) * w.x;
    }
    d.dbody_rates = attitude_rate_response(s.body_rates, cmd, p);
    return d;
}

namespace detail {

inline VehicleState state_add_scaled(const VehicleState& s, const VehicleStateDerivative& d,
                                     double h) {
    VehicleState out = s;
    out.position += d.dposition * h;
    out.velocity += d.dvelocity * h;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out.attitude(r, c) += d.dattitude(r, c) * h;
    out.body_rates += d.dbody_rates * h;
    return out;
}

}  // namespace detail

inline constexpr double kMaxStep = 0.02;  // s

// Classical RK4 step with the command held constant across the step. The
// attitude is integrated as a raw 3x3 matrix and projected back onto the
// rotation group afterwards.
inline VehicleState step_rk4(const VehicleState& s, const ActuatorCommand& cmd, double dt,
                             const VehicleParams& p) {
    if (!(dt > 0.0) || dt > kMaxStep) {
        throw StepTooLarge("step_rk4: dt must lie in (0, 0.02] s");
    }
    const VehicleStateDerivative k1 = state_derivative(s, cmd, p);
    const VehicleStateDerivative k2 = state_derivative(detail::state_add_scaled(s, k1, dt / 2), cmd, p);
    const VehicleStateDerivative k3 = state_derivative(detail::state_add_scaled(s, k2, dt / 2), cmd, p);
    const VehicleStateDerivative k4 = state_derivative(detail::state_add_scaled(s, k3, dt), cmd, p);

    VehicleState out = s;
    const double w1 = dt / 6.0, w2 = dt / 3.0;
    out.position += k1.dposition * w1 + k2.dposition * w2 + k3.dposition * w2 + k4.dposition * w1;
    out.velocity += k1.dvelocity * w1 + k2.dvelocity * w2 + k3.dvelocity * w2 + k4.dvelocity * w1;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            out.attitude(r, c) += k1.dattitude(r, c) * w1 + k2.dattitude(r, c) * w2 +
                                  k3.dattitude(r, c) * w2 + k4.dattitude(r, c) * w1;
    out.body_rates += k1.dbody_rates * w1 + k2.dbody_rates * w2 + k3.dbody_rates * w2 +
                      k4.dbody_rates * w1;
    out.attitude = orthonormalize(out.attitude);
    return out;
}

}  // namespace land
