// SPDX-License-Identifier: BSD-3-Clause
// Cascaded flight control: saturated position loops, integrator-augmented
// planar velocity loops closed by dynamic inversion, a proportional
// attitude loop on the SO(3) log error, the collective/vertical channel,
// and a first-order filter for directly commanded pitch.
//
// All loops are pure functions: controller state (integrators, filter) is
// passed in and returned, never hidden.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "land/dynamics.hpp"
#include "land/errors.hpp"
#include "land/so3.hpp"
#include "land/vehicle.hpp"

namespace land {

// Unit saturation: odd, identity on [-1, 1], clamped outside.
inline double sat(double x) { return std::clamp(x, -1.0, 1.0); }

struct GainSet {
    double v_max = 1.5;        // commanded-speed bound, m/s
    double lambda_p = 1.2;     // planar position gain, 1/s
    double lambda_z = 1.2;     // vertical position gain, 1/s
    double lambda_u = 2.0;     // forward velocity gain, 1/s
    double lambda_v = 2.0;     // lateral velocity gain, 1/s
    double k_iu = 0.5;         // forward velocity integrator, 1/s
    double k_iv = 0.5;         // lateral velocity integrator, 1/s
    double lambda_vz = 3.0;    // vertical velocity gain, 1/s
    double k_ivz = 0.8;        // vertical velocity integrator, 1/s
    double k_roll = 1.5;       // deflection per rad of roll log-error
    double k_pitch = 1.5;      // deflection per rad of pitch log-error
    double k_yaw = 2.0;        // deflection per rad of yaw log-error
    double pitch_filter_tau = 0.15;          // direct-pitch low-pass, s
    double tilt_limit = deg_to_rad(75.0);    // velocity-loop output clamp, rad

    void validate() const {
        if (!(v_max > 0.0)) throw ConstraintViolation("gains: V_max > 0");
        const double all[] = {lambda_p, lambda_z, lambda_u, lambda_v, k_iu,  k_iv,
                              lambda_vz, k_ivz,   k_roll,   k_pitch,  k_yaw, pitch_filter_tau,
                              tilt_limit};
        for (double g : all)
            if (!(g > 0.0)) throw ConstraintViolation("gains: all gains strictly positive");
    }
};

struct ControllerMemory {
    double i_u = 0.0;            // forward velocity integrator, m/s
    double i_v = 0.0;            // lateral velocity integrator, m/s
    double i_vz = 0.0;           // vertical velocity integrator, m/s
    double pitch_filtered = 0.0; // direct-pitch filter state, rad
};

// Which source feeds each inverted channel.
struct ControlMode {
    enum class LateralSource { Position, DirectVelocity };
    enum class PitchSource { VelocityLoop, DirectPitch };
    LateralSource lateral_source = LateralSource::Position;
    PitchSource pitch_source = PitchSource::VelocityLoop;
};

struct Setpoint {
    Vec3 position;                               // x_cmd, y_cmd, z_cmd (z down), m
    double yaw = 0.0;                            // psi_cmd, rad
    std::optional<double> forward_velocity;      // direct vx_cmd, m/s
    std::optional<double> pitch_direct;          // theta_d, rad
};

// Saturated proportional position laws. Each output is bounded by v_max
// and falls back to a straight -lambda * error inside the linear band.
inline Vec3 position_loop(const VehicleState& s, const Setpoint& sp, const GainSet& g) {
    const auto law = [&](double err, double lambda) {
        return -g.v_max * sat(lambda * err / g.v_max);
    };
    return {law(s.position.x - sp.position.x, g.lambda_p),
            law(s.position.y - sp.position.y, g.lambda_p),
            law(s.position.z - sp.position.z, g.lambda_z)};
}

inline constexpr double kMinInversionThrust = 0.5;  // N

struct VelocityLoopResult {
    double pitch_cmd = 0.0;  // theta_cmd, rad
    double roll_cmd = 0.0;   // phi_cmd, rad
    ControllerMemory memory;
};

// Planar velocity loop. Inverts the planar dynamics so the closed loop
// follows the second-order reference
//     du/dt = lambda_u (u_cmd - u + i_u),   di_u/dt = k_iu (u_cmd - u)
// and likewise for v. The drag term carries the plant's sign convention so
// the inversion is exact. Outputs clamp to +-tilt_limit; a clamped channel
// freezes its integrator (anti-windup).
inline VelocityLoopResult velocity_loop(double u, double v, double u_cmd, double v_cmd,
                                        const ControllerMemory& mem, double thrust,
                                        const VehicleParams& p, const GainSet& g, double dt) {
    if (!(thrust > kMinInversionThrust)) {
        throw ThrustTooLow("velocity_loop: thrust at or below the inversion guard");
    }
    VelocityLoopResult out;
    out.memory = mem;

    const double theta_raw =
        -(g.lambda_u * p.mass_kg * (mem.i_u + u_cmd - u) + p.drag_u * u * std::abs(u)) / thrust;
    const double phi_raw =
        (g.lambda_v * p.mass_kg * (mem.i_v + v_cmd - v) + p.drag_v * v * std::abs(v)) / thrust;

    out.pitch_cmd = std::clamp(theta_raw, -g.tilt_limit, g.tilt_limit);
    out.roll_cmd = std::clamp(phi_raw, -g.tilt_limit, g.tilt_limit);
    if (out.pitch_cmd == theta_raw) out.memory.i_u += g.k_iu * (u_cmd - u) * dt;
    if (out.roll_cmd == phi_raw) out.memory.i_v += g.k_iv * (v_cmd - v) * dt;
    return out;
}

struct PitchFilterResult {
    double pitch_cmd = 0.0;
    ControllerMemory memory;
};

// First-order low-pass on the directly commanded pitch; exact exponential
// discretization, DC gain 1.
inline PitchFilterResult direct_pitch_filter(double pitch_d, const ControllerMemory& mem,
                                             const GainSet& g, double dt) {
    PitchFilterResult out;
    out.memory = mem;
    const double alpha = 1.0 - std::exp(-dt / g.pitch_filter_tau);
    out.memory.pitch_filtered = mem.pitch_filtered + alpha * (pitch_d - mem.pitch_filtered);
    out.pitch_cmd = out.memory.pitch_filtered;
    return out;
}

struct AttitudeLoopResult {
    double roll_cyclic = 0.0;
    double pitch_cyclic = 0.0;
    double rudder = 0.0;
};

// Proportional attitude loop on the body-frame log error of
// R_err = R_cmd^T R. Deflections clamp to [-1, 1].
inline AttitudeLoopResult attitude_loop(const RotationMatrix& R, double pitch_cmd,
                                        double roll_cmd, double yaw_cmd, const GainSet& g) {
    const RotationMatrix R_cmd = euler_to_rotation({roll_cmd, pitch_cmd, yaw_cmd});
    const Vec3 eps = attitude_error(R_cmd, R);
    AttitudeLoopResult out;
    out.roll_cyclic = sat(g.k_roll * eps.x);
    out.pitch_cyclic = sat(g.k_pitch * eps.y);
    out.rudder = sat(g.k_yaw * eps.z);
    return out;
}

inline constexpr double kMinVerticalAuthority = 0.1;  // cos(pitch)*cos(roll) guard

// Unclamped collective demand from inverting the vertical dynamics against
//     dvz/dt = lambda_vz (vz_cmd - vz + i_vz)
// Throws AttitudeTooSteep when the tilt leaves too little vertical thrust
// authority to invert through.
inline double collective_demand(double vz, double vz_cmd, double i_vz, double pitch, double roll,
                                const VehicleParams& p, const GainSet& g) {
    const double authority = std::cos(pitch) * std::cos(roll);
    if (!(authority > kMinVerticalAuthority)) {
        throw AttitudeTooSteep("collective_demand: cos(pitch)cos(roll) <= 0.1");
    }
    return (p.gravity * p.mass_kg - g.lambda_vz * p.mass_kg * (i_vz + vz_cmd - vz) -
            p.drag_vz * vz) /
           (p.collective_gain * authority);
}

struct CollectiveLoopResult {
    double collective = 0.0;
    ControllerMemory memory;
};

// Collective channel with integrator and anti-windup: the integrator
// freezes while the demand sits outside [0, 1].
inline CollectiveLoopResult collective_loop(double vz, double vz_cmd, double pitch, double roll,
                                            const ControllerMemory& mem, const VehicleParams& p,
                                            const GainSet& g, double dt) {
    CollectiveLoopResult out;
    out.memory = mem;
    const double raw = collective_demand(vz, vz_cmd, mem.i_vz, pitch, roll, p, g);
    out.collective = std::clamp(raw, 0.0, 1.0);
    if (out.collective == raw) out.memory.i_vz += g.k_ivz * (vz_cmd - vz) * dt;
    return out;
}

struct ControllerStepResult {
    ActuatorCommand command;
    ControllerMemory memory;
};

// One pass through the cascade:
//   position laws (or direct overrides) -> heading-frame conversion ->
//   collective channel -> planar velocity inversion / pitch filter ->
//   proportional attitude loop.
// The collective channel runs first so the velocity inversion divides by
// the thrust commanded this step; the collective law needs only the
// measured attitude, so no algebraic loop arises.
inline ControllerStepResult controller_step(const VehicleState& s, const Setpoint& sp,
                                            const ControlMode& mode, const ControllerMemory& mem,
                                            const VehicleParams& p, const GainSet& g, double dt) {
    const EulerAngles att = rotation_to_euler_clamped(s.attitude);

    Vec3 vel_cmd = position_loop(s, sp, g);
    if (mode.lateral_source == ControlMode::LateralSource::DirectVelocity) {
        if (!sp.forward_velocity) {
            throw ConstraintViolation("setpoint: forward_velocity required in direct mode");
        }
        vel_cmd.x = std::clamp(*sp.forward_velocity, -g.v_max, g.v_max);
    }
    const auto [u_cmd, v_cmd] = inertial_to_body_planar(vel_cmd.x, vel_cmd.y, att.yaw);
    const auto [u, v] = inertial_to_body_planar(s.velocity.x, s.velocity.y, att.yaw);

    const CollectiveLoopResult coll =
        collective_loop(s.velocity.z, vel_cmd.z, att.pitch, att.roll, mem, p, g, dt);
    const double thrust = p.collective_gain * coll.collective;

    ControllerMemory next = coll.memory;
    double pitch_cmd = 0.0;
    double roll_cmd = 0.0;
    if (mode.pitch_source == ControlMode::PitchSource::VelocityLoop) {
        const VelocityLoopResult vl = velocity_loop(u, v, u_cmd, v_cmd, next, thrust, p, g, dt);
        pitch_cmd = vl.pitch_cmd;
        roll_cmd = vl.roll_cmd;
        next = vl.memory;
        // Track the active pitch command so a later switch to direct pitch
        // starts the filter from where the loop left off.
        next.pitch_filtered = pitch_cmd;
    } else {
        if (!sp.pitch_direct) {
            throw ConstraintViolation("setpoint: pitch_direct required in direct-pitch mode");
        }
        const ControllerMemory before = next;
        const VelocityLoopResult vl = velocity_loop(u, v, u_cmd, v_cmd, next, thrust, p, g, dt);
        roll_cmd = vl.roll_cmd;
        next = vl.memory;
        next.i_u = before.i_u;  // pitch channel inactive: freeze its integrator
        const PitchFilterResult pf = direct_pitch_filter(*sp.pitch_direct, next, g, dt);
        pitch_cmd = pf.pitch_cmd;
        next = pf.memory;
    }

    const AttitudeLoopResult att_out = attitude_loop(s.attitude, pitch_cmd, roll_cmd, sp.yaw, g);

    ControllerStepResult out;
    out.command.collective = coll.collective;
    out.command.pitch_cyclic = att_out.pitch_cyclic;
    out.command.roll_cyclic = att_out.roll_cyclic;
    out.command.rudder = att_out.rudder;
    out.memory = next;
    return out;
}

}  // namespace land
