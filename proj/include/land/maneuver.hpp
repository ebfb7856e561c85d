// SPDX-License-Identifier: BSD-3-Clause
// Hybrid landing automaton: hover -> approach -> flare -> bonded | abort,
// with the x_switch trigger, hook-and-loop bond contact model, the
// unconditional abort timer, and corridor monitoring.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "land/control.hpp"
#include "land/errors.hpp"
#include "land/so3.hpp"
#include "land/vehicle.hpp"

namespace land {

// Square landing pad pitched about the inertial y axis. The surface rises
// along +x like a ramp facing the approaching vehicle; its outward normal
// is (-sin(pitch), 0, -cos(pitch)).
struct LandingPad {
    Vec3 center{0.0, 0.0, -0.8};       // m, inertial, z down
    double pitch = deg_to_rad(10.0);   // rad, about inertial y
    double side = 1.2;                 // m
    double bond_distance = 0.02;       // skid-to-plane contact distance, m
    double bond_attitude_tol = deg_to_rad(15.0);  // relative attitude bound, rad

    // Skid reference points in the body frame (z down, skids below the CG).
    Vec3 skid_a{0.10, 0.15, 0.12};
    Vec3 skid_b{-0.10, -0.15, 0.12};

    RotationMatrix frame() const { return euler_to_rotation({0.0, pitch, 0.0}); }
    Vec3 normal() const { return frame() * Vec3{0.0, 0.0, -1.0}; }
    Vec3 up_slope() const { return frame() * Vec3{1.0, 0.0, 0.0}; }

    // CG position at which the skid midpoints sit on the pad center.
    Vec3 touchdown_aim() const { return center + normal() * skid_a.z; }

    LandingPad displaced(const Vec3& offset) const {
        LandingPad moved = *this;
        moved.center += offset;
        return moved;
    }

    void validate() const {
        if (!(side > 0.0)) throw ConstraintViolation("pad: side length > 0");
        if (pitch < 0.0 || pitch > deg_to_rad(70.0))
            throw ConstraintViolation("pad: 0 <= pitch <= 70 deg");
        if (!(bond_distance > 0.0)) throw ConstraintViolation("pad: bond_distance > 0");
        if (!(bond_attitude_tol > 0.0)) throw ConstraintViolation("pad: bond_attitude_tol > 0");
    }
};

enum class Phase { Hover, Approach, Flare, Bonded, Abort, Recovered };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Hover: return "Hover";
        case Phase::Approach: return "Approach";
        case Phase::Flare: return "Flare";
        case Phase::Bonded: return "Bonded";
        case Phase::Abort: return "Abort";
        case Phase::Recovered: return "Recovered";
    }
    return "?";
}

inline bool phase_terminal(Phase p) { return p == Phase::Bonded || p == Phase::Recovered; }

struct PhaseState {
    Phase phase = Phase::Hover;
    double entered_at = 0.0;  // s
};

// Flight corridor: a trapezoidal prism whose width widens linearly from
// the inception plane toward the pad end.
struct Corridor {
    double depth = 6.0;            // m along x
    double width_inception = 1.0;  // m
    double width_pad = 3.0;        // m
    double height = 3.0;           // m above ground
    double inception_x = std::numeric_limits<double>::quiet_NaN();  // resolved from pad
    double inception_y = std::numeric_limits<double>::quiet_NaN();

    void validate() const {
        if (!(depth > 0.0) || !(width_inception > 0.0) || !(width_pad > 0.0) ||
            !(height > 0.0))
            throw ConstraintViolation("corridor: positive dimensions");
    }
};

// Distance outside the corridor (0 when inside).
inline double corridor_violation(const VehicleState& s, const Corridor& c) {
    const double x0 = c.inception_x;
    const double x1 = c.inception_x + c.depth;
    double worst = 0.0;
    worst = std::max(worst, x0 - s.position.x);
    worst = std::max(worst, s.position.x - x1);
    const double frac = std::clamp((s.position.x - x0) / c.depth, 0.0, 1.0);
    const double half_width =
        0.5 * (c.width_inception + frac * (c.width_pad - c.width_inception));
    worst = std::max(worst, std::abs(s.position.y - c.inception_y) - half_width);
    const double alt = s.altitude();
    worst = std::max(worst, alt - c.height);
    worst = std::max(worst, -alt);
    return std::max(worst, 0.0);
}

inline bool corridor_check(const VehicleState& s, const Corridor& c) {
    return corridor_violation(s, c) == 0.0;
}

// Maneuver schedule. Fields defaulting to NaN are resolved against the pad
// by resolved_against(); the sequencer requires a resolved config.
struct ManeuverConfig {
    double x_switch = std::numeric_limits<double>::quiet_NaN();     // m
    double approach_speed = 1.0;                                    // m/s
    double flare_pitch = std::numeric_limits<double>::quiet_NaN();  // rad; default pad pitch
    double abort_delay = 2.5;                                       // s after flare entry
    Vec3 abort_waypoint{std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()};
    Vec3 hover_start{std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN()};
    double approach_height_offset = 0.0;  // approach altitude above the aim point, m
    double flare_sink_bias = 0.15;        // flare z_cmd below the aim point, m

    ManeuverConfig resolved_against(const LandingPad& pad) const {
        ManeuverConfig r = *this;
        const Vec3 aim = pad.touchdown_aim();
        if (std::isnan(r.flare_pitch)) r.flare_pitch = pad.pitch;
        if (std::isnan(r.hover_start.x)) r.hover_start.x = pad.center.x - 4.0;
        if (std::isnan(r.hover_start.y)) r.hover_start.y = pad.center.y;
        if (std::isnan(r.hover_start.z)) r.hover_start.z = aim.z - r.approach_height_offset;
        if (std::isnan(r.x_switch)) r.x_switch = pad.center.x - 1.5;
        if (std::isnan(r.abort_waypoint.x)) r.abort_waypoint.x = r.hover_start.x;
        if (std::isnan(r.abort_waypoint.y)) r.abort_waypoint.y = r.hover_start.y;
        if (std::isnan(r.abort_waypoint.z))
            r.abort_waypoint.z = std::min(r.hover_start.z, aim.z - 1.0);
        return r;
    }

    void validate(const LandingPad& pad) const {
        if (!(abort_delay > 0.0)) throw ConstraintViolation("maneuver: T_abort > 0");
        if (!(approach_speed > 0.0)) throw ConstraintViolation("maneuver: approach speed > 0");
        if (!std::isnan(x_switch) && !std::isnan(hover_start.x)) {
            if (!(x_switch > hover_start.x && x_switch < pad.center.x + 0.5 * pad.side))
                throw ConstraintViolation(
                    "maneuver: x_switch between hover start and pad along-track positions");
        }
    }
};

// True iff both skid reference points sit on the pad surface: within
// bond_distance of the plane, projected inside the square, with the
// vehicle-to-pad attitude error angle inside bond_attitude_tol.
inline bool contact_check(const VehicleState& s, const LandingPad& pad) {
    const Vec3 n = pad.normal();
    const Vec3 t = pad.up_slope();
    const Vec3 lateral{0.0, 1.0, 0.0};
    for (const Vec3& offset : {pad.skid_a, pad.skid_b}) {
        const Vec3 world = s.position + s.attitude * offset;
        const Vec3 rel = world - pad.center;
        if (std::abs(n.dot(rel)) > pad.bond_distance) return false;
        if (std::abs(t.dot(rel)) > 0.5 * pad.side) return false;
        if (std::abs(lateral.dot(rel)) > 0.5 * pad.side) return false;
    }
    const double attitude_gap = rotation_angle(pad.frame().transposed() * s.attitude);
    return attitude_gap <= pad.bond_attitude_tol;
}

// Freeze the vehicle rigidly to the pad. Pose is kept bit-exact; motion is
// zeroed. Once bonded, plant stepping must leave the state untouched.
inline VehicleState apply_bond(const VehicleState& s, const LandingPad& pad) {
    if (!contact_check(s, pad)) {
        throw NotInContact("apply_bond: skids are not in contact with the pad");
    }
    VehicleState bonded = s;
    bonded.velocity = {0.0, 0.0, 0.0};
    bonded.body_rates = {0.0, 0.0, 0.0};
    return bonded;
}

// Total transition function of the automaton. The only edges are
// Hover->Approach, Approach->Flare, Flare->{Bonded, Abort},
// Abort->Recovered; Bonded and Recovered are absorbing.
inline PhaseState phase_transition(const PhaseState& ps, const VehicleState& s,
                                   const LandingPad& pad, const ManeuverConfig& cfg, double t) {
    switch (ps.phase) {
        case Phase::Hover:
            // Operator start: the run begins once the hover point is held.
            if ((s.position - cfg.hover_start).norm() < 0.3 && s.velocity.norm() < 0.3)
                return {Phase::Approach, t};
            break;
        case Phase::Approach:
            if (s.position.x >= cfg.x_switch) return {Phase::Flare, t};
            break;
        case Phase::Flare:
            if (contact_check(s, pad)) return {Phase::Bonded, t};
            if (t - ps.entered_at >= cfg.abort_delay) return {Phase::Abort, t};
            break;
        case Phase::Abort:
            if ((s.position - cfg.abort_waypoint).norm() < 0.2 && s.velocity.norm() < 0.2)
                return {Phase::Recovered, t};
            break;
        case Phase::Bonded:
        case Phase::Recovered:
            break;
    }
    return ps;
}

struct PhaseSetpoint {
    Setpoint setpoint;
    ControlMode mode;
};

// Step inputs fed to the control stack for each phase. Yaw is held to the
// pad heading throughout. Requires a resolved ManeuverConfig.
inline PhaseSetpoint setpoints_for_phase(Phase phase, const LandingPad& pad,
                                         const ManeuverConfig& cfg) {
    const Vec3 aim = pad.touchdown_aim();
    PhaseSetpoint out;
    switch (phase) {
        case Phase::Hover:
            out.setpoint.position = cfg.hover_start;
            return out;
        case Phase::Approach:
            // Forward speed commanded directly; y/z/yaw held by position laws.
            out.setpoint.position = {pad.center.x, pad.center.y,
                                     aim.z - cfg.approach_height_offset};
            out.setpoint.forward_velocity = cfg.approach_speed;
            out.mode.lateral_source = ControlMode::LateralSource::DirectVelocity;
            return out;
        case Phase::Flare:
            // Pitch commanded directly to the pad angle; the along-track
            // channel is uncontrolled while z settles onto the surface.
            out.setpoint.position = {pad.center.x, pad.center.y, aim.z + cfg.flare_sink_bias};
            out.setpoint.forward_velocity = 0.0;
            out.setpoint.pitch_direct = cfg.flare_pitch;
            out.mode.lateral_source = ControlMode::LateralSource::DirectVelocity;
            out.mode.pitch_source = ControlMode::PitchSource::DirectPitch;
            return out;
        case Phase::Abort:
        case Phase::Recovered:
            // Climb away and translate back; pitch released to the
            // velocity loop.
            out.setpoint.position = cfg.abort_waypoint;
            return out;
        case Phase::Bonded:
            throw TerminalPhase("setpoints_for_phase: Bonded is terminal");
    }
    throw TerminalPhase("setpoints_for_phase: unreachable phase");
}

}  // namespace land
