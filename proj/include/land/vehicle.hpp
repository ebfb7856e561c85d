// SPDX-License-Identifier: BSD-3-Clause
// Vehicle state, actuator command, and physical constants.
//
// Frame conventions used throughout the library:
//   - inertial axes: x along-track (approach direction), y to the right,
//     z positive DOWN. Gravity is the +z term; altitude is h = -z.
//   - attitude R maps body vectors into the inertial frame.
//   - body rates (p, q, r) about body x/y/z.
#pragma once

#include "land/errors.hpp"
#include "land/so3.hpp"

namespace land {

struct VehicleParams {
    double mass_kg = 1.3;           // all-up mass
    double drag_u = 0.05;           // planar drag, body-forward axis, kg/m
    double drag_v = 0.05;           // planar drag, body-lateral axis, kg/m
    double drag_vz = 0.10;          // vertical drag, kg/s
    double collective_gain = 25.0;  // thrust per unit collective, N
    double gravity = 9.81;          // m/s^2
    double attitude_tau = 0.15;     // body-rate response time constant, s

    // Commanded body rate per unit cyclic/rudder deflection, rad/s.
    // Negative: positive deflection commands a negative body rate. This is
    // the servo convention that closes the proportional attitude loop
    // (deflection = gain * log-error, positive gains) as a stable loop.
    double cyclic_rate_gain = -3.0;

    void validate() const {
        if (!(mass_kg > 0.0)) throw ConstraintViolation("vehicle: m > 0");
        if (!(collective_gain > 0.0)) throw ConstraintViolation("vehicle: k_coll > 0");
        if (!(attitude_tau > 0.0)) throw ConstraintViolation("vehicle: tau_att > 0");
        if (!(gravity > 0.0)) throw ConstraintViolation("vehicle: g > 0");
        if (drag_u < 0.0 || drag_v < 0.0 || drag_vz < 0.0)
            throw ConstraintViolation("vehicle: drag coefficients >= 0");
    }

    double hover_thrust() const { return gravity * mass_kg; }
    double hover_collective() const { return hover_thrust() / collective_gain; }
};

struct VehicleState {
    Vec3 position;                                    // m, inertial, z down
    Vec3 velocity;                                    // m/s, inertial
    RotationMatrix attitude;                          // body -> inertial
    Vec3 body_rates;                                  // p, q, r, rad/s

    static VehicleState hovering_at(const Vec3& position) {
        VehicleState s;
        s.position = position;
        return s;
    }

    double altitude() const { return -position.z; }
};

// Normalized actuator deflections. Cyclics and rudder live in [-1, 1],
// collective in [0, 1] once saturated by the controller.
struct ActuatorCommand {
    double collective = 0.0;
    double pitch_cyclic = 0.0;
    double roll_cyclic = 0.0;
    double rudder = 0.0;
};

}  // namespace land
