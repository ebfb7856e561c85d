// SPDX-License-Identifier: BSD-3-Clause
#include <array>
#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "land/control.hpp"

using namespace land;

namespace {

// Test-local RK4 on a small fixed-size state, independent of the library
// integrator.
template <std::size_t N, typename Deriv>
std::array<double, N> rk4(const std::array<double, N>& y, double dt, Deriv f) {
    const auto add = [](const std::array<double, N>& a, const std::array<double, N>& b,
                        double s) {
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + s * b[i];
        return out;
    };
    const auto k1 = f(y);
    const auto k2 = f(add(y, k1, dt / 2));
    const auto k3 = f(add(y, k2, dt / 2));
    const auto k4 = f(add(y, k3, dt));
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace

TEST_CASE("sat") {
    CHECK(sat(0.4) == 0.4);
    CHECK(sat(-0.4) == -0.4);
    CHECK(sat(1.0) == 1.0);
    CHECK(sat(7.0) == 1.0);
    CHECK(sat(-7.0) == -1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = r(rng);
        CHECK(sat(-x) == -sat(x));
    }
}

TEST_CASE("position_loop") {
    GainSet g;
    Setpoint sp;
    sp.position = {1.0, -2.0, -3.0};
    SECTION("zero error commands zero velocity") {
        VehicleState s = VehicleState::hovering_at(sp.position);
        const Vec3 v = position_loop(s, sp, g);
        CHECK(v.norm() == 0.0);
    }
    SECTION("deep saturation pins the command at -V_max") {
        VehicleState s = VehicleState::hovering_at(sp.position + Vec3{100.0, 0.0, 0.0});
        const Vec3 v = position_loop(s, sp, g);
        CHECK(v.x == -1.5);
    }
    SECTION("linear band follows -lambda * error") {
        VehicleState s = VehicleState::hovering_at(sp.position + Vec3{0.4, 0.0, 0.0});
        const Vec3 v = position_loop(s, sp, g);
        CHECK(v.x == Catch::Approx(-0.48).epsilon(1e-12));
    }
    SECTION("commands never exceed V_max") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> r(-50.0, 50.0);
        for (int i = 0; i < 100000; ++i) {
            VehicleState s = VehicleState::hovering_at({r(rng), r(rng), r(rng)});
            const Vec3 v = position_loop(s, sp, g);
            CHECK(std::abs(v.x) <= g.v_max);
            CHECK(std::abs(v.y) <= g.v_max);
            CHECK(std::abs(v.z) <= g.v_max);
        }
    }
}

TEST_CASE("velocity_loop") {
    VehicleParams p;
    GainSet g;
    ControllerMemory mem;
    const double hover_thrust = p.hover_thrust();
    SECTION("trimmed hover commands zero pitch") {
        const VelocityLoopResult r = velocity_loop(0.0, 0.0, 0.0, 0.0, mem, hover_thrust, p, g, 0.005);
        CHECK(r.pitch_cmd == 0.0);
        CHECK(r.roll_cmd == 0.0);
    }
    SECTION("unit forward-speed error pitches the nose down") {
        const VelocityLoopResult r = velocity_loop(0.0, 0.0, 1.0, 0.0, mem, hover_thrust, p, g, 0.005);
        CHECK(r.pitch_cmd == Catch::Approx(-(2.0 * 1.3) / 12.753).epsilon(1e-9));
    }
    SECTION("thrust guard") {
        CHECK_THROWS_AS(velocity_loop(0.0, 0.0, 1.0, 0.0, mem, 0.5, p, g, 0.005), ThrustTooLow);
    }
    SECTION("integrators advance with the tracking error") {
        const VelocityLoopResult r = velocity_loop(0.2, -0.1, 1.0, 0.3, mem, hover_thrust, p, g, 0.01);
        CHECK(r.memory.i_u == Catch::Approx(0.5 * 0.8 * 0.01).epsilon(1e-12));
        CHECK(r.memory.i_v == Catch::Approx(0.5 * 0.4 * 0.01).epsilon(1e-12));
    }
    SECTION("clamped output freezes its integrator") {
        const VelocityLoopResult r =
            velocity_loop(0.0, 0.0, 50.0, 0.0, mem, hover_thrust, p, g, 0.01);
        CHECK(r.pitch_cmd == -g.tilt_limit);
        CHECK(r.memory.i_u == 0.0);
        CHECK(r.memory.i_v == 0.0);  // roll channel unclamped but errorless
    }
    SECTION("exact inversion reproduces the reference velocity dynamics") {
        // Route A: thrust-inverted pitch command driving the planar plant.
        // Route B: the second-order reference integrated directly.
        const double u_cmd = 1.0;
        const double dt = 0.005;
        std::array<double, 2> a{0.0, 0.0};  // u, i_u
        std::array<double, 2> b{0.0, 0.0};
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            a = rk4<2>(a, dt, [&](const std::array<double, 2>& y) {
                ControllerMemory m;
                m.i_u = y[1];
                const VelocityLoopResult r =
                    velocity_loop(y[0], 0.0, u_cmd, 0.0, m, hover_thrust, p, g, 0.0);
                const double du = planar_body_accel(y[0], 0.0, hover_thrust, r.pitch_cmd, 0.0, p).du;
                return std::array<double, 2>{du, g.k_iu * (u_cmd - y[0])};
            });
            b = rk4<2>(b, dt, [&](const std::array<double, 2>& y) {
                return std::array<double, 2>{g.lambda_u * (u_cmd - y[0] + y[1]),
                                             g.k_iu * (u_cmd - y[0])};
            });
            worst = std::max(worst, std::abs(a[0] - b[0]));
        }
        CHECK(worst < 1e-6);
        CHECK(std::abs(b[0] - u_cmd) < 0.05);  // the reference itself converged
    }
    SECTION("constant disturbance is rejected by the integrator") {
        const double u_cmd = 0.5;
        const double dt = 0.005;
        double u = 0.0;
        ControllerMemory m;
        for (int k = 0; k < 4000; ++k) {
            const VelocityLoopResult r = velocity_loop(u, 0.0, u_cmd, 0.0, m, hover_thrust, p, g, dt);
            m = r.memory;
            const std::array<double, 1> next = rk4<1>({u}, dt, [&](const std::array<double, 1>& y) {
                const double du =
                    planar_body_accel(y[0], 0.0, hover_thrust, r.pitch_cmd, 0.0, p).du + 0.3;
                return std::array<double, 1>{du};
            });
            u = next[0];
        }
        CHECK(std::abs(u - u_cmd) < 1e-3);
    }
}

TEST_CASE("direct_pitch_filter") {
    GainSet g;
    SECTION("steady state passes through") {
        ControllerMemory mem;
        mem.pitch_filtered = 0.5;
        const PitchFilterResult r = direct_pitch_filter(0.5, mem, g, 0.01);
        CHECK(r.pitch_cmd == Catch::Approx(0.5).epsilon(1e-15));
    }
    SECTION("unit step reaches 1 - 1/e after one time constant") {
        ControllerMemory mem;
        const double dt = 0.005;
        const int steps = static_cast<int>(std::lround(g.pitch_filter_tau / dt));
        PitchFilterResult r;
        r.memory = mem;
        for (int i = 0; i < steps; ++i) r = direct_pitch_filter(1.0, r.memory, g, dt);
        CHECK(r.pitch_cmd == Catch::Approx(1.0 - std::exp(-1.0)).margin(1e-9));
    }
    SECTION("linear in the input from zero state") {
        ControllerMemory a, b;
        for (int i = 0; i < 20; ++i) {
            a = direct_pitch_filter(0.3, a, g, 0.01).memory;
            b = direct_pitch_filter(0.6, b, g, 0.01).memory;
        }
        CHECK(b.pitch_filtered == Catch::Approx(2.0 * a.pitch_filtered).epsilon(1e-12));
    }
}

TEST_CASE("attitude_loop") {
    GainSet g;
    SECTION("matched attitude commands zero deflection") {
        const RotationMatrix R = euler_to_rotation({0.2, 0.4, -0.7});
        const AttitudeLoopResult r = attitude_loop(R, 0.4, 0.2, -0.7, g);
        CHECK(std::abs(r.roll_cyclic) < 1e-12);
        CHECK(std::abs(r.pitch_cyclic) < 1e-12);
        CHECK(std::abs(r.rudder) < 1e-12);
    }
    SECTION("pure yaw error drives only the rudder") {
        const AttitudeLoopResult r =
            attitude_loop(euler_to_rotation({0.0, 0.0, 0.1}), 0.0, 0.0, 0.0, g);
        CHECK(r.rudder == Catch::Approx(0.2).epsilon(1e-12));
        CHECK(r.roll_cyclic == Catch::Approx(0.0).margin(1e-14));
        CHECK(r.pitch_cyclic == Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("deflections scale with the gains before the clamp") {
        GainSet doubled = g;
        doubled.k_roll *= 2.0;
        doubled.k_pitch *= 2.0;
        doubled.k_yaw *= 2.0;
        const RotationMatrix R = euler_to_rotation({0.05, -0.08, 0.1});
        const AttitudeLoopResult one = attitude_loop(R, 0.0, 0.0, 0.0, g);
        const AttitudeLoopResult two = attitude_loop(R, 0.0, 0.0, 0.0, doubled);
        CHECK(two.roll_cyclic == Catch::Approx(2.0 * one.roll_cyclic).epsilon(1e-12));
        CHECK(two.pitch_cyclic == Catch::Approx(2.0 * one.pitch_cyclic).epsilon(1e-12));
        CHECK(two.rudder == Catch::Approx(2.0 * one.rudder).epsilon(1e-12));
    }
    SECTION("large errors clamp to the servo range") {
        const AttitudeLoopResult r =
            attitude_loop(euler_to_rotation({0.0, 0.0, 2.5}), 0.0, 0.0, 0.0, g);
        CHECK(r.rudder == 1.0);
    }
}

TEST_CASE("collective channel") {
    VehicleParams p;
    GainSet g;
    SECTION("hover equilibrium demand") {
        const double d = collective_demand(0.0, 0.0, 0.0, 0.0, 0.0, p, g);
        CHECK(d == Catch::Approx(9.81 * 1.3 / 25.0).epsilon(1e-15));
    }
    SECTION("60 degree pitch doubles the demand") {
        const double level = collective_demand(0.0, 0.0, 0.0, 0.0, 0.0, p, g);
        const double tilted = collective_demand(0.0, 0.0, 0.0, deg_to_rad(60.0), 0.0, p, g);
        CHECK(tilted == Catch::Approx(2.0 * level).epsilon(1e-9));
        ControllerMemory mem;
        const CollectiveLoopResult r =
            collective_loop(0.0, 0.0, deg_to_rad(60.0), 0.0, mem, p, g, 0.005);
        CHECK(r.collective == 1.0);  // demand 1.0202 clamps
        CHECK(r.memory.i_vz == 0.0); // and the clamp freezes the integrator
    }
    SECTION("near-vertical attitude trips the guard") {
        CHECK_THROWS_AS(collective_demand(0.0, 0.0, 0.0, deg_to_rad(89.0), 0.0, p, g),
                        AttitudeTooSteep);
    }
    SECTION("integrator advances with the vertical error") {
        ControllerMemory mem;
        const CollectiveLoopResult r = collective_loop(0.2, 0.5, 0.0, 0.0, mem, p, g, 0.01);
        CHECK(r.memory.i_vz == Catch::Approx(0.8 * 0.3 * 0.01).epsilon(1e-12));
    }
}

TEST_CASE("controller_step") {
    VehicleParams p;
    GainSet g;
    ControlMode mode;
    SECTION("trimmed hover at the setpoint") {
        Setpoint sp;
        sp.position = {0.5, -0.5, -2.0};
        VehicleState s = VehicleState::hovering_at(sp.position);
        const ControllerStepResult r = controller_step(s, sp, mode, {}, p, g, 0.005);
        CHECK(r.command.collective == Catch::Approx(p.hover_collective()).margin(1e-15));
        CHECK(r.command.pitch_cyclic == 0.0);
        CHECK(r.command.roll_cyclic == 0.0);
        CHECK(r.command.rudder == 0.0);
        CHECK(r.memory.i_u == 0.0);
        CHECK(r.memory.i_vz == 0.0);
    }
    SECTION("direct velocity mode ignores the x position") {
        ControlMode direct;
        direct.lateral_source = ControlMode::LateralSource::DirectVelocity;
        Setpoint sp;
        sp.position = {0.0, 0.0, -2.0};
        sp.forward_velocity = 1.0;
        VehicleState near = VehicleState::hovering_at({0.0, 0.0, -2.0});
        VehicleState far = VehicleState::hovering_at({25.0, 0.0, -2.0});
        const ControllerStepResult a = controller_step(near, sp, direct, {}, p, g, 0.005);
        const ControllerStepResult b = controller_step(far, sp, direct, {}, p, g, 0.005);
        CHECK(a.command.pitch_cyclic == b.command.pitch_cyclic);
        CHECK(a.command.collective == b.command.collective);
    }
    SECTION("direct velocity mode requires the setpoint field") {
        ControlMode direct;
        direct.lateral_source = ControlMode::LateralSource::DirectVelocity;
        Setpoint sp;
        VehicleState s = VehicleState::hovering_at({0.0, 0.0, -2.0});
        CHECK_THROWS_AS(controller_step(s, sp, direct, {}, p, g, 0.005), ConstraintViolation);
    }
    SECTION("cascade equals the hand-composed chain of channel laws") {
        std::mt19937_64 rng(59);
        std::uniform_real_distribution<double> pos(-2.0, 2.0);
        std::uniform_real_distribution<double> vel(-0.8, 0.8);
        std::uniform_real_distribution<double> angle(-0.4, 0.4);
        std::uniform_real_distribution<double> integ(-0.2, 0.2);
        for (int i = 0; i < 100; ++i) {
            VehicleState s;
            s.position = {pos(rng), pos(rng), -2.0 + pos(rng)};
            s.velocity = {vel(rng), vel(rng), vel(rng)};
            s.attitude = euler_to_rotation({angle(rng), angle(rng), angle(rng)});
            Setpoint sp;
            sp.position = {pos(rng), pos(rng), -2.0 + pos(rng)};
            sp.yaw = angle(rng);
            ControllerMemory mem;
            mem.i_u = integ(rng);
            mem.i_v = integ(rng);
            mem.i_vz = integ(rng);
            const double dt = 0.005;

            const ControllerStepResult got = controller_step(s, sp, mode, mem, p, g, dt);

            const EulerAngles att = rotation_to_euler(s.attitude);
            const Vec3 vc = position_loop(s, sp, g);
            const auto [u_cmd, v_cmd] = inertial_to_body_planar(vc.x, vc.y, att.yaw);
            const auto [u, v] = inertial_to_body_planar(s.velocity.x, s.velocity.y, att.yaw);
            const CollectiveLoopResult coll =
                collective_loop(s.velocity.z, vc.z, att.pitch, att.roll, mem, p, g, dt);
            const VelocityLoopResult vl = velocity_loop(
                u, v, u_cmd, v_cmd, coll.memory, p.collective_gain * coll.collective, p, g, dt);
            const AttitudeLoopResult al =
                attitude_loop(s.attitude, vl.pitch_cmd, vl.roll_cmd, sp.yaw, g);

            CHECK(got.command.collective == coll.collective);
            CHECK(got.command.pitch_cyclic == al.pitch_cyclic);
            CHECK(got.command.roll_cyclic == al.roll_cyclic);
            CHECK(got.command.rudder == al.rudder);
            CHECK(got.memory.i_u == vl.memory.i_u);
            CHECK(got.memory.i_v == vl.memory.i_v);
            CHECK(got.memory.i_vz == coll.memory.i_vz);
        }
    }
    SECTION("pure function: identical inputs give identical outputs") {
        Setpoint sp;
        sp.position = {1.0, 1.0, -3.0};
        VehicleState s = VehicleState::hovering_at({0.4, 0.9, -2.5});
        s.velocity = {0.1, -0.2, 0.05};
        ControllerMemory mem;
        mem.i_u = 0.05;
        const ControllerStepResult a = controller_step(s, sp, mode, mem, p, g, 0.005);
        const ControllerStepResult b = controller_step(s, sp, mode, mem, p, g, 0.005);
        CHECK(a.command.collective == b.command.collective);
        CHECK(a.command.pitch_cyclic == b.command.pitch_cyclic);
        CHECK(a.command.roll_cyclic == b.command.roll_cyclic);
        CHECK(a.command.rudder == b.command.rudder);
    }
}
