// SPDX-License-Identifier: BSD-3-Clause
// Scenario orchestration: the fixed-step closed loop
// (sense -> setpoints -> control -> phase transition -> integrate-or-hold),
// trajectory logging, and run classification.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "land/control.hpp"
#include "land/dynamics.hpp"
#include "land/errors.hpp"
#include "land/maneuver.hpp"
#include "land/sensor.hpp"
#include "land/vehicle.hpp"

namespace land {

struct ScenarioConfig {
    VehicleParams vehicle;
    GainSet gains;
    LandingPad pad;            // pad pose the sequencer targets
    Vec3 pad_true_offset;      // displacement of the physical pad (open-loop mismatch)
    Corridor corridor;
    ManeuverConfig maneuver;
    SensorModel sensor;
    double dt = 0.005;             // s
    double t_max = 30.0;           // s
    double log_decimation = 0.06;  // s

    // Fill pad-derived defaults. Idempotent; run_scenario resolves a copy,
    // so configs may keep their auto fields for later pitch sweeps.
    ScenarioConfig resolved() const {
        ScenarioConfig r = *this;
        r.maneuver = maneuver.resolved_against(pad);
        if (std::isnan(r.corridor.inception_x))
            r.corridor.inception_x = pad.center.x - (r.corridor.depth - 1.0);
        if (std::isnan(r.corridor.inception_y)) r.corridor.inception_y = pad.center.y;
        return r;
    }

    void validate() const {
        try {
            vehicle.validate();
            gains.validate();
            pad.validate();
            corridor.validate();
            maneuver.validate(pad);
            sensor.validate();
        } catch (const ConstraintViolation& e) {
            throw ConfigInvalid(e.constraint);
        }
        if (!(dt > 0.0) || dt > kMaxStep) throw ConfigInvalid("sim: 0 < dt <= 0.02");
        if (!(t_max > 0.0)) throw ConfigInvalid("sim: t_max > 0");
        if (log_decimation < dt) throw ConfigInvalid("sim: log decimation >= dt");
    }
};

struct Sample {
    double t = 0.0;
    VehicleState truth;
    VehicleState sensed;
    Setpoint setpoint;
    ActuatorCommand command;
    Phase phase = Phase::Hover;
    bool corridor_ok = true;
};

struct PhaseEvent {
    double t = 0.0;
    Phase from = Phase::Hover;
    Phase to = Phase::Hover;
    VehicleState state;  // snapshot at the transition instant (pre-bond)
};

enum class Termination { Bonded, Recovered, Crashed, Timeout };

struct TrajectoryLog {
    std::vector<Sample> samples;
    std::vector<PhaseEvent> events;
    Termination termination = Termination::Timeout;
    double min_altitude = 0.0;            // m, over the whole run
    double max_corridor_violation = 0.0;  // m, over the whole run
};

enum class Outcome { Landed, AbortedRecovered, Crashed, Timeout };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Landed: return "Landed";
        case Outcome::AbortedRecovered: return "Aborted+Recovered";
        case Outcome::Crashed: return "Crashed";
        case Outcome::Timeout: return "Timeout";
    }
    return "?";
}

struct RunSummary {
    Outcome outcome = Outcome::Timeout;
    std::optional<double> touchdown_pitch;         // rad, at the bond instant
    std::optional<double> touchdown_normal_speed;  // m/s along the pad normal
    double max_corridor_violation = 0.0;           // m
    double min_altitude = 0.0;                     // m
    double t_final = 0.0;                          // s
    Vec3 final_position;
    std::vector<PhaseEvent> timeline;
};

// Plant advance used by the run loop: in the bonded phase the hook-and-loop
// bond dominates every actuator, so the state is returned untouched (exact).
inline VehicleState advance_plant(const VehicleState& s, const ActuatorCommand& cmd, double dt,
                                  const VehicleParams& p, Phase phase) {
    if (phase == Phase::Bonded) return s;
    return step_rk4(s, cmd, dt, p);
}

// Ground contact anywhere but the pad surface. The skids are the lowest
// points that can touch first.
inline bool ground_contact(const VehicleState& s, const LandingPad& pad) {
    for (const Vec3& offset : {pad.skid_a, pad.skid_b}) {
        if ((s.position + s.attitude * offset).z >= 0.0) return true;
    }
    return s.position.z >= 0.0;
}

inline RunSummary summarize(const TrajectoryLog& log, const LandingPad& pad);

inline std::pair<TrajectoryLog, RunSummary> run_scenario(const ScenarioConfig& raw) {
    const ScenarioConfig cfg = raw.resolved();
    cfg.validate();

    const LandingPad pad_actual = cfg.pad.displaced(cfg.pad_true_offset);
    VehicleState state = VehicleState::hovering_at(cfg.maneuver.hover_start);
    ControllerMemory mem;
    PhaseState ps;
    SensorPipeline sensorp(cfg.sensor);

    TrajectoryLog log;
    log.min_altitude = state.altitude();
    const long stride = std::max(1L, std::lround(cfg.log_decimation / cfg.dt));
    const long max_steps = std::lround(cfg.t_max / cfg.dt);

    double last_logged_t = -1.0;
    const auto record = [&](double t, const VehicleState& sensed, const Setpoint& sp,
                            const ActuatorCommand& cmd) {
        if (t == last_logged_t) return;
        Sample smp;
        smp.t = t;
        smp.truth = state;
        smp.sensed = sensed;
        smp.setpoint = sp;
        smp.command = cmd;
        smp.phase = ps.phase;
        smp.corridor_ok = corridor_check(state, cfg.corridor);
        log.samples.push_back(smp);
        last_logged_t = t;
    };

    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * cfg.dt;

        const VehicleState sensed = sensorp(state, cfg.dt);
        const PhaseSetpoint phase_sp = setpoints_for_phase(ps.phase, cfg.pad, cfg.maneuver);
        const ControllerStepResult ctl =
            controller_step(sensed, phase_sp.setpoint, phase_sp.mode, mem, cfg.vehicle,
                            cfg.gains, cfg.dt);
        mem = ctl.memory;

        log.min_altitude = std::min(log.min_altitude, state.altitude());
        log.max_corridor_violation =
            std::max(log.max_corridor_violation, corridor_violation(state, cfg.corridor));
        if (step % stride == 0) record(t, sensed, phase_sp.setpoint, ctl.command);

        const PhaseState next = phase_transition(ps, state, pad_actual, cfg.maneuver, t);
        if (next.phase != ps.phase) {
            log.events.push_back({t, ps.phase, next.phase, state});
            if (next.phase == Phase::Bonded) state = apply_bond(state, pad_actual);
            ps = next;
            if (ps.phase == Phase::Bonded) {
                log.termination = Termination::Bonded;
                record(t, sensed, phase_sp.setpoint, ctl.command);
                break;
            }
            if (ps.phase == Phase::Recovered) {
                log.termination = Termination::Recovered;
                record(t, sensed, phase_sp.setpoint, ctl.command);
                break;
            }
        }

        state = advance_plant(state, ctl.command, cfg.dt, cfg.vehicle, ps.phase);

        if (ground_contact(state, pad_actual)) {
            log.termination = Termination::Crashed;
            log.min_altitude = std::min(log.min_altitude, state.altitude());
            record(t + cfg.dt, sensed, phase_sp.setpoint, ctl.command);
            break;
        }
        if (step + 1 >= max_steps) {
            log.termination = Termination::Timeout;
            record(t + cfg.dt, sensed, phase_sp.setpoint, ctl.command);
            break;
        }
    }

    return {log, summarize(log, pad_actual)};
}

inline RunSummary summarize(const TrajectoryLog& log, const LandingPad& pad) {
    if (log.samples.empty()) throw EmptyLog("summarize: empty trajectory log");
    RunSummary s;
    switch (log.termination) {
        case Termination::Bonded: s.outcome = Outcome::Landed; break;
        case Termination::Recovered: s.outcome = Outcome::AbortedRecovered; break;
        case Termination::Crashed: s.outcome = Outcome::Crashed; break;
        case Termination::Timeout: s.outcome = Outcome::Timeout; break;
    }
    s.timeline = log.events;
    s.max_corridor_violation = log.max_corridor_violation;
    s.min_altitude = log.min_altitude;
    s.t_final = log.samples.back().t;
    s.final_position = log.samples.back().truth.position;
    if (s.outcome == Outcome::Landed) {
        for (const PhaseEvent& e : log.events) {
            if (e.to == Phase::Bonded) {
                s.touchdown_pitch = rotation_to_euler_clamped(e.state.attitude).pitch;
                s.touchdown_normal_speed = std::abs(pad.normal().dot(e.state.velocity));
                break;
            }
        }
    }
    return s;
}

}  // namespace land
