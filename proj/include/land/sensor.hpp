// SPDX-License-Identifier: BSD-3-Clause
// Motion-capture sensor model: seeded gaussian noise on pose, optional
// noise on the derived velocity/rate feedback, and the first-order lag of
// the velocity estimator.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "land/so3.hpp"
#include "land/vehicle.hpp"

namespace land {

struct SensorModel {
    double sigma_pos = 0.01;      // m per axis
    double sigma_att = 0.01;      // rad, small-rotation magnitude per axis
    double sigma_vel = 0.0;       // m/s per axis
    double sigma_rate = 0.0;      // rad/s per axis
    double vel_filter_tau = 0.05; // estimator lag on velocity/rates, s
    std::uint64_t seed = 1;

    bool noiseless() const {
        return sigma_pos == 0.0 && sigma_att == 0.0 && sigma_vel == 0.0 && sigma_rate == 0.0;
    }

    void validate() const {
        if (sigma_pos < 0.0 || sigma_att < 0.0 || sigma_vel < 0.0 || sigma_rate < 0.0)
            throw ConstraintViolation("sensor: sigma >= 0");
        if (vel_filter_tau < 0.0) throw ConstraintViolation("sensor: vel_filter_tau >= 0");
    }
};

// Deterministic standard-normal source: mt19937_64 plus the Marsaglia
// polar transform, so the stream depends only on the seed, not on any
// library's distribution internals.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform_() - 1.0;
            v = 2.0 * uniform_() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

  private:
    double uniform_() {
        // 53-bit mantissa of a u64 draw -> [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// One noiselessly-sampled pose perturbation. Position picks up zero-mean
// gaussian noise per axis; the attitude is post-multiplied by a small
// random rotation so the sensed attitude stays on the group. Velocity and
// rates pick up their configured direct noise.
inline VehicleState sense(const VehicleState& s, const SensorModel& m, GaussianRng& rng) {
    if (m.noiseless()) return s;
    VehicleState out = s;
    out.position += Vec3{rng(), rng(), rng()} * m.sigma_pos;
    out.attitude = s.attitude * rotation_exp(Vec3{rng(), rng(), rng()} * m.sigma_att);
    out.velocity += Vec3{rng(), rng(), rng()} * m.sigma_vel;
    out.body_rates += Vec3{rng(), rng(), rng()} * m.sigma_rate;
    return out;
}

// Stateful feedback path: lags velocity and body rates through a
// first-order filter (the mocap velocity estimator) and then applies the
// pose noise. A fully noiseless model passes the true state through
// unfiltered so noise-free runs reproduce truth exactly.
class SensorPipeline {
  public:
    explicit SensorPipeline(const SensorModel& model) : model_(model), rng_(model.seed) {}

    VehicleState operator()(const VehicleState& s, double dt) {
        if (model_.noiseless()) return s;
        if (!initialized_) {
            vel_ = s.velocity;
            rates_ = s.body_rates;
            initialized_ = true;
        } else if (model_.vel_filter_tau > 0.0) {
            const double alpha = 1.0 - std::exp(-dt / model_.vel_filter_tau);
            vel_ += (s.velocity - vel_) * alpha;
            rates_ += (s.body_rates - rates_) * alpha;
        } else {
            vel_ = s.velocity;
            rates_ = s.body_rates;
        }
        VehicleState lagged = s;
        lagged.velocity = vel_;
        lagged.body_rates = rates_;
        return sense(lagged, model_, rng_);
    }

  private:
    SensorModel model_;
    GaussianRng rng_;
    bool initialized_ = false;
    Vec3 vel_;
    Vec3 rates_;
};

}  // namespace land
