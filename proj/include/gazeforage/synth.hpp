#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazeforage/errors.hpp"
#include "gazeforage/rng.hpp"
#include "gazeforage/stats.hpp"
#include "gazeforage/types.hpp"

namespace gazeforage {

struct FixationModel {
    double micro_sigma_px = 3.0;  // micro-step length scale |N(0, sigma)|
    double dwell_geom_p = 0.25;   // geometric dwell: mean 1/p micro-steps per fixation
};

struct AngleModel {
    double p_straight = 0.35;
    double p_reverse = 0.15;
    double sigma_rad = 0.25;
    // remaining mass: equal mixture of wrapped Gaussians at +pi/2 and -pi/2
};

struct SynthConfig {
    double mu = 2.2;
    double l_min = 5.0;
    std::optional<double> l_max = 2000.0;
    std::uint64_t n_steps = 1000;  // saccade count
    double bounds_w_px = 1920.0;
    double bounds_h_px = 1080.0;
    std::optional<FixationModel> fixation = FixationModel{};
    AngleModel angles;
    double sample_rate_hz = 120.0;
    std::uint64_t seed = 1;
};

struct SynthResult {
    Trajectory trajectory;   // every emitted point, timestamped at the sample rate
    StepSeries saccades;     // realized saccade lengths only
};

inline double wrap_angle(double a) {
    a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
    if (a <= 0.0) a += 2.0 * std::numbers::pi;
    return a - std::numbers::pi;
}

// Inverse-CDF draw from the Pareto density ~ l^(-mu) on [l_min, l_max].
// u = 0 maps to l_min; with truncation u -> 1 maps to l_max.
inline double sample_step(double mu, double l_min, std::optional<double> l_max, double u) {
    if (!(mu > 1.0)) throw InvalidExponent(mu);
    if (!(l_min > 0.0)) throw InvalidSynthConfig("l_min must be positive");
    if (!(u >= 0.0 && u < 1.0)) throw InvalidSynthConfig("u must lie in [0, 1)");
    const double inv_exp = -1.0 / (mu - 1.0);
    if (!l_max) return l_min * std::pow(1.0 - u, inv_exp);
    if (!(*l_max > l_min)) throw InvalidSynthConfig("l_max must exceed l_min");
    const double tail_mass = 1.0 - std::pow(*l_max / l_min, 1.0 - mu);
    return l_min * std::pow(1.0 - u * tail_mass, inv_exp);
}

// Mixture of wrapped Gaussians: straight continuation at 0, reversal at pi,
// and sideways lobes at +-pi/2 sharing the leftover mass.
inline double sample_turn(const AngleModel& m, Rng& rng) {
    const double branch = rng.uniform();
    double center;
    if (branch < m.p_straight)
        center = 0.0;
    else if (branch < m.p_straight + m.p_reverse)
        center = std::numbers::pi;
    else
        center = rng.uniform() < 0.5 ? std::numbers::pi / 2.0 : -std::numbers::pi / 2.0;
    return wrap_angle(rng.normal(center, m.sigma_rad));
}

namespace detail {

inline void validate_config(const SynthConfig& c) {
    if (!(c.mu > 1.0)) throw InvalidExponent(c.mu);
    if (!(c.l_min > 0.0)) throw InvalidSynthConfig("l_min must be positive");
    if (c.l_max && !(*c.l_max > c.l_min)) throw InvalidSynthConfig("l_max must exceed l_min");
    if (!(c.bounds_w_px > 0.0 && c.bounds_h_px > 0.0))
        throw InvalidSynthConfig("bounds must be positive");
    if (!(c.sample_rate_hz > 0.0)) throw InvalidSynthConfig("sample_rate_hz must be positive");
    const auto& a = c.angles;
    if (!(a.p_straight >= 0.0 && a.p_straight <= 1.0 && a.p_reverse >= 0.0 &&
          a.p_reverse <= 1.0 && a.p_straight + a.p_reverse <= 1.0))
        throw InvalidSynthConfig("angle probabilities must be in [0,1] with sum <= 1");
    if (!(a.sigma_rad >= 0.0)) throw InvalidSynthConfig("sigma_rad must be >= 0");
    if (c.fixation) {
        if (!(c.fixation->micro_sigma_px >= 0.0))
            throw InvalidSynthConfig("micro_sigma_px must be >= 0");
        if (!(c.fixation->dwell_geom_p > 0.0 && c.fixation->dwell_geom_p <= 1.0))
            throw InvalidSynthConfig("dwell_geom_p must be in (0, 1]");
    }
    if (std::hypot(c.bounds_w_px, c.bounds_h_px) <= c.l_min) throw InfeasibleBounds();
}

// Walk state shared by the micro and saccade phases. Steps that would leave
// the bounds are redrawn; after max_attempts the last heading is reflected
// off the violated walls and the endpoint clamped as a final guarantee that
// no point escapes.
struct Walker {
    double x, y;
    double w, h;
    Rng rng;

    static constexpr int max_attempts = 100;

    bool inside(double px, double py) const {
        return px >= 0.0 && px <= w && py >= 0.0 && py <= h;
    }

    // Returns the realized heading after moving by length `len` along
    // `heading`, applying the resample policy via `redraw` when blocked.
    template <typename Redraw>
    double move(double heading, double len, Redraw redraw) {
        double nx = x + len * std::cos(heading);
        double ny = y + len * std::sin(heading);
        for (int attempt = 1; !inside(nx, ny) && attempt < max_attempts; ++attempt) {
            redraw(heading, len);
            nx = x + len * std::cos(heading);
            ny = y + len * std::sin(heading);
        }
        if (!inside(nx, ny)) {
            double dx = std::cos(heading), dy = std::sin(heading);
            if (nx < 0.0 || nx > w) dx = -dx;
            if (ny < 0.0 || ny > h) dy = -dy;
            nx = std::clamp(x + len * dx, 0.0, w);
            ny = std::clamp(y + len * dy, 0.0, h);
        }
        const double realized = std::atan2(ny - y, nx - x);
        x = nx;
        y = ny;
        return realized;
    }
};

}  // namespace detail

// Bounded two-phase Levy walk: geometric-dwell fixation jitter alternating
// with power-law saccades whose headings follow the turn-angle mixture.
// Stops after n_steps saccades or, when max_samples is given, once that many
// points have been emitted. Fully deterministic in (config, seed).
inline SynthResult generate(const SynthConfig& config,
                            std::optional<std::uint64_t> max_samples = std::nullopt) {
    detail::validate_config(config);

    SynthResult out;
    Trajectory& traj = out.trajectory;
    traj.subject_id = "synth";
    traj.image_id = "synthetic";
    traj.screen_w_px = static_cast<int>(std::lround(config.bounds_w_px));
    traj.screen_h_px = static_cast<int>(std::lround(config.bounds_h_px));

    const double dt_ms = 1000.0 / config.sample_rate_hz;
    detail::Walker walker{config.bounds_w_px / 2.0, config.bounds_h_px / 2.0,
                          config.bounds_w_px, config.bounds_h_px, Rng(config.seed)};

    const auto budget_left = [&]() {
        return !max_samples || traj.samples.size() < *max_samples;
    };
    const auto emit = [&]() {
        traj.samples.push_back({double(traj.samples.size()) * dt_ms, walker.x, walker.y, true});
    };

    if (!max_samples || *max_samples > 0) emit();  // start at the image centre

    // With a sample budget the walk alternates phases until the budget is
    // spent; otherwise it stops after n_steps saccades.
    double saccade_heading = walker.rng.uniform(-std::numbers::pi, std::numbers::pi);
    std::uint64_t saccades_done = 0;
    while ((max_samples ? budget_left() : saccades_done < config.n_steps)) {
        if (config.fixation && config.fixation->micro_sigma_px > 0.0) {
            const std::uint64_t dwell = walker.rng.geometric(config.fixation->dwell_geom_p);
            for (std::uint64_t k = 0; k < dwell && budget_left(); ++k) {
                double heading = walker.rng.uniform(-std::numbers::pi, std::numbers::pi);
                double len = std::abs(walker.rng.normal(0.0, config.fixation->micro_sigma_px));
                walker.move(heading, len, [&](double& hd, double& ln) {
                    hd = walker.rng.uniform(-std::numbers::pi, std::numbers::pi);
                    ln = std::abs(walker.rng.normal(0.0, config.fixation->micro_sigma_px));
                });
                emit();
            }
            if (!budget_left()) break;
        }

        const double x0 = walker.x, y0 = walker.y;
        double heading = saccade_heading + sample_turn(config.angles, walker.rng);
        double len = sample_step(config.mu, config.l_min, config.l_max, walker.rng.uniform());
        saccade_heading = walker.move(heading, len, [&](double& hd, double& ln) {
            hd = saccade_heading + sample_turn(config.angles, walker.rng);
            ln = sample_step(config.mu, config.l_min, config.l_max, walker.rng.uniform());
        });
        out.saccades.steps.push_back(std::hypot(walker.x - x0, walker.y - y0));
        emit();
        ++saccades_done;
    }

    out.saccades.provenance.push_back(
        {{traj.subject_id, traj.image_id}, out.saccades.steps.size()});
    return out;
}

// --- session assembly: one independent walk per image slot ---

struct SessionSpec {
    std::string subject_id = "synth";
    std::uint64_t n_images = 1;
    double image_duration_ms = 30000.0;
    double blank_ms = 5000.0;  // blank before each image slot
};

struct SessionResult {
    SessionRecording recording;
    StimulusSchedule schedule;
};

// Each image slot gets its own walk seeded from derive_seed(seed, slot), so
// adding or removing slots never perturbs the others. Samples tick at the
// configured rate from slot onset and stay strictly inside the slot.
inline SessionResult synthesize_session(const SynthConfig& config, const SessionSpec& spec) {
    if (spec.n_images == 0) throw InvalidSynthConfig("n_images must be >= 1");
    if (!(spec.image_duration_ms > 0.0) || !(spec.blank_ms >= 0.0))
        throw InvalidSynthConfig("session durations must be positive");
    const auto per_slot = static_cast<std::uint64_t>(
        spec.image_duration_ms * config.sample_rate_hz / 1000.0);
    if (per_slot == 0) throw InvalidSynthConfig("image slot shorter than one sample period");

    SessionResult out;
    out.recording.subject_id = spec.subject_id;
    out.recording.nominal_rate_hz = config.sample_rate_hz;
    for (std::uint64_t i = 0; i < spec.n_images; ++i) {
        const double onset = spec.blank_ms + double(i) * (spec.image_duration_ms + spec.blank_ms);
        SynthConfig slot_cfg = config;
        slot_cfg.seed = derive_seed(config.seed, i);
        const SynthResult walk = generate(slot_cfg, per_slot);
        for (const GazeSample& s : walk.trajectory.samples)
            out.recording.samples.push_back({onset + s.t_ms, s.x_px, s.y_px, true});
        out.schedule.entries.push_back(
            {"img" + std::to_string(i + 1), onset, spec.image_duration_ms});
    }
    return out;
}

// --- config JSON (missing fields resolve to defaults) ---

inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
    SynthConfig c;
    c.mu = j.value("mu", c.mu);
    c.l_min = j.value("l_min", c.l_min);
    if (j.contains("l_max")) {
        if (j.at("l_max").is_null())
            c.l_max.reset();
        else
            c.l_max = j.at("l_max").get<double>();
    }
    c.n_steps = j.value("n_steps", c.n_steps);
    if (j.contains("bounds")) {
        c.bounds_w_px = j.at("bounds").at("width_px").get<double>();
        c.bounds_h_px = j.at("bounds").at("height_px").get<double>();
    }
    if (j.contains("fixation_model")) {
        if (j.at("fixation_model").is_null()) {
            c.fixation.reset();
        } else {
            FixationModel f;
            f.micro_sigma_px = j.at("fixation_model").value("micro_sigma_px", f.micro_sigma_px);
            f.dwell_geom_p = j.at("fixation_model").value("dwell_geom_p", f.dwell_geom_p);
            c.fixation = f;
        }
    }
    if (j.contains("angle_model")) {
        const auto& a = j.at("angle_model");
        c.angles.p_straight = a.value("p_straight", c.angles.p_straight);
        c.angles.p_reverse = a.value("p_reverse", c.angles.p_reverse);
        c.angles.sigma_rad = a.value("sigma_rad", c.angles.sigma_rad);
    }
    c.sample_rate_hz = j.value("sample_rate_hz", c.sample_rate_hz);
    c.seed = j.value("seed", c.seed);
    return c;
}

inline nlohmann::json synth_config_to_json(const SynthConfig& c) {
    nlohmann::json j{{"mu", c.mu},
                     {"l_min", c.l_min},
                     {"n_steps", c.n_steps},
                     {"bounds", {{"width_px", c.bounds_w_px}, {"height_px", c.bounds_h_px}}},
                     {"angle_model",
                      {{"p_straight", c.angles.p_straight},
                       {"p_reverse", c.angles.p_reverse},
                       {"sigma_rad", c.angles.sigma_rad}}},
                     {"sample_rate_hz", c.sample_rate_hz},
                     {"seed", c.seed}};
    j["l_max"] = c.l_max ? nlohmann::json(*c.l_max) : nlohmann::json(nullptr);
    j["fixation_model"] = c.fixation
                              ? nlohmann::json{{"micro_sigma_px", c.fixation->micro_sigma_px},
                                               {"dwell_geom_p", c.fixation->dwell_geom_p}}
                              : nlohmann::json(nullptr);
    return j;
}

}  // namespace gazeforage
