#include "ergosense/simulation.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "ergosense/errors.hpp"
#include "ergosense/esac.hpp"
#include "ergosense/geer.hpp"

namespace ergosense {

namespace {

constexpr double kTieBreak = 1e-6;
constexpr double kTimeEps = 1e-9;

Vec random_direction(int dim, Rng& rng) {
    // Rejection sampling keeps the direction uniform without a normal sampler.
    for (;;) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v(i) = rng.uniform(-1.0, 1.0);
        const double n = v.norm();
        if (n > 1e-3 && n <= 1.0) return v / n;
    }
}

struct Tracker {
    const World& world;
    TrialSummary& summary;

    void contact(const Contact& c) {
        ++summary.contacts;
        if (!summary.first_contact_time) summary.first_contact_time = c.time;
        for (std::size_t s = 0; s < world.shapes().size(); ++s) {
            if (summary.detection_times[s]) continue;
            if (std::abs(world.shapes()[s].boundary_value(c.point)) <= kDetectionTolerance) {
                summary.detection_times[s] = c.time;
                ++summary.detection_count;
            }
        }
        if (!summary.all_detected_time && summary.detection_count == static_cast<int>(world.shapes().size())) {
            summary.all_detected_time = c.time;
        }
    }

    std::vector<bool> flags() const {
        std::vector<bool> out;
        for (const auto& t : summary.detection_times) out.push_back(t.has_value());
        return out;
    }
};

PosteriorSnapshot take_snapshot(double t, const GridSpec& grid, const TargetDistribution& target,
                                const ShapeEstimate* estimate) {
    PosteriorSnapshot snap;
    snap.t = t;
    snap.grid = grid;
    snap.target = target.density;
    if (estimate) {
        snap.estimate = to_string(estimate->representation());
        snap.posterior = estimate->target_weight_grid(grid);
        snap.level = estimate->level_grid(grid);
    }
    return snap;
}

}  // namespace

Vec initial_position(const Scenario& scenario, const World& world, Rng& rng, bool use_fixed) {
    const int dim = scenario.dimension;
    Vec x(dim);
    if (use_fixed && scenario.initial_position) {
        x = *scenario.initial_position;
    } else {
        int attempts = 0;
        do {
            if (++attempts > 100000) throw ValidationError("world", "no free space to start from");
            for (int i = 0; i < dim; ++i) x(i) = rng.uniform();
        } while (!(world.min_value(x) > kShapeMargin));
    }
    Vec shifted = x + kTieBreak * random_direction(dim, rng);
    for (int i = 0; i < dim; ++i) shifted(i) = std::clamp(shifted(i), 0.0, 1.0);
    // The offset must not push a boundary-hugging start inside a shape.
    return world.min_value(shifted) > 0.0 ? shifted : x;
}

RunOutputs run_trial(const Scenario& scenario, std::uint64_t trial, bool use_fixed_start) {
    const auto started = std::chrono::steady_clock::now();
    const int dim = scenario.dimension;
    const World world = scenario.build_world();
    const EsacParams& esac = scenario.esac;
    Rng rng(mix_seed(scenario.seed, trial));

    RunOutputs out;
    TrialSummary& summary = out.summary;
    summary.trial = trial;
    summary.policy = to_string(scenario.policy);
    summary.detection_times.assign(world.shapes().size(), std::nullopt);
    Tracker tracker{world, summary};

    const ModeSet modes(dim, scenario.k_max);
    const GridSpec grid(dim, scenario.grid);
    const GridSpec metrics_grid(dim, scenario.output.metrics_grid);
    const std::vector<std::uint8_t> truth = interior_mask(world, metrics_grid);
    bool truth_nonempty = false;
    for (auto v : truth) truth_nonempty = truth_nonempty || v;

    SensorState state{initial_position(scenario, world, rng, use_fixed_start), Vec::Zero(dim)};
    summary.initial_position = state.pos;

    TargetDistribution target = uniform_target(grid, modes);
    TrajectoryCoeffs coeffs(modes, state.pos);
    ShapeEstimator estimator(scenario.estimator);
    GeerPolicy geer(scenario.geer);

    std::vector<std::uint8_t> est_mask(truth.size(), 0);
    double gamma = gamma_metric(est_mask, truth, metrics_grid);
    std::optional<double> area_err;
    if (truth_nonempty) area_err = area_error(est_mask, truth, metrics_grid);

    std::vector<double> snapshot_times;
    for (double s : scenario.output.snapshot_times) {
        if (s <= scenario.duration + kTimeEps) snapshot_times.push_back(s);
    }
    std::sort(snapshot_times.begin(), snapshot_times.end());
    std::size_t next_snapshot = 0;

    const int steps = esac.schedule_steps();
    const long intervals = std::lround(scenario.duration / esac.sample_time);
    const long metrics_every = std::lround(scenario.output.metrics_interval / esac.sample_time);
    const long free_every = std::lround(scenario.estimator.free_interval / esac.dt);
    bool in_contact = false;
    long step_index = 0;

    auto record_free = [&](double t) {
        const Measurement m{t, state.pos, measure(state.pos, world)};
        out.measurements.push_back(m);
        estimator.add(m);
    };

    auto record_metrics = [&](double t) {
        MetricsRow row;
        row.t = t;
        row.ergodic = ergodic_metric(coeffs, target.coeffs, modes);
        row.gamma = gamma;
        row.area_error = area_err;
        row.detected = tracker.flags();
        out.metrics.append(std::move(row));
    };

    out.trajectory.push_back({0.0, state.pos, state.vel, Vec::Zero(dim)});
    record_metrics(0.0);
    record_free(0.0);

    try {
        for (long it = 0; it < intervals; ++it) {
            const double t = it * esac.sample_time;

            if (estimator.refit_due(t) && estimator.refit(t)) {
                const auto estimate = estimator.current();
                target = estimate->target(grid, scenario.estimator.epsilon, modes);
                est_mask = estimate_mask(estimate.get(), metrics_grid);
                gamma = gamma_metric(est_mask, truth, metrics_grid);
                if (truth_nonempty) area_err = area_error(est_mask, truth, metrics_grid);
            }
            while (next_snapshot < snapshot_times.size() && snapshot_times[next_snapshot] <= t + kTimeEps) {
                out.snapshots.push_back(take_snapshot(t, grid, target, estimator.current().get()));
                ++next_snapshot;
            }

            ActionSchedule schedule;
            if (scenario.policy == Policy::Esac) {
                schedule = esac_step(state, t, coeffs, target.coeffs, modes, esac);
            }
            const auto estimate = estimator.current();
            for (int j = 0; j < steps; ++j) {
                const double tj = t + j * esac.dt;
                const ControlInput u = scenario.policy == Policy::Esac
                                           ? schedule.controls[j]
                                           : geer.step(state, tj, estimate.get(), rng);
                const SensorState proposed = rk4_step(state, u, esac.dt);
                StepResult res = resolve_collision(state, proposed, world, tj, esac.dt);
                state = std::move(res.state);
                in_contact = res.contact.has_value();
                if (res.contact) {
                    const Measurement m{res.contact->time, res.contact->point, 1};
                    out.measurements.push_back(m);
                    estimator.add(m);
                    tracker.contact(*res.contact);
                }
                coeffs.add_sample(modes, state.pos, esac.dt);
                const double t_next = t + (j + 1) * esac.dt;
                out.trajectory.push_back({t_next, state.pos, state.vel, u});
                if (++step_index % free_every == 0 && !in_contact) record_free(t_next);
            }
            if ((it + 1) % metrics_every == 0) record_metrics((it + 1) * esac.sample_time);
        }
        const double t_end = intervals * esac.sample_time;
        while (next_snapshot < snapshot_times.size()) {
            out.snapshots.push_back(take_snapshot(t_end, grid, target, estimator.current().get()));
            ++next_snapshot;
        }
    } catch (const std::exception& e) {
        summary.error = e.what();
    }

    summary.final_ergodic = ergodic_metric(coeffs, target.coeffs, modes);
    summary.final_gamma = gamma;
    summary.final_area_error = area_err;
    summary.measurements = out.measurements.size();
    summary.fits = estimator.fit_count();
    out.final_estimate = estimator.current();
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

BatchResult run_batch(const Scenario& scenario, int count, Policy policy, const ProgressFn& progress) {
    Scenario s = scenario;
    s.policy = policy;
    BatchResult result;
    result.scenario = s.name;
    result.policy = to_string(policy);
    for (int i = 0; i < count; ++i) {
        TrialSummary summary;
        try {
            summary = run_trial(s, static_cast<std::uint64_t>(i), false).summary;
        } catch (const std::exception& e) {
            summary.trial = static_cast<std::uint64_t>(i);
            summary.policy = result.policy;
            summary.error = e.what();
        }
        if (progress) progress(summary);
        result.trials.push_back(std::move(summary));
    }
    return result;
}

}  // namespace ergosense
