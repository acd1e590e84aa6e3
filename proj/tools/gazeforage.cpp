// gazeforage: analyze gaze trajectories for Levy-walk statistics, synthesize
// matched trajectories, and build/compare fixation heatmaps.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gazeforage/gazeforage.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMissingInput = 2;

// Thrown when a named input path does not exist; mapped to exit code 2.
struct MissingInput : std::runtime_error {
    explicit MissingInput(const std::string& path)
        : std::runtime_error("missing input file: " + path) {}
};

void require_input(const std::string& path) {
    if (!fs::exists(path)) throw MissingInput(path);
}

std::ifstream open_input(const std::string& path, std::ios::openmode mode = std::ios::in) {
    require_input(path);
    std::ifstream in(path, mode);
    if (!in) throw gazeforage::Error("cannot open " + path);
    return in;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gazeforage::Error("cannot write " + path.string());
    out << content;
}

// --- analyze ---

struct AnalyzeArgs {
    std::vector<std::string> gaze_csvs;
    std::string schedule_path;
    std::string out_dir = ".";
    int jobs = 1;
    std::optional<double> x_min;
    int bins_per_decade = 20;
    int bootstrap = 0;
    std::uint64_t seed = 0;
    bool per_image = false;
    bool per_subject = false;
    bool pooled = false;
    double margin_px = 50.0;
    std::vector<std::string> image_specs;  // id=path pairs for entropy
};

struct TrajectoryWork {
    gazeforage::Trajectory trajectory;
    gazeforage::FilterReport filter;
    gazeforage::StepSeries steps;
    gazeforage::TurnSeries turns;
    std::string step_error;  // too-few-samples etc.; analysis continues
};

// Per-trajectory statistics fan out to a worker pool and merge back in input
// order, so --jobs never changes the report.
void compute_stats(std::vector<TrajectoryWork>& work, int jobs) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < work.size(); i = next.fetch_add(1)) {
            TrajectoryWork& w = work[i];
            try {
                w.steps = gazeforage::step_lengths(w.trajectory);
                w.turns = gazeforage::turning_angles(w.trajectory);
            } catch (const gazeforage::Error& e) {
                w.step_error = e.what();
            }
        }
    };
    if (jobs <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

json group_to_json(const gazeforage::StepSeries& steps, const gazeforage::TurnSeries& turns,
                   double diag, const gazeforage::AnalyzeOptions& opt) {
    const auto sa = gazeforage::analyze_steps(steps, diag, opt);
    const auto ta = gazeforage::analyze_turns(turns);
    return {{"steps", gazeforage::step_analysis_to_json(sa)},
            {"turns", gazeforage::turn_analysis_to_json(ta)}};
}

int cmd_analyze(const AnalyzeArgs& args) {
    using namespace gazeforage;

    std::string stage = "ingest";
    try {
        std::vector<SessionRecording> recordings;
        for (const auto& path : args.gaze_csvs) {
            auto in = open_input(path);
            recordings.push_back(parse_recording(in));
        }
        auto sched_in = open_input(args.schedule_path);
        const StimulusSchedule schedule = parse_schedule_json(sched_in);

        stage = "segmentation";
        std::vector<TrajectoryWork> work;
        for (const auto& rec : recordings) {
            for (auto& traj : segment_by_image(rec, schedule)) {
                FilteredTrajectory filtered = filter_invalid(traj, args.margin_px);
                TrajectoryWork w;
                w.trajectory = std::move(filtered.trajectory);
                w.filter = filtered.report;
                work.push_back(std::move(w));
            }
        }
        if (work.empty()) throw Error("schedule matched no samples");

        stage = "statistics";
        compute_stats(work, args.jobs);

        AnalyzeOptions opt;
        opt.x_min = args.x_min;
        opt.bins_per_decade = args.bins_per_decade;
        opt.bootstrap_resamples = args.bootstrap;
        opt.seed = args.seed;

        const double diag =
            std::hypot(work.front().trajectory.screen_w_px, work.front().trajectory.screen_h_px);

        json report{{"schema", 1}};
        report["inputs"] = args.gaze_csvs;

        json traj_list = json::array();
        for (const auto& w : work) {
            json t{{"subject_id", w.trajectory.subject_id},
                   {"image_id", w.trajectory.image_id},
                   {"n_samples", w.trajectory.samples.size()},
                   {"n_removed_invalid", w.filter.n_invalid_flag},
                   {"n_removed_out_of_bounds", w.filter.n_out_of_bounds},
                   {"n_steps", w.steps.steps.size()},
                   {"n_turns", w.turns.angles.size()}};
            if (!w.step_error.empty()) t["error"] = w.step_error;
            traj_list.push_back(std::move(t));
        }
        report["trajectories"] = std::move(traj_list);

        stage = "fitting";
        const bool any_flag = args.pooled || args.per_image || args.per_subject;
        const bool want_pooled = args.pooled || !any_flag;
        const bool want_per_image = args.per_image || !args.image_specs.empty();

        // Pooled series also drive the SVG plots.
        std::vector<StepSeries> all_steps;
        TurnSeries pooled_turns;
        for (const auto& w : work) {
            all_steps.push_back(w.steps);
            pooled_turns.angles.insert(pooled_turns.angles.end(), w.turns.angles.begin(),
                                       w.turns.angles.end());
        }
        const StepSeries pooled_steps = pool_steps(all_steps);
        const auto pooled_sa = analyze_steps(pooled_steps, diag, opt);
        const auto pooled_ta = analyze_turns(pooled_turns);

        if (want_pooled)
            report["pooled"] = {{"steps", step_analysis_to_json(pooled_sa)},
                                {"turns", turn_analysis_to_json(pooled_ta)}};

        std::map<std::string, std::pair<std::vector<StepSeries>, TurnSeries>> by_image,
            by_subject;
        for (const auto& w : work) {
            auto& bi = by_image[w.trajectory.image_id];
            bi.first.push_back(w.steps);
            bi.second.angles.insert(bi.second.angles.end(), w.turns.angles.begin(),
                                    w.turns.angles.end());
            auto& bs = by_subject[w.trajectory.subject_id];
            bs.first.push_back(w.steps);
            bs.second.angles.insert(bs.second.angles.end(), w.turns.angles.begin(),
                                    w.turns.angles.end());
        }

        std::map<std::string, double> mu_by_image;
        if (want_per_image) {
            json sect = json::object();
            for (const auto& [id, group] : by_image) {
                const StepSeries s = pool_steps(group.first);
                const auto sa = analyze_steps(s, diag, opt);
                const auto ta = analyze_turns(group.second);
                if (sa.mle) mu_by_image[id] = sa.mle->mu;
                sect[id] = {{"steps", step_analysis_to_json(sa)},
                            {"turns", turn_analysis_to_json(ta)}};
            }
            if (args.per_image || !any_flag) report["per_image"] = std::move(sect);
        }
        if (args.per_subject) {
            json sect = json::object();
            for (const auto& [id, group] : by_subject) {
                const StepSeries s = pool_steps(group.first);
                sect[id] = {{"steps", step_analysis_to_json(analyze_steps(s, diag, opt))},
                            {"turns", turn_analysis_to_json(analyze_turns(group.second))}};
            }
            report["per_subject"] = std::move(sect);
        }

        if (!args.image_specs.empty()) {
            stage = "entropy";
            json ent = json::object();
            std::vector<std::pair<double, double>> scatter;
            json points = json::array();
            for (const auto& spec : args.image_specs) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos)
                    throw Error("--image expects id=path, got " + spec);
                const std::string id = spec.substr(0, eq), path = spec.substr(eq + 1);
                require_input(path);
                const double bits = image_entropy(load_gray_image(path)).bits;
                ent[id] = bits;
                if (auto it = mu_by_image.find(id); it != mu_by_image.end()) {
                    scatter.emplace_back(bits, it->second);
                    points.push_back(
                        {{"image_id", id}, {"entropy_bits", bits}, {"mu", it->second}});
                }
            }
            report["entropy"] = std::move(ent);
            json em{{"points", std::move(points)}};
            try {
                em["pearson_r"] = pearson_correlation(scatter);
            } catch (const Error&) {
                em["pearson_r"] = nullptr;  // fewer than 3 images or no spread
            }
            report["entropy_mu"] = std::move(em);
        }

        stage = "output";
        const fs::path out_dir(args.out_dir);
        fs::create_directories(out_dir);
        write_file(out_dir / "report.json", report.dump(2) + "\n");
        write_file(out_dir / "steps_linear.svg", steps_linear_svg(pooled_sa, "step lengths"));
        if (auto svg = steps_loglog_svg(pooled_sa, "step-length tail (log-log)"))
            write_file(out_dir / "steps_loglog.svg", *svg);
        write_file(out_dir / "turns.svg", turns_svg(pooled_ta, "turning angles"));
        {
            std::ofstream csv(out_dir / "steps_hist_linear.csv");
            histogram_to_csv(pooled_sa.linear_hist, csv);
        }
        if (pooled_sa.log_hist) {
            std::ofstream csv(out_dir / "steps_hist_log.csv");
            histogram_to_csv(*pooled_sa.log_hist, csv);
        }
        {
            std::ofstream csv(out_dir / "turns_hist.csv");
            histogram_to_csv(pooled_ta.hist, csv);
        }
        log_info("analyze: wrote report for " + std::to_string(work.size()) + " trajectories");
        return kExitOk;
    } catch (const MissingInput&) {
        throw;
    } catch (const std::exception& e) {
        throw gazeforage::Error("analyze failed at stage '" + stage + "': " + e.what());
    }
}

// --- synth ---

struct SynthArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string out_name = "gaze.csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> n_images;
    double image_duration_ms = 30000.0;
    double blank_ms = 5000.0;
    std::string subject = "synth";
};

int cmd_synth(const SynthArgs& args) {
    using namespace gazeforage;
    std::string stage = "config";
    try {
        SynthConfig config;
        if (!args.config_path.empty()) {
            auto in = open_input(args.config_path);
            config = synth_config_from_json(json::parse(in));
        }
        if (args.seed) config.seed = *args.seed;

        stage = "generate";
        SessionRecording recording;
        StimulusSchedule schedule;
        if (args.n_images) {
            SessionSpec spec;
            spec.subject_id = args.subject;
            spec.n_images = *args.n_images;
            spec.image_duration_ms = args.image_duration_ms;
            spec.blank_ms = args.blank_ms;
            SessionResult session = synthesize_session(config, spec);
            recording = std::move(session.recording);
            schedule = std::move(session.schedule);
        } else {
            const SynthResult walk = generate(config);
            recording.subject_id = args.subject;
            recording.nominal_rate_hz = config.sample_rate_hz;
            for (const GazeSample& s : walk.trajectory.samples)
                recording.samples.push_back(s);
            const double dt = 1000.0 / config.sample_rate_hz;
            const double t_end =
                recording.samples.empty() ? dt : recording.samples.back().t_ms + dt;
            schedule.entries.push_back({"img1", 0.0, t_end});
        }

        stage = "output";
        const fs::path out_dir(args.out_dir);
        fs::create_directories(out_dir);
        const fs::path csv_path = out_dir / args.out_name;
        write_file(csv_path, serialize_recording(recording));
        const std::string stem = csv_path.stem().string();
        write_file(out_dir / (stem + ".config.json"),
                   synth_config_to_json(config).dump(2) + "\n");
        write_file(out_dir / (stem + ".schedule.json"),
                   schedule_to_json(schedule).dump(2) + "\n");
        log_info("synth: wrote " + std::to_string(recording.samples.size()) + " samples");
        return kExitOk;
    } catch (const MissingInput&) {
        throw;
    } catch (const std::exception& e) {
        throw gazeforage::Error("synth failed at stage '" + stage + "': " + e.what());
    }
}

// --- heatmap ---

struct HeatmapArgs {
    std::string gaze_csv;
    std::string schedule_path;
    std::string image_id;
    std::string out_dir = ".";
    std::string out_name;  // default <image_id>.f32
    double sigma_px = 30.0;
    double margin_px = 50.0;
};

int cmd_heatmap(const HeatmapArgs& args) {
    using namespace gazeforage;
    std::string stage = "ingest";
    try {
        auto gaze_in = open_input(args.gaze_csv);
        const SessionRecording rec = parse_recording(gaze_in);
        auto sched_in = open_input(args.schedule_path);
        const StimulusSchedule schedule = parse_schedule_json(sched_in);

        stage = "segmentation";
        std::optional<Trajectory> target;
        for (auto& traj : segment_by_image(rec, schedule))
            if (traj.image_id == args.image_id) {
                target = filter_invalid(traj, args.margin_px).trajectory;
                break;
            }
        if (!target) throw Error("image_id '" + args.image_id + "' not in schedule");

        stage = "heatmap";
        std::vector<std::pair<double, double>> points;
        for (const GazeSample& s : target->samples) points.emplace_back(s.x_px, s.y_px);
        const Heatmap h = build_heatmap(points, {target->screen_w_px, target->screen_h_px},
                                        args.sigma_px);

        stage = "output";
        const fs::path out_dir(args.out_dir);
        fs::create_directories(out_dir);
        const std::string name = args.out_name.empty() ? args.image_id + ".f32" : args.out_name;
        const fs::path bin_path = out_dir / name;
        save_heatmap(h, bin_path.string());
        save_heatmap_pgm(h, (out_dir / (fs::path(name).stem().string() + ".pgm")).string());
        log_info("heatmap: wrote " + bin_path.string());
        return kExitOk;
    } catch (const MissingInput&) {
        throw;
    } catch (const std::exception& e) {
        throw gazeforage::Error("heatmap failed at stage '" + stage + "': " + e.what());
    }
}

// --- compare ---

struct CompareArgs {
    std::string map_a, map_b;
    double w_bce = 0.4, w_mse = 0.3, w_kl = 0.3;
    std::string out_path;
};

int cmd_compare(const CompareArgs& args) {
    using namespace gazeforage;
    std::string stage = "load";
    try {
        require_input(args.map_a);
        require_input(args.map_b);
        const Heatmap a = load_heatmap(args.map_a);
        const Heatmap b = load_heatmap(args.map_b);

        stage = "metrics";
        const Heatmap a_prob = normalize(a, Normalization::probability);
        const Heatmap b_prob = normalize(b, Normalization::probability);
        const Heatmap a_unit = normalize(a, Normalization::unit_range);
        const Heatmap b_unit = normalize(b, Normalization::unit_range);
        const double v_bce = bce(a_unit, b_unit);
        const double v_mse = mse(a_unit, b_unit);
        const double v_kl = kl_divergence(a_prob, b_prob);
        const double composite = args.w_bce * v_bce + args.w_mse * v_mse + args.w_kl * v_kl;

        json metrics{{"bce", v_bce},
                     {"mse", v_mse},
                     {"kl", v_kl},
                     {"composite", composite},
                     {"weights", {{"bce", args.w_bce}, {"mse", args.w_mse}, {"kl", args.w_kl}}}};
        const std::string text = metrics.dump(2) + "\n";
        std::cout << text;
        if (!args.out_path.empty()) write_file(args.out_path, text);
        return kExitOk;
    } catch (const MissingInput&) {
        throw;
    } catch (const std::exception& e) {
        throw gazeforage::Error("compare failed at stage '" + stage + "': " + e.what());
    }
}

// --- entropy ---

int cmd_entropy(const std::vector<std::string>& images, const std::string& out_path) {
    using namespace gazeforage;
    std::string stage = "load";
    try {
        std::string csv = "image,entropy_bits\n";
        for (const auto& path : images) {
            require_input(path);
            const double bits = image_entropy(load_gray_image(path)).bits;
            csv += path + "," + format_double(bits) + "\n";
        }
        std::cout << csv;
        if (!out_path.empty()) write_file(out_path, csv);
        return kExitOk;
    } catch (const MissingInput&) {
        throw;
    } catch (const std::exception& e) {
        throw gazeforage::Error("entropy failed at stage '" + stage + "': " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Levy-walk gaze statistics toolkit"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Fit step-length and turn statistics");
    analyze->add_option("gaze_csv", an.gaze_csvs, "Gaze CSV file(s)")->required();
    analyze->add_option("--schedule", an.schedule_path, "Stimulus schedule JSON")->required();
    analyze->add_option("--out-dir", an.out_dir, "Output directory");
    analyze->add_option("--jobs", an.jobs, "Worker threads")->check(CLI::PositiveNumber);
    double xmin_val = 0.0;
    auto* xmin_opt = analyze->add_option("--xmin", xmin_val, "Fixed tail cutoff (px)");
    analyze->add_option("--bins-per-decade", an.bins_per_decade, "Log-histogram resolution");
    analyze->add_option("--bootstrap", an.bootstrap, "Bootstrap resamples for the CI");
    analyze->add_option("--seed", an.seed, "Bootstrap seed");
    analyze->add_option("--margin-px", an.margin_px, "Off-screen tolerance");
    analyze->add_flag("--pooled", an.pooled, "Pooled aggregation");
    analyze->add_flag("--per-image", an.per_image, "Per-image aggregation");
    analyze->add_flag("--per-subject", an.per_subject, "Per-subject aggregation");
    analyze->add_option("--image", an.image_specs, "Stimulus image as id=path (repeatable)");

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic Levy-walk session");
    synth->add_option("--config", sy.config_path, "Walk config JSON");
    synth->add_option("--out-dir", sy.out_dir, "Output directory");
    synth->add_option("--out", sy.out_name, "Output CSV name");
    std::uint64_t seed_val = 0;
    auto* seed_opt = synth->add_option("--seed", seed_val, "Override config seed");
    std::uint64_t images_val = 0;
    auto* images_opt =
        synth->add_option("--images", images_val, "Session mode: number of image slots");
    synth->add_option("--image-duration-ms", sy.image_duration_ms, "Image slot length");
    synth->add_option("--blank-ms", sy.blank_ms, "Blank before each image");
    synth->add_option("--subject", sy.subject, "Subject id for the CSV");

    HeatmapArgs hm;
    auto* heatmap = app.add_subcommand("heatmap", "Build a fixation heatmap for one image");
    heatmap->add_option("gaze_csv", hm.gaze_csv, "Gaze CSV file")->required();
    heatmap->add_option("--schedule", hm.schedule_path, "Stimulus schedule JSON")->required();
    heatmap->add_option("--image-id", hm.image_id, "Image to map")->required();
    heatmap->add_option("--out-dir", hm.out_dir, "Output directory");
    heatmap->add_option("--out", hm.out_name, "Output binary name");
    heatmap->add_option("--sigma-px", hm.sigma_px, "Gaussian kernel sigma (px)");
    heatmap->add_option("--margin-px", hm.margin_px, "Off-screen tolerance");

    CompareArgs cp;
    auto* compare = app.add_subcommand("compare", "Composite loss between two heatmaps");
    compare->add_option("heatmap_a", cp.map_a, "Reference heatmap binary")->required();
    compare->add_option("heatmap_b", cp.map_b, "Candidate heatmap binary")->required();
    compare->add_option("--w-bce", cp.w_bce, "BCE weight");
    compare->add_option("--w-mse", cp.w_mse, "MSE weight");
    compare->add_option("--w-kl", cp.w_kl, "KL weight");
    compare->add_option("--out", cp.out_path, "Also write metrics JSON here");

    std::vector<std::string> entropy_images;
    std::string entropy_out;
    auto* entropy = app.add_subcommand("entropy", "Shannon entropy of stimulus images");
    entropy->add_option("images", entropy_images, "Image files")->required();
    entropy->add_option("--out", entropy_out, "Also write CSV here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            if (*xmin_opt) an.x_min = xmin_val;
            return cmd_analyze(an);
        }
        if (*synth) {
            if (*seed_opt) sy.seed = seed_val;
            if (*images_opt) sy.n_images = images_val;
            return cmd_synth(sy);
        }
        if (*heatmap) return cmd_heatmap(hm);
        if (*compare) return cmd_compare(cp);
        if (*entropy) return cmd_entropy(entropy_images, entropy_out);
    } catch (const MissingInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
