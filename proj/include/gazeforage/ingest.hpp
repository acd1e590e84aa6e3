#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gazeforage/errors.hpp"
#include "gazeforage/format.hpp"
#include "gazeforage/types.hpp"

namespace gazeforage {

inline constexpr std::string_view kGazeCsvHeader = "subject_id,t_ms,x_px,y_px,valid";

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(std::string_view s, double& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline void chomp_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// Parses the canonical gaze CSV (header: subject_id,t_ms,x_px,y_px,valid).
// Strict by design: the format is defined by this toolkit, so anything that
// does not match is a malformed row, reported with its 1-based line number.
inline SessionRecording parse_recording(std::istream& in) {
    SessionRecording rec;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw EmptyRecording();
    ++line_no;
    detail::chomp_cr(line);
    if (line != kGazeCsvHeader)
        throw MalformedRow(line_no, "expected header '" + std::string(kGazeCsvHeader) + "'");

    bool have_subject = false;
    double prev_t = -1.0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty()) continue;

        const auto fields = detail::split_csv(line);
        if (fields.size() != 5)
            throw MalformedRow(line_no, "expected 5 fields, got " + std::to_string(fields.size()));

        GazeSample s;
        if (fields[0].empty()) throw MalformedRow(line_no, "empty subject_id");
        if (!detail::parse_double(fields[1], s.t_ms) || !std::isfinite(s.t_ms) || s.t_ms < 0.0)
            throw MalformedRow(line_no, "bad t_ms '" + std::string(fields[1]) + "'");
        if (!detail::parse_double(fields[2], s.x_px))
            throw MalformedRow(line_no, "bad x_px '" + std::string(fields[2]) + "'");
        if (!detail::parse_double(fields[3], s.y_px))
            throw MalformedRow(line_no, "bad y_px '" + std::string(fields[3]) + "'");
        if (fields[4] == "1")
            s.valid = true;
        else if (fields[4] == "0")
            s.valid = false;
        else
            throw MalformedRow(line_no, "valid must be 0 or 1, got '" + std::string(fields[4]) + "'");
        if (s.valid && (!std::isfinite(s.x_px) || !std::isfinite(s.y_px)))
            throw MalformedRow(line_no, "valid sample with non-finite coordinates");

        if (!have_subject) {
            rec.subject_id = std::string(fields[0]);
            have_subject = true;
        } else if (fields[0] != rec.subject_id) {
            throw MixedSubjects(line_no);
        }
        if (s.t_ms < prev_t) throw NonMonotonicTime(line_no);
        prev_t = s.t_ms;
        rec.samples.push_back(s);
    }

    if (rec.samples.empty()) throw EmptyRecording();
    return rec;
}

inline SessionRecording parse_recording(const std::string& text) {
    std::istringstream in(text);
    return parse_recording(in);
}

inline void serialize_recording(const SessionRecording& rec, std::ostream& out) {
    out << kGazeCsvHeader << '\n';
    for (const GazeSample& s : rec.samples) {
        out << rec.subject_id << ',' << format_double(s.t_ms) << ',' << format_double(s.x_px)
            << ',' << format_double(s.y_px) << ',' << (s.valid ? '1' : '0') << '\n';
    }
}

inline std::string serialize_recording(const SessionRecording& rec) {
    std::ostringstream out;
    serialize_recording(rec, out);
    return out.str();
}

// Schedule JSON: [{"image_id": ..., "onset_ms": ..., "duration_ms": ...}, ...]
inline StimulusSchedule parse_schedule_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error("schedule JSON must be an array");
    StimulusSchedule sched;
    for (const auto& e : j) {
        ScheduleEntry entry;
        entry.image_id = e.at("image_id").get<std::string>();
        entry.onset_ms = e.at("onset_ms").get<double>();
        entry.duration_ms = e.at("duration_ms").get<double>();
        if (!(entry.duration_ms > 0.0))
            throw Error("schedule entry '" + entry.image_id + "' has non-positive duration");
        if (!std::isfinite(entry.onset_ms) || entry.onset_ms < 0.0)
            throw Error("schedule entry '" + entry.image_id + "' has bad onset");
        sched.entries.push_back(std::move(entry));
    }
    return sched;
}

inline StimulusSchedule parse_schedule_json(std::istream& in) {
    return parse_schedule_json(nlohmann::json::parse(in));
}

inline nlohmann::json schedule_to_json(const StimulusSchedule& sched) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : sched.entries)
        j.push_back({{"image_id", e.image_id}, {"onset_ms", e.onset_ms},
                     {"duration_ms", e.duration_ms}});
    return j;
}

inline void validate_schedule(const StimulusSchedule& sched) {
    for (std::size_t i = 0; i + 1 < sched.entries.size(); ++i) {
        const auto& a = sched.entries[i];
        const auto& b = sched.entries[i + 1];
        if (b.onset_ms < a.onset_ms + a.duration_ms) throw OverlappingSchedule(b.image_id);
    }
}

// Cuts one recording into per-image trajectories. Each trajectory holds the
// valid samples with onset <= t < onset + duration, rebased to the onset;
// invalid samples are dropped and leave a gap marker between their kept
// neighbours. Entries past the end of the recording just come back short.
inline std::vector<Trajectory> segment_by_image(const SessionRecording& rec,
                                                const StimulusSchedule& sched,
                                                int screen_w_px = 1920, int screen_h_px = 1080) {
    validate_schedule(sched);
    std::vector<Trajectory> out;
    out.reserve(sched.entries.size());

    for (const auto& entry : sched.entries) {
        Trajectory traj;
        traj.subject_id = rec.subject_id;
        traj.image_id = entry.image_id;
        traj.screen_w_px = screen_w_px;
        traj.screen_h_px = screen_h_px;

        const double end_ms = entry.onset_ms + entry.duration_ms;
        auto lo = std::lower_bound(rec.samples.begin(), rec.samples.end(), entry.onset_ms,
                                   [](const GazeSample& s, double t) { return s.t_ms < t; });
        bool pending_gap = false;
        for (auto it = lo; it != rec.samples.end() && it->t_ms < end_ms; ++it) {
            if (!it->valid) {
                pending_gap = true;
                continue;
            }
            if (pending_gap && !traj.samples.empty())
                traj.gap_after.push_back(static_cast<std::uint32_t>(traj.samples.size() - 1));
            GazeSample s = *it;
            s.t_ms -= entry.onset_ms;
            traj.samples.push_back(s);
            pending_gap = false;
        }
        out.push_back(std::move(traj));
    }
    return out;
}

struct FilterReport {
    std::size_t n_invalid_flag = 0;
    std::size_t n_out_of_bounds = 0;
    std::size_t removed() const { return n_invalid_flag + n_out_of_bounds; }
};

struct FilteredTrajectory {
    Trajectory trajectory;
    FilterReport report;
};

// Drops invalid-flagged samples and samples outside the screen plus a margin.
// Every removal leaves a gap marker so downstream step/turn computation never
// bridges a dropped interval. Idempotent: a second pass removes nothing.
inline FilteredTrajectory filter_invalid(const Trajectory& traj, double margin_px = 50.0) {
    if (!(margin_px >= 0.0)) throw Error("margin_px must be >= 0");

    FilteredTrajectory out;
    out.trajectory.subject_id = traj.subject_id;
    out.trajectory.image_id = traj.image_id;
    out.trajectory.screen_w_px = traj.screen_w_px;
    out.trajectory.screen_h_px = traj.screen_h_px;

    const double x_lo = -margin_px, x_hi = traj.screen_w_px + margin_px;
    const double y_lo = -margin_px, y_hi = traj.screen_h_px + margin_px;

    bool pending_gap = false;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const GazeSample& s = traj.samples[i];
        bool keep = true;
        if (!s.valid) {
            ++out.report.n_invalid_flag;
            keep = false;
        } else if (!std::isfinite(s.x_px) || !std::isfinite(s.y_px) || s.x_px < x_lo ||
                   s.x_px > x_hi || s.y_px < y_lo || s.y_px > y_hi) {
            ++out.report.n_out_of_bounds;
            keep = false;
        }
        if (keep) {
            if (pending_gap && !out.trajectory.samples.empty())
                out.trajectory.gap_after.push_back(
                    static_cast<std::uint32_t>(out.trajectory.samples.size() - 1));
            out.trajectory.samples.push_back(s);
            pending_gap = false;
        } else {
            pending_gap = true;
        }
        if (traj.has_gap_after(i)) pending_gap = true;
    }
    return out;
}

}  // namespace gazeforage
