#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace gazeforage {

// One tracker sample. Times are milliseconds since session start; coordinates
// are screen pixels. Invalid samples (tracker lost the eye) keep their row so
// segmentation can mark the gap they leave behind.
struct GazeSample {
    double t_ms = 0.0;
    double x_px = 0.0;
    double y_px = 0.0;
    bool valid = true;
};

// Full session of one subject: every sample the tracker emitted, in order.
struct SessionRecording {
    std::string subject_id;
    std::vector<GazeSample> samples;
    double nominal_rate_hz = 120.0;
};

struct ScheduleEntry {
    std::string image_id;
    double onset_ms = 0.0;
    double duration_ms = 0.0;
};

// Ordered, non-overlapping image slots. Blank intervals are simply the time
// not covered by any entry.
struct StimulusSchedule {
    std::vector<ScheduleEntry> entries;
};

// Valid samples of one subject on one image, times rebased to image onset.
// gap_after holds indices i such that samples dropped out between samples[i]
// and samples[i+1]; pairwise statistics must not bridge those positions.
struct Trajectory {
    std::string subject_id;
    std::string image_id;
    int screen_w_px = 1920;
    int screen_h_px = 1080;
    std::vector<GazeSample> samples;
    std::vector<std::uint32_t> gap_after;  // sorted, each < samples.size() - 1

    bool has_gap_after(std::size_t i) const {
        return std::binary_search(gap_after.begin(), gap_after.end(),
                                  static_cast<std::uint32_t>(i));
    }
};

}  // namespace gazeforage
