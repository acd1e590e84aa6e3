#pragma once

#include <stdexcept>
#include <string>

namespace gazeforage {

// Base class for everything this library throws on bad input or bad state.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- ingest ---
class EmptyRecording : public Error {
public:
    EmptyRecording() : Error("recording contains no data rows") {}
};

class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line, const std::string& what)
        : Error("malformed row at line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class NonMonotonicTime : public Error {
public:
    explicit NonMonotonicTime(std::size_t line)
        : Error("t_ms decreases at line " + std::to_string(line)), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class MixedSubjects : public Error {
public:
    explicit MixedSubjects(std::size_t line)
        : Error("subject_id changes at line " + std::to_string(line) +
                "; one subject per recording") {}
};

class OverlappingSchedule : public Error {
public:
    explicit OverlappingSchedule(const std::string& image_id)
        : Error("schedule entries overlap or are unordered at image '" + image_id + "'") {}
};

// --- trajectory statistics ---
class TooFewSamples : public Error {
public:
    TooFewSamples(std::size_t have, std::size_t need)
        : Error("trajectory has " + std::to_string(have) + " samples, need at least " +
                std::to_string(need)) {}
};

class InvalidRange : public Error {
public:
    explicit InvalidRange(const std::string& what) : Error("invalid histogram range: " + what) {}
};

class NonPositiveLogRange : public Error {
public:
    NonPositiveLogRange() : Error("logarithmic histogram requires range minimum > 0") {}
};

// --- power-law fitting ---
class InsufficientTailBins : public Error {
public:
    explicit InsufficientTailBins(std::size_t have)
        : Error("regression needs >= 3 non-empty tail bins, have " + std::to_string(have)) {}
};

class EmptyTail : public Error {
public:
    explicit EmptyTail(double x_min)
        : Error("fewer than 2 steps at or above x_min = " + std::to_string(x_min)) {}
};

class DegenerateTail : public Error {
public:
    DegenerateTail() : Error("all tail values equal x_min; exponent is unidentifiable") {}
};

class NoViableCandidate : public Error {
public:
    NoViableCandidate() : Error("no x_min candidate leaves a usable tail") {}
};

class InvalidBootstrap : public Error {
public:
    explicit InvalidBootstrap(const std::string& what) : Error("invalid bootstrap: " + what) {}
};

// --- image entropy ---
class EmptyImage : public Error {
public:
    EmptyImage() : Error("image has no pixels") {}
};

class UnsupportedPixelFormat : public Error {
public:
    explicit UnsupportedPixelFormat(const std::string& what)
        : Error("unsupported pixel format: " + what) {}
};

class DegenerateVariance : public Error {
public:
    DegenerateVariance() : Error("correlation undefined: zero variance in one coordinate") {}
};

class ImageIoError : public Error {
public:
    explicit ImageIoError(const std::string& what) : Error("image i/o: " + what) {}
};

// --- synthesis ---
class InvalidExponent : public Error {
public:
    explicit InvalidExponent(double mu)
        : Error("power-law exponent must exceed 1, got " + std::to_string(mu)) {}
};

class InvalidSynthConfig : public Error {
public:
    explicit InvalidSynthConfig(const std::string& what) : Error("invalid synth config: " + what) {}
};

class InfeasibleBounds : public Error {
public:
    InfeasibleBounds() : Error("bounds diagonal does not exceed l_min; no step can fit") {}
};

// --- heatmaps ---
class NoPoints : public Error {
public:
    NoPoints() : Error("heatmap needs at least one gaze point") {}
};

class InvalidSigma : public Error {
public:
    explicit InvalidSigma(double sigma)
        : Error("kernel sigma must be positive, got " + std::to_string(sigma)) {}
};

class AllZeroMap : public Error {
public:
    AllZeroMap() : Error("cannot normalize an all-zero heatmap") {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(int wa, int ha, int wb, int hb)
        : Error("heatmap dimensions differ: " + std::to_string(wa) + "x" + std::to_string(ha) +
                " vs " + std::to_string(wb) + "x" + std::to_string(hb)) {}
};

class NormalizationMismatch : public Error {
public:
    explicit NormalizationMismatch(const std::string& what)
        : Error("normalization mismatch: " + what) {}
};

class HeatmapIoError : public Error {
public:
    explicit HeatmapIoError(const std::string& what) : Error("heatmap i/o: " + what) {}
};

}  // namespace gazeforage
