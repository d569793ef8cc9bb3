#pragma once

#include <stdexcept>
#include <string>

namespace rr {

enum class Errc {
    // frame-io
    mixed_dimensions,
    empty_sequence,
    unreadable_frame,
    channel_mismatch,
    // pyramid
    too_small,
    dim_mismatch,
    too_many_levels,
    // temporal
    invalid_band,
    geometry_mismatch,
    // quaternion
    zero_quaternion,
    not_unit_norm,
    // estimator
    frequency_at_edge,
    window_too_long,
    // roi
    frame_too_small,
    insufficient_frames,
    all_rois_gated,
    // synth
    overlapping_regions,
    spec_invalid,
    // eval
    length_mismatch,
    zero_reference,
    // generic
    io_error,
    config_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace rr
