#include "rr/error.hpp"

namespace rr {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::mixed_dimensions: return "MixedDimensions";
    case Errc::empty_sequence: return "EmptySequence";
    case Errc::unreadable_frame: return "UnreadableFrame";
    case Errc::channel_mismatch: return "ChannelMismatch";
    case Errc::too_small: return "TooSmall";
    case Errc::dim_mismatch: return "DimMismatch";
    case Errc::too_many_levels: return "TooManyLevels";
    case Errc::invalid_band: return "InvalidBand";
    case Errc::geometry_mismatch: return "GeometryMismatch";
    case Errc::zero_quaternion: return "ZeroQuaternion";
    case Errc::not_unit_norm: return "NotUnitNorm";
    case Errc::frequency_at_edge: return "FrequencyAtEdge";
    case Errc::window_too_long: return "WindowTooLong";
    case Errc::frame_too_small: return "FrameTooSmall";
    case Errc::insufficient_frames: return "InsufficientFrames";
    case Errc::all_rois_gated: return "AllRoisGated";
    case Errc::overlapping_regions: return "OverlappingRegions";
    case Errc::spec_invalid: return "SpecInvalid";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::zero_reference: return "ZeroReference";
    case Errc::io_error: return "IoError";
    case Errc::config_error: return "ConfigError";
    }
    return "UnknownError";
}

} // namespace rr
