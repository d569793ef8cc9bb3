#pragma once

#include <algorithm>
#include <cmath>

#include "rr/error.hpp"
#include "rr/tolerances.hpp"

namespace rr {

// Quaternion s + i*x + j*y + k*z. Pyramid coefficients always carry z == 0,
// but products of two such quaternions do not, so the full algebra is kept.
struct Quaternion {
    double s = 0.0;
    double x = 0.0; // i part
    double y = 0.0; // j part
    double z = 0.0; // k part

    bool operator==(const Quaternion&) const = default;
};

inline double q_norm(const Quaternion& q) {
    return std::sqrt(q.s * q.s + q.x * q.x + q.y * q.y + q.z * q.z);
}

// Hamilton product.
inline Quaternion q_mul(const Quaternion& a, const Quaternion& b) {
    return {
        a.s * b.s - a.x * b.x - a.y * b.y - a.z * b.z,
        a.s * b.x + a.x * b.s + a.y * b.z - a.z * b.y,
        a.s * b.y - a.x * b.z + a.y * b.s + a.z * b.x,
        a.s * b.z + a.x * b.y - a.y * b.x + a.z * b.s,
    };
}

inline Quaternion q_conj(const Quaternion& q) { return {q.s, -q.x, -q.y, -q.z}; }

inline Quaternion q_inv(const Quaternion& q) {
    const double n2 = q.s * q.s + q.x * q.x + q.y * q.y + q.z * q.z;
    if (n2 <= 0.0) throw Error(Errc::zero_quaternion, "inverse of zero quaternion");
    return {q.s / n2, -q.x / n2, -q.y / n2, -q.z / n2};
}

// Log of a unit quaternion: zero scalar part, vector part (v/|v|) * arccos(s).
// A vanishing vector part is the log of +/- identity: +identity maps to zero,
// -identity is singular and is pinned to vector norm pi along (1,0,0) with
// `antipodal` raised so callers can mask it.
inline Quaternion q_log_unit(const Quaternion& q, bool* antipodal = nullptr) {
    if (antipodal) *antipodal = false;
    const double n = q_norm(q);
    if (std::abs(n - 1.0) > Tol::unit_norm)
        throw Error(Errc::not_unit_norm, "q_log_unit expects a unit quaternion");
    const double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    if (vn < Tol::tiny_vector) {
        if (q.s < 0.0) {
            if (antipodal) *antipodal = true;
            return {0.0, std::acos(-1.0), 0.0, 0.0};
        }
        return {};
    }
    const double angle = std::acos(std::clamp(q.s, -1.0, 1.0));
    const double k = angle / vn;
    return {0.0, q.x * k, q.y * k, q.z * k};
}

} // namespace rr
