#pragma once

#include <cmath>

namespace catscatter {

/// Transverse 2-vector; lengths in units of a, momenta in 1/a.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    static Vec2 polar(double magnitude, double azimuth)
    {
        return {magnitude * std::cos(azimuth), magnitude * std::sin(azimuth)};
    }

    double norm2() const noexcept { return x * x + y * y; }
    double norm() const noexcept { return std::hypot(x, y); }

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

}  // namespace catscatter
