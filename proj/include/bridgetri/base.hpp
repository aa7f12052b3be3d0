#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bridgetri {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A structural invariant of a diagram or map failed to hold.
struct ValidationError : Error {
    using Error::Error;
};

/// An operation's precondition was not met by its input.
struct PreconditionError : Error {
    using Error::Error;
};

/// Rendering was requested for a diagram that carries no layout.
struct NoLayoutError : Error {
    NoLayoutError() : Error("diagram has no layout; cannot render") {}
};

/// No admissible pairing could be produced for a requested cover.
struct NoPairingFoundError : Error {
    using Error::Error;
};

/// A document could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw PreconditionError(msg);
}

inline void check_valid(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

/// Exact 2D point/vector with rational coordinates.
struct Vec2 {
    Rat x, y;
    Vec2() : x(0), y(0) {}
    Vec2(Rat px, Rat py) : x(std::move(px)), y(std::move(py)) {}
    Vec2(long px, long py) : x(px), y(py) {}

    friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(const Rat& s, const Vec2& a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Vec2& a, const Vec2& b) { return !(a == b); }
};

inline Rat cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Rat dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// Sign of a rational: -1, 0, or +1.
inline int sgn(const Rat& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

} // namespace bridgetri
