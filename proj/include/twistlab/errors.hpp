#ifndef TWISTLAB_ERRORS_HPP
#define TWISTLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace twistlab {

struct DivideByZero : std::runtime_error {
    explicit DivideByZero(const std::string& what = "division by zero")
        : std::runtime_error(what) {}
};

struct DegreeMismatch : std::runtime_error {
    explicit DegreeMismatch(const std::string& what = "degree mismatch")
        : std::runtime_error(what) {}
};

struct DuplicatePoint : std::runtime_error {
    explicit DuplicatePoint(const std::string& what = "duplicate point")
        : std::runtime_error(what) {}
};

struct NotInSubring : std::runtime_error {
    explicit NotInSubring(const std::string& what = "element not in subring")
        : std::runtime_error(what) {}
};

struct SizeLimit : std::runtime_error {
    explicit SizeLimit(const std::string& what = "size limit exceeded")
        : std::runtime_error(what) {}
};

struct NonTriangularizable : std::runtime_error {
    explicit NonTriangularizable(const std::string& what = "matrix not triangularizable here")
        : std::runtime_error(what) {}
};

struct FirstCoordinateCollision : std::runtime_error {
    explicit FirstCoordinateCollision(const std::string& what = "first affine coordinates collide")
        : std::runtime_error(what) {}
};

struct WindowTooSmall : std::runtime_error {
    explicit WindowTooSmall(const std::string& what = "window too small")
        : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace twistlab

#endif
