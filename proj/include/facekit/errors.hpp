#pragma once

#include <stdexcept>
#include <string>

namespace facekit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct BoundsError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct GeometryError : Error {
    using Error::Error;
};
// Bad argument values, degenerate distributions, empty inputs.
struct ValueError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct StateError : Error {
    using Error::Error;
};

struct TrainingError : Error {
    TrainingError(const std::string& msg, int stage_index)
        : Error(msg), stage(stage_index) {}
    int stage;
};

struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, int vector_index, double last_delta)
        : Error(msg), index(vector_index), delta(last_delta) {}
    int index;
    double delta;
};

struct RankError : Error {
    RankError(const std::string& msg, int vector_index)
        : Error(msg), index(vector_index) {}
    int index;
};

struct SymmetryError : Error {
    using Error::Error;
};

}  // namespace facekit
