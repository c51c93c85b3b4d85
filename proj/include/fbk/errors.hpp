#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace fbk {

// Base error for the library. Subtypes distinguish bad inputs from
// numerical failures so the CLI can map them to distinct exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

struct SolverError : Error {
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

}  // namespace fbk

#define FBK_REQUIRE(cond, msg)                      \
    do {                                            \
        if (!(cond)) {                              \
            std::ostringstream fbk_oss_;            \
            fbk_oss_ << msg;                        \
            throw fbk::ValidationError(fbk_oss_.str()); \
        }                                           \
    } while (0)

#define FBK_NUMERIC_REQUIRE(cond, msg)              \
    do {                                            \
        if (!(cond)) {                              \
            std::ostringstream fbk_oss_;            \
            fbk_oss_ << msg;                        \
            throw fbk::SolverError(fbk_oss_.str()); \
        }                                           \
    } while (0)
