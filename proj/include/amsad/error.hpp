#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amsad {

enum class ErrorKind {
    config,     // invalid configuration or parameter
    input,      // malformed or inconsistent input data
    index,      // index out of range
    injection,  // anomaly injection cannot be applied
    window,     // window count does not divide the signal
    fit,        // clustering could not be fitted
    stats,      // statistics requested on an empty cluster
    degenerate, // centroid selection degenerate configuration
    refit,      // centroid refit with coincident centroids
    io,         // file read/write failure
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `key()` names the offending configuration key or
/// parameter when one is known, so callers can report it machine-readably.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string key = {})
        : std::runtime_error(message), kind_(kind), key_(std::move(key)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& key() const noexcept { return key_; }

private:
    ErrorKind kind_;
    std::string key_;
};

}  // namespace amsad
