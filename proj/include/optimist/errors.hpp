#pragma once

#include <stdexcept>
#include <string>

namespace optimist {

// Error taxonomy shared across the library. The CLI maps these onto
// process exit codes (config -> 2, data -> 3).

// Invalid configuration: bad parameter values, malformed config files,
// missing nuisance entries, invalid design specs.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or unusable data: malformed trajectory files, schema violations,
// outcomes a design cannot accept.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Data is well-formed but does not support the requested computation
// (e.g. an arm with zero pulls where a mean or variance is needed).
class insufficient_data_error : public data_error {
public:
    explicit insufficient_data_error(const std::string& msg) : data_error(msg) {}
};

// A design was asked to act past its configured horizon.
class horizon_error : public std::logic_error {
public:
    explicit horizon_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace optimist
