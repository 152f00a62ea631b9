#pragma once

#include <stdexcept>
#include <string>

namespace phishkit {

// Problems in user-supplied data (malformed CSV rows, unknown labels, bad
// model files). The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace phishkit
