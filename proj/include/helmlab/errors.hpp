#pragma once

#include <stdexcept>
#include <string>

namespace helmlab {

// Invalid user input: bad geometry, bad parameters, bad config values.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Failure of a numerical method on otherwise valid input.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

}  // namespace helmlab
