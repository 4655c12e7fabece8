#pragma once

#include <stdexcept>
#include <string>

namespace ptile {

/// Raised on precondition violations and refused operations. The message is
/// the short reason string documented for each operation ("empty pattern",
/// "exact mode refused", ...), optionally followed by detail.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ptile
