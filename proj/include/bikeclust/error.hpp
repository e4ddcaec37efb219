#pragma once

#include <stdexcept>
#include <string>

namespace bikeclust {

/// Raised for invalid input data or violated preconditions anywhere in the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bikeclust
