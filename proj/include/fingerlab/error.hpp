#pragma once

#include <stdexcept>
#include <string>

namespace fingerlab {

// Base for every exception raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace fingerlab
