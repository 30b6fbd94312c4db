#pragma once

#include <stdexcept>
#include <string>

namespace pdm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct InvalidSpec : Error {
    using Error::Error;
};

struct InvalidInstance : Error {
    using Error::Error;
};

struct UnboundedDemand : Error {
    using Error::Error;
};

struct UnsupportedClass : Error {
    using Error::Error;
};

struct ProvenanceMissing : Error {
    using Error::Error;
};

struct GridTooLarge : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

} // namespace pdm
