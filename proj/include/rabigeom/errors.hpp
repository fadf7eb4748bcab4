// errors.hpp - exception types shared by all rabigeom modules

#pragma once

#include <stdexcept>
#include <string>

namespace rabigeom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RABIGEOM_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

RABIGEOM_DEFINE_ERROR(InvalidMatrix);
RABIGEOM_DEFINE_ERROR(DimensionError);
RABIGEOM_DEFINE_ERROR(InvalidGrid);
RABIGEOM_DEFINE_ERROR(InvalidParams);
RABIGEOM_DEFINE_ERROR(NotJCReduction);
RABIGEOM_DEFINE_ERROR(NotEqualFrequency);
RABIGEOM_DEFINE_ERROR(NotNormalized);
RABIGEOM_DEFINE_ERROR(LabelError);
RABIGEOM_DEFINE_ERROR(WeightError);
RABIGEOM_DEFINE_ERROR(NoRational);
RABIGEOM_DEFINE_ERROR(NoAnticrossing);

#undef RABIGEOM_DEFINE_ERROR

}  // namespace rabigeom
