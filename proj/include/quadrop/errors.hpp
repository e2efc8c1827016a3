#pragma once

#include <stdexcept>
#include <string>

namespace quadrop {

// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define QUADROP_DEFINE_ERROR(Name)                         \
  struct Name : Error {                                    \
    explicit Name(const std::string& msg) : Error(msg) {}  \
  }

QUADROP_DEFINE_ERROR(BadDimension);
QUADROP_DEFINE_ERROR(NotSymmetric);
QUADROP_DEFINE_ERROR(NotAccretive);
QUADROP_DEFINE_ERROR(IllConditioned);
QUADROP_DEFINE_ERROR(FocalTime);
QUADROP_DEFINE_ERROR(SingularForm);
QUADROP_DEFINE_ERROR(NotPositiveDefinite);
QUADROP_DEFINE_ERROR(DegreeCap);
QUADROP_DEFINE_ERROR(OverflowGuard);
QUADROP_DEFINE_ERROR(EmptyComplement);
QUADROP_DEFINE_ERROR(TruncationTooLarge);
QUADROP_DEFINE_ERROR(GridUnderResolved);
QUADROP_DEFINE_ERROR(NyquistViolation);
QUADROP_DEFINE_ERROR(ZeroOnOmega);
QUADROP_DEFINE_ERROR(GramianSingular);
QUADROP_DEFINE_ERROR(StageDivergence);
QUADROP_DEFINE_ERROR(InsufficientData);
QUADROP_DEFINE_ERROR(ParameterOutOfRange);
QUADROP_DEFINE_ERROR(SchemaError);
QUADROP_DEFINE_ERROR(FileNotFound);
QUADROP_DEFINE_ERROR(IoError);

#undef QUADROP_DEFINE_ERROR

}  // namespace quadrop
