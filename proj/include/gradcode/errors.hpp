#pragma once

#include <stdexcept>

namespace gradcode {

/// Base class for every domain error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPrimePower : Error { using Error::Error; };
struct DivideByZero : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct InvalidDimension : Error { using Error::Error; };
struct UnsupportedOrder : Error { using Error::Error; };
struct NotUniform : Error { using Error::Error; };
struct NotBalanced : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct UnverifiedDesign : Error { using Error::Error; };
struct Indivisible : Error { using Error::Error; };
struct WrongKind : Error { using Error::Error; };
struct MethodUnavailable : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct NotInClassC : Error { using Error::Error; };
struct EtaTooLarge : Error { using Error::Error; };
struct SingularUpdate : Error { using Error::Error; };

}  // namespace gradcode
