#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace distinguo {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArityMismatch : Error { using Error::Error; };
struct OutOfUniverse : Error { using Error::Error; };
struct UnknownRelation : Error { using Error::Error; };
struct EmptyCycle : Error { using Error::Error; };
struct EqualityNotEnabled : Error { using Error::Error; };
struct DuplicateVariable : Error { using Error::Error; };
struct UnboundVariable : Error { using Error::Error; };
struct SignatureMismatch : Error { using Error::Error; };
struct BackendMismatch : Error { using Error::Error; };
struct SizeMismatch : Error { using Error::Error; };
struct NotABijection : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct TruncationTooSmall : Error { using Error::Error; };
struct NoCertificate : Error { using Error::Error; };

// Parsers use ArityError for atoms applied to the wrong number of arguments.
using ArityError = ArityMismatch;

// Text parse failure carrying the byte offset of the offending token.
struct SyntaxError : Error {
    std::size_t position;
    std::string detail;
    SyntaxError(std::size_t pos, const std::string& what)
        : Error("syntax error at offset " + std::to_string(pos) + ": " + what),
          position(pos),
          detail(what) {}
};

}  // namespace distinguo
