#ifndef OPSEQ_ERRORS_HPP
#define OPSEQ_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opseq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed corpus input (alignment pairs, reserved surfaces, bad lines).
struct IngestError : Error {
    using Error::Error;
};

// Structurally broken stream discovered while restoring buffers.
struct DecodeError : Error {
    using Error::Error;
};

// A jump or insert that the buffer machine cannot satisfy.
struct InterpreterError : Error {
    explicit InterpreterError(const std::string &msg, size_t tuple_index = 0)
        : Error(msg), tuple_index(tuple_index) {}
    size_t tuple_index;
};

}  // namespace opseq

#endif
