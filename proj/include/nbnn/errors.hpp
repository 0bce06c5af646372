#pragma once

#include <stdexcept>
#include <string>

namespace nbnn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Descriptors of different lengths were combined.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// A descriptor component is NaN or infinite.
class NonFiniteComponent : public Error {
public:
    using Error::Error;
};

// A descriptor's Euclidean norm is below the 1e-12 threshold, so cosine
// similarity would be undefined.
class ZeroNormDescriptor : public Error {
public:
    using Error::Error;
};

// MEAN shot-merging was asked to average sets of different cardinality.
class CardinalityMismatch : public Error {
public:
    using Error::Error;
};

// The dataset cannot supply the requested episode protocol.
class InsufficientData : public Error {
public:
    using Error::Error;
};

// ODM percentage outside (0, 100].
class InvalidPercent : public Error {
public:
    using Error::Error;
};

// A scoring rule was applied to a selection with no pairs.
class EmptySelection : public Error {
public:
    using Error::Error;
};

// An index points outside its container.
class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

// A generator or protocol configuration is malformed.
class InvalidSpec : public Error {
public:
    using Error::Error;
};

// Catch-all for violated call preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Descriptor file does not start with the expected magic bytes.
class BadMagic : public Error {
public:
    using Error::Error;
};

// Descriptor file payload is shorter (or longer) than its header promises.
class TruncatedPayload : public Error {
public:
    using Error::Error;
};

// Descriptor file format version this build does not understand.
class UnsupportedVersion : public Error {
public:
    using Error::Error;
};

// Filesystem-level failure (missing file, unreadable path, ...).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace nbnn
