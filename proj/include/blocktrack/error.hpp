#pragma once

#include <stdexcept>
#include <string>

namespace blocktrack {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A crop window that selects no grid cells.
class EmptyDomain : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Grids, calendars or array extents that do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Two date-indexed streams that do not cover the same dates.
class AlignmentError : public Error {
public:
    using Error::Error;
};

class CorruptInput : public Error {
public:
    using Error::Error;
};

class MalformedHeader : public Error {
public:
    using Error::Error;
};

/// A file that cannot be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

class InvalidMember : public Error {
public:
    using Error::Error;
};

class InsufficientEnsemble : public Error {
public:
    using Error::Error;
};

} // namespace blocktrack
