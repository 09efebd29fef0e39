#pragma once

#include <stdexcept>
#include <string>

namespace tfft {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transform length is zero, not a power of two, or disagrees with a plan.
class SizeError : public Error {
public:
    using Error::Error;
};

/// A strided description addresses overlapping or out-of-range elements.
class LayoutError : public Error {
public:
    using Error::Error;
};

/// A complex-to-real input is not Hermitian-consistent.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Grid / process-count combination cannot be decomposed into slabs.
class ConfigError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

/// An operation received a slab with the wrong tag or shape.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Peers disagree about a message (size mismatch, missing rank data).
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Delivery failure: unknown peer, deadlock, or a failed peer rank.
class TransportError : public Error {
public:
    using Error::Error;
};

} // namespace tfft
