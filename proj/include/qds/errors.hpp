#ifndef QDS_ERRORS_HPP
#define QDS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qds {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// XOR key/payload lengths differ (violated 2l = d constraint upstream).
class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

// Key length not divisible into the requested number of blocks.
class NonDivisibleLengthError : public Error {
 public:
  using Error::Error;
};

// Invalid protocol configuration (odd n, 2l != d, misaligned sizes, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Signing attempted with a key whose mask is not all-known.
class PartialKeyError : public Error {
 public:
  using Error::Error;
};

// One-time key reuse attempt.
class KeyConsumedError : public Error {
 public:
  using Error::Error;
};

// Signing-pipeline length constraint (2l = d) violated.
class LengthConstraintError : public Error {
 public:
  using Error::Error;
};

// Simulated authenticated channel failed; distribution must abort.
class ChannelError : public Error {
 public:
  using Error::Error;
};

// Transport has been shut down.
class TransportClosedError : public Error {
 public:
  using Error::Error;
};

// Delivery refused by the routing policy (e.g. exchange traffic to the signer).
class RoutingError : public Error {
 public:
  using Error::Error;
};

// Formula evaluated outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

enum class DecodeErrorKind {
  BadMagic,
  UnsupportedVersion,
  TruncatedPayload,
  InconsistentLengths,
  UnknownAlgorithm,
};

// Structured wire-decoding failure; never accompanies partial output.
class DecodeError : public Error {
 public:
  DecodeError(DecodeErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  DecodeErrorKind kind() const { return kind_; }

 private:
  DecodeErrorKind kind_;
};

}  // namespace qds

#endif  // QDS_ERRORS_HPP
