#pragma once

#include <stdexcept>
#include <string>

namespace footfall {

// Invalid inputs to any operation: bad dimensions, out-of-range indices,
// malformed configs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A datagram whose byte length cannot correspond to any encoded event.
class MalformedDatagram : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A datagram that parses structurally but violates event invariants
// (duplicate or out-of-range atom indices), or a compressed event whose
// indices do not fit the dictionary it claims.
class CorruptEvent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A field does not fit the wire format (length or index beyond 16 bits).
class EncodingOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Feature extraction on a constant (zero-variance) event.
class DegenerateEvent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training with fewer than two classes or too few samples per class.
class DegenerateTraining : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Walk generation with a duration too short for a single footstep.
class EmptyWalk : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Atom selection on a sparse code with no coefficients.
class EmptyCode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File I/O problems: unreadable files, bad headers, unparseable records.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace footfall
