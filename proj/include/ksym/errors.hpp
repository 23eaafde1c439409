#pragma once

#include <stdexcept>
#include <string>

namespace ksym {

// Bad user input: malformed files, dimension mismatches, invalid parameters.
// The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A geometric precondition failed (non-invariant metric, Nijenhuis tensor not
// skew, connection not structure-preserving, ...).  CLI exit code 1.
struct StructureError : std::runtime_error {
  explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

// The relaxation solver diverged.  CLI exit code 3.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Characteristic-connection gates: the manifold class does not admit the
// requested connection with skew torsion.
struct NotG1Error : StructureError {
  explicit NotG1Error(const std::string& what) : StructureError(what) {}
};
struct NotGlobalG1Error : StructureError {
  explicit NotGlobalG1Error(const std::string& what) : StructureError(what) {}
};
struct NotReductiveError : StructureError {
  explicit NotReductiveError(const std::string& what) : StructureError(what) {}
};

}  // namespace ksym
