#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ksym/liealg.hpp"

namespace ksym {

using Json = nlohmann::ordered_json;

// { "dim": n, "labels": [...], "c": [[[...]]] }
// Validates shape, antisymmetry and the Jacobi identity.
LieAlgebra algebra_from_json(const Json& j, double tol = 1e-9);

// Automorphism fixture:
// { "algebra": {...} | "algebra_file": "...", "order": k, "matrix": [[...]] }
struct AutomorphismFixture {
  LieAlgebra algebra;
  int order = 0;
  RMat matrix;
  std::string name;
};
AutomorphismFixture automorphism_from_json(const Json& j, double tol = 1e-9);
AutomorphismFixture load_automorphism_fixture(const std::string& path, double tol = 1e-9);

// Isometry fixture: { "matrix": [[...]], "k": k }
struct IsometryFixture {
  RMat matrix;
  int k = 0;
  std::string name;
};
IsometryFixture isometry_from_json(const Json& j);
IsometryFixture load_isometry_fixture(const std::string& path);

Json load_json_file(const std::string& path);

RMat matrix_from_json(const Json& j);
Json matrix_to_json(const RMat& m);

// FNV-1a over the raw file bytes; reports embed it so a run can be tied to the
// exact fixture revision.
std::uint64_t fnv1a_file(const std::string& path);
std::string hex64(std::uint64_t v);

// Directory that holds the shipped fixtures; honors KSYM_FIXTURE_DIR, falls
// back to ./fixtures.
std::string fixture_dir();

}  // namespace ksym
