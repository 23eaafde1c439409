#include "ksym/jsonio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ksym {

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("parse error in " + path + ": " + e.what());
  }
  return j;
}

LieAlgebra algebra_from_json(const Json& j, double tol) {
  if (!j.contains("dim") || !j.contains("c"))
    throw InputError("algebra: missing \"dim\" or \"c\"");
  LieAlgebra g;
  g.dim = j.at("dim").get<int>();
  if (g.dim <= 0) throw InputError("algebra: dim must be positive");
  const auto n = static_cast<std::size_t>(g.dim);
  if (j.contains("labels")) {
    g.labels = j.at("labels").get<std::vector<std::string>>();
    if (g.labels.size() != n) throw InputError("algebra: labels length != dim");
  } else {
    g.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.labels[i] = "e" + std::to_string(i + 1);
  }
  const Json& c = j.at("c");
  if (!c.is_array() || c.size() != n) throw InputError("algebra: c must be dim^3");
  g.c.assign(n * n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Json& ci = c[i];
    if (!ci.is_array() || ci.size() != n) throw InputError("algebra: c must be dim^3");
    for (std::size_t jj = 0; jj < n; ++jj) {
      const Json& cij = ci[jj];
      if (!cij.is_array() || cij.size() != n) throw InputError("algebra: c must be dim^3");
      for (std::size_t k = 0; k < n; ++k)
        g.c[(i * n + jj) * n + k] = cij[k].get<double>();
    }
  }
  if (g.antisymmetry_residual() > tol)
    throw InputError("algebra: structure constants are not antisymmetric");
  if (g.jacobi_residual() > tol)
    throw InputError("algebra: Jacobi identity fails");
  return g;
}

RMat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix: expected nested array");
  const auto rows = j.size();
  const auto cols = j[0].size();
  RMat m(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw InputError("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
  }
  return m;
}

Json matrix_to_json(const RMat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

AutomorphismFixture automorphism_from_json(const Json& j, double tol) {
  AutomorphismFixture f;
  if (j.contains("algebra_file")) {
    f.algebra = algebra_from_json(load_json_file(fixture_dir() + "/" + j.at("algebra_file").get<std::string>()), tol);
  } else if (j.contains("algebra")) {
    f.algebra = algebra_from_json(j.at("algebra"), tol);
  } else {
    throw InputError("automorphism fixture: missing \"algebra\"");
  }
  if (!j.contains("order") || !j.contains("matrix"))
    throw InputError("automorphism fixture: missing \"order\" or \"matrix\"");
  f.order = j.at("order").get<int>();
  if (f.order < 1) throw InputError("automorphism fixture: order must be >= 1");
  f.matrix = matrix_from_json(j.at("matrix"));
  if (f.matrix.rows() != f.algebra.dim || f.matrix.cols() != f.algebra.dim)
    throw InputError("automorphism fixture: matrix shape != algebra dim");
  if (j.contains("name")) f.name = j.at("name").get<std::string>();
  return f;
}

AutomorphismFixture load_automorphism_fixture(const std::string& path, double tol) {
  AutomorphismFixture f = automorphism_from_json(load_json_file(path), tol);
  if (f.name.empty()) f.name = path;
  return f;
}

IsometryFixture isometry_from_json(const Json& j) {
  if (!j.contains("matrix") || !j.contains("k"))
    throw InputError("isometry fixture: missing \"matrix\" or \"k\"");
  IsometryFixture f;
  f.matrix = matrix_from_json(j.at("matrix"));
  f.k = j.at("k").get<int>();
  if (f.k < 1) throw InputError("isometry fixture: k must be >= 1");
  if (j.contains("name")) f.name = j.at("name").get<std::string>();
  return f;
}

IsometryFixture load_isometry_fixture(const std::string& path) {
  IsometryFixture f = isometry_from_json(load_json_file(path));
  if (f.name.empty()) f.name = path;
  return f;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fixture_dir() {
  const char* env = std::getenv("KSYM_FIXTURE_DIR");
  if (env != nullptr && env[0] != '\0') return env;
  return "fixtures";
}

}  // namespace ksym
