#pragma once

// A closed set E given as a stratification into cells, with a Whitney field
// on each stratum, plus the verification plan that travels with it.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "whitney/field.hpp"
#include "whitney/geometry.hpp"

namespace whitney {

struct Stratum {
  std::string id;
  CellPtr cell;
  /// Strata whose union is the frontier of this one.
  std::vector<std::string> boundary;

  int dim() const { return cell->intrinsic_dim(); }
};

struct VerifyPlan {
  std::uint64_t seed = 0;
  std::size_t samples_per_stratum = 100;
  double tol = 1e-4;
  std::vector<std::string> checks = {"extension", "whitney"};
};

struct Scene {
  std::string name;
  int n = 1;
  int p = 1;
  int q = 2;
  std::vector<Stratum> strata;
  FieldFamily fields;  // one per stratum, same order as strata
  std::vector<std::string> flat_on;
  VerifyPlan plan;

  const Stratum& stratum(const std::string& id) const;
  const FieldSpec& field(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;
  int dimension() const;
  bool declared_flat(const std::string& id) const;
  /// Union of the closures of the listed strata.
  SetDesc set_of(const std::vector<std::string>& ids) const;
  /// Ids of the strata of dimension <= k (k < 0: none).
  std::vector<std::string> skeleton(int k) const;
  /// The sub-scene on the listed strata (fields and flatness restricted).
  Scene restrict_to(const std::vector<std::string>& ids) const;
};

enum class IssueKind { kStructure, kSampling };

struct ValidationIssue {
  IssueKind kind = IssueKind::kStructure;
  std::string check;
  std::string stratum;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::vector<std::pair<std::string, GlaeserReport>> glaeser;
  std::vector<std::pair<std::string, LipschitzReport>> lipschitz;

  bool structurally_valid() const;
  bool ok() const { return issues.empty(); }
};

struct ValidateOptions {
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  bool sampling = true;
};

/// Structural checks (ids, orders, arities, downward-closed boundary relations,
/// closedness of E) and sampling checks (disjointness, slice consistency of the
/// fields, Lambda-regularity of the graph maps).
ValidationReport validate_scene(const Scene& scene, const ValidateOptions& opts = {});

}  // namespace whitney
