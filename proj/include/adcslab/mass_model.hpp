#pragma once

// Point-mass catalog of spacecraft components, centre of gravity and inertia
// tensor about it, regolith placement uncertainty, and the centrifuge
// artificial-gravity relation.
//
// Catalog positions are in cm in the chassis geometric frame; inertia is
// returned in SI (kg m^2) about the CG, in axes parallel to the geometric frame.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adcslab/attitude.hpp"

namespace adcslab {

struct MassComponent {
  std::string name;
  double mass_kg = 0.0;
  Vec3 position_cm = Vec3::Zero();
  /// Optional box dimensions (cm). When set the component also contributes the
  /// self-inertia of a uniform solid cuboid of that size about its own centre.
  std::optional<Vec3> extent_cm;
};

struct ChamberBounds {
  Vec3 min_cm;
  Vec3 max_cm;

  /// Throws InvalidArgumentError unless min < max on every axis.
  static ChamberBounds make(const Vec3& min_cm, const Vec3& max_cm);
  bool contains(const Vec3& p_cm) const;
  std::array<Vec3, 8> corners() const;
};

/// Default chamber: x, y in [-4, 4] cm, z in [0, 18] cm.
ChamberBounds default_chamber();

struct MassCatalog {
  std::vector<MassComponent> components;  // fixed components, regolith excluded
  MassComponent regolith;
  bool regolith_sampled = false;          // catalog file asked for a sampled placement
  ChamberBounds chamber = default_chamber();

  /// Throws ConfigError on empty catalogs, duplicate names, non-positive
  /// masses or non-finite positions.
  void validate() const;
  MassCatalog with_regolith_at(const Vec3& position_cm) const;
  /// Fixed components followed by the regolith.
  std::vector<MassComponent> all_components() const;
  double total_mass() const;
};

/// The AOSAT-1 mass distribution with the regolith stowed at (0, 0, 14) cm and
/// the chassis carried as a 10 x 10 x 34 cm solid cuboid.
MassCatalog aosat1_catalog();

struct MassProperties {
  double total_mass_kg = 0.0;
  Vec3 cg_cm = Vec3::Zero();
  InertiaTensor inertia;
};

/// Mass-weighted mean of the component positions (cm).
Vec3 compute_cg(const MassCatalog& catalog);

/// Component positions relative to r_g, in the order of all_components().
std::vector<Vec3> recentre(const MassCatalog& catalog, const Vec3& r_g_cm);

/// Inertia about the CG, read off as the coefficients of omega_j in the
/// angular momentum H_i = sum r' x m (omega x r') of the rigid point-mass
/// set. No definiteness check; a collinear catalog yields a singular matrix.
Mat3 inertia_matrix(const MassCatalog& catalog);

/// inertia_matrix() validated as an InertiaTensor. Throws
/// DegenerateCatalogError when the mass is collinear (or otherwise singular).
InertiaTensor inertia_tensor(const MassCatalog& catalog);

/// True when inertia_matrix() is not a valid (positive-definite) inertia.
bool is_degenerate(const MassCatalog& catalog);

MassProperties mass_properties(const MassCatalog& catalog);

/// Principal axes of a symmetric inertia matrix. Columns of
/// `body_to_geometric` are the principal axes expressed in the geometric
/// frame, permuted and signed to stay closest to the geometric x, y, z axes,
/// forming a right-handed frame. A matrix that is already diagonal yields the
/// identity.
struct PrincipalAxes {
  Vec3 moments = Vec3::Zero();
  Mat3 body_to_geometric = Mat3::Identity();
};

PrincipalAxes principal_axes(const Mat3& j);

struct PlacementResult {
  Vec3 regolith_cm;
  Vec3 cg_cm;
  Mat3 inertia;
};

struct MassEnvelope {
  std::array<PlacementResult, 8> corners;
  Vec3 cg_min_cm, cg_max_cm;
  Mat3 j_min, j_max;
};

/// CG and inertia with the regolith at each of the 8 chamber corners, and
/// elementwise bounds over the chamber. The diagonal inertia entries are
/// convex in the regolith position and can reach their minimum inside the
/// box, so the bounds also include those interior extremal placements.
MassEnvelope corner_envelope(const MassCatalog& catalog, const ChamberBounds& chamber);

/// Uniform, per-axis independent regolith position inside the chamber.
/// Deterministic in seed.
Vec3 sample_regolith(const ChamberBounds& chamber, std::uint64_t seed);

/// Centripetal acceleration r * omega^2 (m/s^2) at radius r (m).
double artificial_gravity(double radius_m, double omega_radps);

}  // namespace adcslab
