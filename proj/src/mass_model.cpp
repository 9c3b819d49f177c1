#include "adcslab/mass_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "adcslab/random.hpp"

namespace adcslab {

namespace {

constexpr double kCmToM = 0.01;

Mat3 cuboid_self_inertia(double mass_kg, const Vec3& extent_cm) {
  const Vec3 d = extent_cm * kCmToM;
  const double k = mass_kg / 12.0;
  return Vec3(k * (d.y() * d.y() + d.z() * d.z()), k * (d.x() * d.x() + d.z() * d.z()),
              k * (d.x() * d.x() + d.y() * d.y()))
      .asDiagonal();
}

PlacementResult evaluate_placement(const MassCatalog& catalog, const Vec3& p_cm) {
  const MassCatalog placed = catalog.with_regolith_at(p_cm);
  return {p_cm, compute_cg(placed), inertia_matrix(placed)};
}

}  // namespace

ChamberBounds ChamberBounds::make(const Vec3& min_cm, const Vec3& max_cm) {
  if (!min_cm.allFinite() || !max_cm.allFinite()) {
    throw InvalidArgumentError("chamber bounds must be finite");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(min_cm[i] < max_cm[i])) {
      throw InvalidArgumentError("chamber bounds need min < max on every axis");
    }
  }
  return {min_cm, max_cm};
}

bool ChamberBounds::contains(const Vec3& p) const {
  for (int i = 0; i < 3; ++i) {
    if (p[i] < min_cm[i] || p[i] > max_cm[i]) return false;
  }
  return true;
}

std::array<Vec3, 8> ChamberBounds::corners() const {
  std::array<Vec3, 8> out;
  for (int c = 0; c < 8; ++c) {
    out[c] = Vec3((c & 1) ? max_cm.x() : min_cm.x(), (c & 2) ? max_cm.y() : min_cm.y(),
                  (c & 4) ? max_cm.z() : min_cm.z());
  }
  return out;
}

ChamberBounds default_chamber() { return ChamberBounds::make(Vec3(-4, -4, 0), Vec3(4, 4, 18)); }

void MassCatalog::validate() const {
  std::set<std::string> names;
  const auto all = all_components();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& c = all[i];
    const bool is_regolith = i + 1 == all.size();
    const std::string where = is_regolith ? "regolith" : "components[" + std::to_string(i) + "]";
    if (c.name.empty()) throw ConfigError(where, "component name is empty");
    if (!names.insert(c.name).second) throw ConfigError(where, "duplicate component name '" + c.name + "'");
    if (!std::isfinite(c.mass_kg) || c.mass_kg < 0.0 || (!is_regolith && c.mass_kg == 0.0)) {
      throw ConfigError(where, "mass must be positive");
    }
    if (!c.position_cm.allFinite()) throw ConfigError(where, "position is not finite");
    if (c.extent_cm && (c.extent_cm->minCoeff() < 0.0 || !c.extent_cm->allFinite())) {
      throw ConfigError(where, "extent must be finite and non-negative");
    }
  }
  if (!(total_mass() > 0.0)) throw ConfigError("", "catalog has no mass");
}

MassCatalog MassCatalog::with_regolith_at(const Vec3& position_cm) const {
  MassCatalog out = *this;
  out.regolith.position_cm = position_cm;
  out.regolith_sampled = false;
  return out;
}

std::vector<MassComponent> MassCatalog::all_components() const {
  std::vector<MassComponent> all = components;
  all.push_back(regolith);
  return all;
}

double MassCatalog::total_mass() const {
  double m = regolith.mass_kg;
  for (const auto& c : components) m += c.mass_kg;
  return m;
}

MassCatalog aosat1_catalog() {
  MassCatalog cat;
  auto add = [&](std::string name, double m, double z) {
    cat.components.push_back({std::move(name), m, Vec3(0, 0, z), std::nullopt});
  };
  add("Chassis", 1.15, 0);
  cat.components.back().extent_cm = Vec3(10, 10, 34);
  add("Battery", 0.29, -14);
  add("Top & Bottom Panels", 0.07, 0);
  add("Side Panels", 0.06, 0);
  add("Breakout board-1", 0.06, -5.1);
  add("Daughter board", 0.06, -7.1);
  add("Main Computer", 0.06, -7.6);
  add("Breakout board-2", 0.06, -9.6);
  add("Power distribution board", 0.06, -11);
  add("Camera", 0.21, -2.5);
  add("Payload chamber", 0.52, 5);
  add("Reaction Wheel", 0.12, -12);
  cat.regolith = {"Regolith", 0.25, Vec3(0, 0, 14), std::nullopt};
  cat.chamber = default_chamber();
  return cat;
}

Vec3 compute_cg(const MassCatalog& catalog) {
  Vec3 moment = Vec3::Zero();
  double mass = 0.0;
  for (const auto& c : catalog.all_components()) {
    moment += c.mass_kg * c.position_cm;
    mass += c.mass_kg;
  }
  if (!(mass > 0.0)) throw InvalidArgumentError("catalog has no mass");
  return moment / mass;
}

std::vector<Vec3> recentre(const MassCatalog& catalog, const Vec3& r_g_cm) {
  std::vector<Vec3> out;
  for (const auto& c : catalog.all_components()) out.push_back(c.position_cm - r_g_cm);
  return out;
}

Mat3 inertia_matrix(const MassCatalog& catalog) {
  const auto all = catalog.all_components();
  const auto rel = recentre(catalog, compute_cg(catalog));

  Mat3 j = Mat3::Zero();
  // H is linear in omega, so its value at the unit vector e_j is exactly the
  // column of omega_j coefficients.
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 omega = Vec3::Unit(axis);
    Vec3 h = Vec3::Zero();
    for (std::size_t i = 0; i < all.size(); ++i) {
      const Vec3 r = rel[i] * kCmToM;
      h += r.cross(all[i].mass_kg * omega.cross(r));
    }
    j.col(axis) = h;
  }
  for (const auto& c : all) {
    if (c.extent_cm) j += cuboid_self_inertia(c.mass_kg, *c.extent_cm);
  }
  return j;
}

InertiaTensor inertia_tensor(const MassCatalog& catalog) {
  try {
    return InertiaTensor::from_matrix(inertia_matrix(catalog));
  } catch (const SingularInertiaError& e) {
    throw DegenerateCatalogError(std::string("degenerate mass catalog: ") + e.what());
  }
}

bool is_degenerate(const MassCatalog& catalog) {
  try {
    (void)inertia_tensor(catalog);
    return false;
  } catch (const DegenerateCatalogError&) {
    return true;
  }
}

MassProperties mass_properties(const MassCatalog& catalog) {
  return {catalog.total_mass(), compute_cg(catalog), inertia_tensor(catalog)};
}

PrincipalAxes principal_axes(const Mat3& j) {
  PrincipalAxes out;
  const double scale = j.diagonal().cwiseAbs().maxCoeff();
  const double off = std::max({std::abs(j(0, 1)), std::abs(j(0, 2)), std::abs(j(1, 2))});
  if (off <= 1e-14 * scale) {
    out.moments = j.diagonal();
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(0.5 * (j + j.transpose()));
  const Mat3 v = eig.eigenvectors();

  // assignment of eigenvectors to geometric axes with the largest total overlap
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> best = perm;
  double best_score = -1.0;
  do {
    const double score = std::abs(v(0, perm[0])) + std::abs(v(1, perm[1])) + std::abs(v(2, perm[2]));
    if (score > best_score + 1e-15) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Mat3 r;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 col = v.col(best[axis]);
    if (col[axis] < 0.0) col = -col;
    r.col(axis) = col;
    out.moments[axis] = eig.eigenvalues()[best[axis]];
  }
  if (r.determinant() < 0.0) r.col(2) = -r.col(2);
  out.body_to_geometric = r;
  return out;
}

MassEnvelope corner_envelope(const MassCatalog& catalog, const ChamberBounds& chamber) {
  MassEnvelope env;
  const auto corners = chamber.corners();
  for (int c = 0; c < 8; ++c) env.corners[c] = evaluate_placement(catalog, corners[c]);

  env.cg_min_cm = env.cg_max_cm = env.corners[0].cg_cm;
  env.j_min = env.j_max = env.corners[0].inertia;
  auto absorb = [&](const PlacementResult& r) {
    env.cg_min_cm = env.cg_min_cm.cwiseMin(r.cg_cm);
    env.cg_max_cm = env.cg_max_cm.cwiseMax(r.cg_cm);
    env.j_min = env.j_min.cwiseMin(r.inertia);
    env.j_max = env.j_max.cwiseMax(r.inertia);
  };
  for (const auto& r : env.corners) absorb(r);

  // Each diagonal entry is a sum of per-axis convex parabolas in the regolith
  // position, centred on the CG of the fixed components; off-diagonals are
  // bilinear. Axis values {min, max, fixed-CG (if inside)} cover all extrema.
  Vec3 fixed_moment = Vec3::Zero();
  double fixed_mass = 0.0;
  for (const auto& c : catalog.components) {
    fixed_moment += c.mass_kg * c.position_cm;
    fixed_mass += c.mass_kg;
  }
  if (fixed_mass > 0.0) {
    const Vec3 s = fixed_moment / fixed_mass;
    std::array<std::vector<double>, 3> candidates;
    for (int k = 0; k < 3; ++k) {
      candidates[k] = {chamber.min_cm[k], chamber.max_cm[k]};
      if (s[k] > chamber.min_cm[k] && s[k] < chamber.max_cm[k]) candidates[k].push_back(s[k]);
    }
    for (double x : candidates[0]) {
      for (double y : candidates[1]) {
        for (double z : candidates[2]) absorb(evaluate_placement(catalog, Vec3(x, y, z)));
      }
    }
  }
  return env;
}

Vec3 sample_regolith(const ChamberBounds& chamber, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  Vec3 p;
  for (int k = 0; k < 3; ++k) p[k] = uniform(rng, chamber.min_cm[k], chamber.max_cm[k]);
  return p;
}

double artificial_gravity(double radius_m, double omega_radps) {
  if (radius_m < 0.0) throw InvalidArgumentError("radius must be non-negative");
  return radius_m * omega_radps * omega_radps;
}

}  // namespace adcslab
