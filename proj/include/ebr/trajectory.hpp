#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ebr/engine.hpp"
#include "ebr/membrane.hpp"
#include "ebr/types.hpp"

namespace ebr {

enum class Stage { kPlunge, kDisintegration, kCollapse };
enum class MembranePhase { kFull, kBreaking, kContracted };

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kPlunge: return "plunge";
    case Stage::kDisintegration: return "disintegration";
    case Stage::kCollapse: return "collapse";
  }
  return "?";
}

inline std::string_view to_string(MembranePhase m) {
  switch (m) {
    case MembranePhase::kFull: return "full";
    case MembranePhase::kBreaking: return "breaking";
    case MembranePhase::kContracted: return "contracted";
  }
  return "?";
}

/// One animation frame of the two-stage process.
template <typename Scalar = double>
struct Frame {
  Stage stage = Stage::kPlunge;
  Scalar t = Scalar(0);  // within-stage time in [0, 1]
  BlochVector<Scalar> particle;
  MembranePhase membrane_state = MembranePhase::kFull;
  std::optional<RealVector<Scalar>> break_bary;  // set on the breaking frame
  std::optional<RealVector<Scalar>> embedding;
};

/// Signed in-plane coordinates of a Bloch point with respect to the
/// membrane's affine hull, plus its orthogonal distance to that hull.
/// Restricted to the membrane this map is an isometry.
template <typename Derived>
RealVector<typename Derived::Scalar> membrane_plane_coordinates(
    const Eigen::MatrixBase<Derived>& point,
    const MembraneSimplex<typename Derived::Scalar>& membrane) {
  using Scalar = typename Derived::Scalar;
  const BlochVector<Scalar> rel = point - membrane.centroid;
  RealVector<Scalar> in_plane = membrane.plane_basis.transpose() * rel;
  RealVector<Scalar> out(in_plane.size() + 1);
  out.head(in_plane.size()) = in_plane;
  out[in_plane.size()] = (rel - membrane.plane_basis * in_plane).norm();
  return out;
}

/// Distance of a Bloch point to the membrane's affine hull.
template <typename Derived>
typename Derived::Scalar offplane_distance(
    const Eigen::MatrixBase<Derived>& point,
    const MembraneSimplex<typename Derived::Scalar>& membrane) {
  using Scalar = typename Derived::Scalar;
  const BlochVector<Scalar> rel = point - membrane.centroid;
  return (rel - membrane.plane_basis * (membrane.plane_basis.transpose() * rel))
      .norm();
}

/// Low-dimensional plotting coordinates: the native 3 Bloch coordinates for
/// N=2 (the whole sphere is drawable), the (N-1 in-plane, 1 off-plane)
/// membrane coordinates for N >= 3.
template <typename Derived>
RealVector<typename Derived::Scalar> embed(
    const Eigen::MatrixBase<Derived>& point,
    const MembraneSimplex<typename Derived::Scalar>& membrane) {
  using Scalar = typename Derived::Scalar;
  if (point.size() != membrane.vertices.rows())
    throw std::invalid_argument("embed: dimension mismatch");
  if (membrane.dim == 2) return point;
  return membrane_plane_coordinates(point, membrane);
}

/// Time-parametrized frames of a recorded measurement: frames_per_stage
/// frames of the plunge (initial -> landed point, a chord orthogonal to the
/// membrane), then frames_per_stage frames of the second stage, whose t=0
/// frame marks the break point and whose remainder contracts the particle
/// to the winning vertex.  Both interpolations are linear with exact
/// endpoints.
template <typename Scalar>
std::vector<Frame<Scalar>> make_trajectory(const MeasurementRecord<Scalar>& record,
                                           const MembraneSimplex<Scalar>& membrane,
                                           Index frames_per_stage) {
  if (frames_per_stage < 2)
    throw std::invalid_argument("make_trajectory: frames_per_stage >= 2");
  if (record.on_membrane.point.size() != membrane.vertices.rows() ||
      record.outcome_index < 0 || record.outcome_index >= membrane.dim)
    throw std::invalid_argument("make_trajectory: record does not match membrane");

  const BlochVector<Scalar>& start = record.initial;
  const BlochVector<Scalar>& landed = record.on_membrane.point;
  const BlochVector<Scalar> target = membrane.vertex(record.outcome_index);

  auto lerp = [](const BlochVector<Scalar>& a, const BlochVector<Scalar>& b,
                 Scalar t) -> BlochVector<Scalar> {
    if (t <= Scalar(0)) return a;
    if (t >= Scalar(1)) return b;
    return a + t * (b - a);
  };

  std::vector<Frame<Scalar>> frames;
  frames.reserve(static_cast<std::size_t>(2 * frames_per_stage));

  for (Index i = 0; i < frames_per_stage; ++i) {
    Frame<Scalar> f;
    f.stage = Stage::kPlunge;
    f.t = Scalar(i) / Scalar(frames_per_stage - 1);
    f.particle = lerp(start, landed, f.t);
    f.membrane_state = MembranePhase::kFull;
    f.embedding = embed(f.particle, membrane);
    frames.push_back(std::move(f));
  }
  for (Index i = 0; i < frames_per_stage; ++i) {
    Frame<Scalar> f;
    f.t = Scalar(i) / Scalar(frames_per_stage - 1);
    f.particle = lerp(landed, target, f.t);
    if (i == 0) {
      f.stage = Stage::kDisintegration;
      f.membrane_state = MembranePhase::kBreaking;
      f.break_bary = record.break_bary;
    } else {
      f.stage = Stage::kCollapse;
      f.membrane_state = MembranePhase::kContracted;
    }
    f.embedding = embed(f.particle, membrane);
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace ebr
