#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lindblad/model.hpp"
#include "lindblad/numerics.hpp"
#include "lindblad/types.hpp"

namespace lindblad {

enum class PointTag { NHE, JUMP, EIG };

std::string tag_name(PointTag t);
PointTag parse_tag(const std::string& s);

struct CloudPoint {
  cd z;
  PointTag tag = PointTag::NHE;
  double q = 0;
  double theta = NAN;  // NaN when not applicable
};

struct SpectrumCloud {
  std::vector<CloudPoint> points;
  int failures = 0;  // per-q solver failures (jump curve only)

  Points values() const;
  void append(const SpectrumCloud& other);
  // by q, then theta, then root order; stable
  void sort();
};

SpectrumCloud nhe_spectrum(const LindbladModel& m, int nQ, int nTheta);

// g(z) = <gammaR|(T(q)-z)^{-1}|gammaL> + 1 for rank-one fibers
cd secular_value(const FiberOperator& f, cd z);
// det(1 + F (T(q)-z)^{-1}) restricted to the jump window; equals secular_value when rank one
cd secular_determinant(const FiberOperator& f, cd z);

struct JumpOptions {
  bool refine = true;       // bisect q between grid points where the roots move too far
  double maxStep = 2e-3;    // target spacing of consecutive roots
  int maxDepth = 44;
  int maxExtraPerInterval = 400;
};

// valid secular roots of one fiber; extraSeeds feed the Newton path
Points jump_roots(const LindbladModel& m, double q, const Points& extraSeeds = {});

SpectrumCloud jump_curve(const LindbladModel& m, int nQ, const JumpOptions& opt = {});

// both parts, NHE first
SpectrumCloud full_spectrum(const LindbladModel& m, int nQ, int nTheta, const JumpOptions& opt = {});

struct Component {
  enum class Kind { Segment, Rectangle, Polygon, Curve };
  Kind kind = Kind::Segment;
  Points vertices;  // segment: 2 ends, rectangle: 2 opposite corners, polygon: convex, counterclockwise
  Points curve;     // dense samples for Curve
  double curveTol = 0;

  bool contains(cd z, double tol) const;
  Points sample(double spacing) const;
};

struct ClosedFormSpectrum {
  std::vector<Component> components;

  bool contains(cd z, double tol = 1e-9) const;
  Points sample(double spacing) const;
};

ClosedFormSpectrum closed_form_spectrum(const BuiltinTag& tag, double G);

// v_k = <k|(T(q)-z)^{-1}|gammaL> for k in [-kMax, kMax]
VectorXcd jump_eigenvector(const FiberOperator& f, cd z, int kMax);

struct GapReport {
  double supRe = 0;
  int nearZeroCount = 0;
};

GapReport gap_report(const SpectrumCloud& cloud, double exclusionRadius);

}  // namespace lindblad
