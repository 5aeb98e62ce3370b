#pragma once

// The extended DASH manifest: each Representation carries the QEC in
// degrees ("theta,phi") and an EssentialProperty with scheme
// urn:mpeg:dash:vrd:2017 whose value is "<sourceId>,<projectionCode>".

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vas/layout.hpp"
#include "vas/quality.hpp"

namespace vas {

inline constexpr const char* kVrdScheme = "urn:mpeg:dash:vrd:2017";

struct ManifestRepresentation {
  std::string id;
  double qec_theta_deg = 0.0;  // [0, 360)
  double qec_phi_deg = 0.0;    // [-90, 90]
  long long bandwidth = 0;
  int width = 0;
  int height = 0;
  std::string frame_rate;
  std::string source_id = "0";
  int projection_code = 0;
  int timescale = 1000;
  long long duration = 0;  // in timescale units
  std::vector<std::string> segment_urls;

  /// False when the projection code names no supported layout.
  bool usable = true;
  std::string unusable_reason;

  std::optional<LayoutKind> layout() const { return layout_from_projection_code(projection_code); }
  SphericalCoord qec() const { return SphericalCoord::from_degrees(qec_theta_deg, qec_phi_deg); }
};

struct ManifestDoc {
  std::vector<ManifestRepresentation> representations;
};

/// One Representation per catalog entry, in catalog order. Segment URLs
/// point at rep_<qecIdx>_<level>/seg_<idx>.
ManifestDoc manifest_from_catalog(const Catalog& catalog, const std::string& source_id = "0");

/// Canonical serialization. Throws InvalidArgument for an empty or invalid document.
std::string write_manifest(const ManifestDoc& doc);
std::string write_manifest(const Catalog& catalog, const std::string& source_id = "0");

/// Throws ParseError on malformed XML or missing attributes and OutOfRange
/// for a QEC outside [0,360) x [-90,90]. An unknown projection code only
/// marks that representation unusable.
ManifestDoc parse_manifest(const std::string& xml);
ManifestDoc read_manifest(const std::filesystem::path& path);

/// "%.6f" with trailing zeros (and a trailing point) removed.
std::string format_degrees(double deg);

}  // namespace vas
