#pragma once

// Client-side adaptation: at every segment boundary pick the QEC closest
// to the FoV center and the highest level whose bandwidth fits the
// predicted throughput.

#include <memory>
#include <vector>

#include "vas/quality.hpp"
#include "vas/sphere.hpp"
#include "vas/trace.hpp"

namespace vas {

struct Selection {
  int representation_id = 0;  // qec_index * levels + level
  int qec_index = 0;
  int level = 1;              // 1-based
  double distance = 0.0;      // FoV center to the chosen QEC at decision time
};

/// `level_bandwidths` ascending by level. Falls back to level 1 when
/// nothing fits.
Selection select_representation(const std::vector<UnitVector>& qecs, const std::vector<long long>& level_bandwidths,
                                const UnitVector& fov_center, double predicted_bps);

class BandwidthPredictor {
 public:
  virtual ~BandwidthPredictor() = default;
  /// Throughput estimate for a decision taken at time t.
  virtual double predict(const BandwidthSeries& observed, double t) const = 0;
};

/// Last observed value at decision time.
class LastValuePredictor : public BandwidthPredictor {
 public:
  double predict(const BandwidthSeries& observed, double t) const override { return observed.at(t); }
};

struct SessionConfig {
  double segment_seconds = 2.0;
  std::vector<UnitVector> qecs;
  std::vector<long long> level_bandwidths;
  HeadTrace trace;
  BandwidthSeries bandwidth = BandwidthSeries::constant(1e12);
  double frame_rate = 30.0;
  /// Seconds to simulate from the trace start; 0 means the whole trace.
  double duration = 0.0;
  std::shared_ptr<const BandwidthPredictor> predictor;  // null = last value

  static SessionConfig from_catalog(const Catalog& catalog, const HeadTrace& trace, double segment_seconds);
};

struct SessionLog {
  struct Segment {
    int index = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    double predicted_bps = 0.0;
    UnitVector fov_at_decision;
    Selection selection;
  };
  struct Frame {
    int index = 0;
    double t = 0.0;
    int segment = 0;
    UnitVector fov_center;
    double roll = 0.0;
    double distance = 0.0;  // to the active QEC
  };
  std::vector<Segment> segments;
  std::vector<Frame> frames;

  std::string segments_csv() const;
  std::string frames_csv() const;
};

/// Throws OutOfRange when the trace is shorter than the session.
SessionLog simulate_session(const SessionConfig& cfg);

}  // namespace vas
