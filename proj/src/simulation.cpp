#include "vas/simulation.hpp"

#include <cmath>

#include "vas/error.hpp"
#include "vas/thomson.hpp"

namespace vas {

Selection select_representation(const std::vector<UnitVector>& qecs, const std::vector<long long>& level_bandwidths,
                                const UnitVector& fov_center, double predicted_bps) {
  if (qecs.empty() || level_bandwidths.empty()) throw InvalidArgument("select_representation needs a nonempty catalog");
  Selection s;
  s.qec_index = nearest_qec(fov_center, qecs);
  s.distance = orthodromic_distance(fov_center, qecs[static_cast<std::size_t>(s.qec_index)]);
  int level = 0;
  long long best = -1;
  for (std::size_t i = 0; i < level_bandwidths.size(); ++i) {
    const long long bw = level_bandwidths[i];
    if (static_cast<double>(bw) <= predicted_bps && bw > best) {
      best = bw;
      level = static_cast<int>(i);
    }
  }
  s.level = level + 1;
  s.representation_id = s.qec_index * static_cast<int>(level_bandwidths.size()) + s.level;
  return s;
}

SessionConfig SessionConfig::from_catalog(const Catalog& catalog, const HeadTrace& trace, double segment_seconds) {
  SessionConfig cfg;
  cfg.segment_seconds = segment_seconds;
  for (const auto& q : catalog.qecs) cfg.qecs.push_back(sph_to_vec(q));
  cfg.level_bandwidths = catalog.level_bandwidths();
  cfg.trace = trace;
  cfg.frame_rate = catalog.fps;
  return cfg;
}

SessionLog simulate_session(const SessionConfig& cfg) {
  if (!(cfg.segment_seconds > 0.0)) throw InvalidArgument("segment length must be positive");
  if (!(cfg.frame_rate > 0.0)) throw InvalidArgument("frame rate must be positive");
  cfg.trace.validate();
  const double duration = cfg.duration > 0.0 ? cfg.duration : cfg.trace.duration();
  if (duration > cfg.trace.duration() + 1e-9) {
    throw OutOfRange("trace lasts " + format_shortest(cfg.trace.duration()) + " s, shorter than the " +
                     format_shortest(duration) + " s session");
  }
  const LastValuePredictor last_value;
  const BandwidthPredictor& predictor = cfg.predictor ? *cfg.predictor : last_value;
  const double t0 = cfg.trace.start();
  const double t_end = std::min(t0 + duration, cfg.trace.end());

  SessionLog log;
  const int segments = std::max(1, static_cast<int>(std::ceil(duration / cfg.segment_seconds - 1e-9)));
  for (int k = 0; k < segments; ++k) {
    SessionLog::Segment seg;
    seg.index = k;
    seg.t_start = t0 + k * cfg.segment_seconds;
    seg.t_end = std::min(t0 + (k + 1) * cfg.segment_seconds, t0 + duration);
    seg.fov_at_decision = cfg.trace.fov_center(std::min(seg.t_start, t_end));
    seg.predicted_bps = predictor.predict(cfg.bandwidth, seg.t_start);
    seg.selection = select_representation(cfg.qecs, cfg.level_bandwidths, seg.fov_at_decision, seg.predicted_bps);
    log.segments.push_back(seg);
  }
  const int frames = std::max(1, static_cast<int>(std::ceil(duration * cfg.frame_rate - 1e-9)));
  for (int f = 0; f < frames; ++f) {
    SessionLog::Frame fr;
    fr.index = f;
    fr.t = std::min(t0 + f / cfg.frame_rate, t_end);
    fr.segment = std::min(segments - 1, static_cast<int>(std::floor(f / (cfg.segment_seconds * cfg.frame_rate) + 1e-9)));
    fr.fov_center = cfg.trace.fov_center(fr.t);
    fr.roll = cfg.trace.roll_at(fr.t);
    const int q = log.segments[static_cast<std::size_t>(fr.segment)].selection.qec_index;
    fr.distance = orthodromic_distance(fr.fov_center, cfg.qecs[static_cast<std::size_t>(q)]);
    log.frames.push_back(fr);
  }
  return log;
}

std::string SessionLog::segments_csv() const {
  std::string out = "segment,t_start,t_end,representation_id,qec_index,level,predicted_bps,decision_distance\n";
  for (const auto& s : segments) {
    out += std::to_string(s.index) + ',' + format_shortest(s.t_start) + ',' + format_shortest(s.t_end) + ',' +
           std::to_string(s.selection.representation_id) + ',' + std::to_string(s.selection.qec_index) + ',' +
           std::to_string(s.selection.level) + ',' + format_shortest(s.predicted_bps) + ',' +
           format_shortest(s.selection.distance) + '\n';
  }
  return out;
}

std::string SessionLog::frames_csv() const {
  std::string out = "frame,t,segment,fov_theta,fov_phi,distance\n";
  for (const auto& f : frames) {
    const SphericalCoord c = vec_to_sph(f.fov_center);
    out += std::to_string(f.index) + ',' + format_shortest(f.t) + ',' + std::to_string(f.segment) + ',' +
           format_shortest(c.theta()) + ',' + format_shortest(c.phi()) + ',' + format_shortest(f.distance) + '\n';
  }
  return out;
}

}  // namespace vas
