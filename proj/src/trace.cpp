#include "vas/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vas/error.hpp"
#include "vas/random.hpp"

namespace vas {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<double> parse_row(const std::string& line, std::size_t fields, int line_no) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double v = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    while (b < e && *b == ' ') ++b;
    while (e > b && e[-1] == ' ') --e;
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || b == e || !std::isfinite(v)) {
      throw ParseError("bad number \"" + cell + "\"", line_no);
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.size() != fields) {
    throw ParseError("expected " + std::to_string(fields) + " fields, got " + std::to_string(out.size()), line_no);
  }
  return out;
}

}  // namespace

std::string format_shortest(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

UnitVector orientation_center(double yaw, double pitch) {
  // Rz(yaw) * Ry(pitch) applied to the front axis
  return UnitVector(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), -std::sin(pitch));
}

void HeadTrace::validate() const {
  if (samples.size() < 2) throw InvalidArgument("a head trace needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.yaw) || !std::isfinite(s.pitch) || !std::isfinite(s.roll)) {
      throw InvalidArgument("trace sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(s.t > samples[i - 1].t)) {
      throw InvalidArgument("trace timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
    }
  }
}

namespace {

// Index i with samples[i].t <= t < samples[i+1].t (the last interval is closed).
std::size_t bracket(const HeadTrace& tr, double t) {
  if (tr.samples.size() < 2) throw InvalidArgument("a head trace needs at least two samples");
  if (!(t >= tr.start() && t <= tr.end())) {
    throw OutOfRange("time " + format_shortest(t) + " is outside the trace [" + format_shortest(tr.start()) + ", " +
                     format_shortest(tr.end()) + "]");
  }
  const auto it = std::upper_bound(tr.samples.begin(), tr.samples.end(), t,
                                   [](double v, const TraceSample& s) { return v < s.t; });
  const auto i = static_cast<std::size_t>(it - tr.samples.begin());
  return std::min(i == 0 ? 0 : i - 1, tr.samples.size() - 2);
}

}  // namespace

UnitVector HeadTrace::fov_center(double t) const {
  const std::size_t i = bracket(*this, t);
  const TraceSample& a = samples[i];
  const TraceSample& b = samples[i + 1];
  if (t == a.t) return orientation_center(a.yaw, a.pitch);
  if (t == b.t) return orientation_center(b.yaw, b.pitch);
  return slerp(orientation_center(a.yaw, a.pitch), orientation_center(b.yaw, b.pitch), (t - a.t) / (b.t - a.t));
}

double HeadTrace::roll_at(double t) const {
  const std::size_t i = bracket(*this, t);
  const TraceSample& a = samples[i];
  const TraceSample& b = samples[i + 1];
  return a.roll + (b.roll - a.roll) * (t - a.t) / (b.t - a.t);
}

HeadTrace parse_trace_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "t,yaw,pitch,roll") throw ParseError("trace header must be \"t,yaw,pitch,roll\"", 1);
  HeadTrace tr;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const int line_no = static_cast<int>(i + 1);
    const auto v = parse_row(lines[i], 4, line_no);
    if (!tr.samples.empty() && !(v[0] > tr.samples.back().t)) {
      throw ParseError("timestamps must be strictly increasing", line_no);
    }
    tr.samples.push_back({v[0], v[1], v[2], v[3]});
  }
  if (tr.samples.size() < 2) throw ParseError("a head trace needs at least two samples");
  return tr;
}

std::string trace_to_csv(const HeadTrace& trace) {
  std::string out = "t,yaw,pitch,roll\n";
  for (const auto& s : trace.samples) {
    out += format_shortest(s.t) + ',' + format_shortest(s.yaw) + ',' + format_shortest(s.pitch) + ',' +
           format_shortest(s.roll) + '\n';
  }
  return out;
}

HeadTrace load_trace(const std::filesystem::path& path) {
  HeadTrace tr = parse_trace_csv(read_text(path));
  tr.user_id = path.stem().string();
  return tr;
}

void save_trace(const HeadTrace& trace, const std::filesystem::path& path) { write_text(path, trace_to_csv(trace)); }

HeadTrace synth_trace(std::uint64_t seed, double duration, const TraceSynthOptions& opts) {
  if (!(duration > 0.0)) throw InvalidArgument("trace duration must be positive");
  if (!(opts.rate_hz > 0.0)) throw InvalidArgument("trace rate must be positive");
  if (opts.mean_speed < 0.0) throw InvalidArgument("trace speed must be non-negative");
  if (!(opts.speed_smoothing > 0.0 && opts.speed_smoothing <= 1.0)) throw InvalidArgument("speed smoothing must lie in (0, 1]");
  Rng rng(seed);
  const double dt = 1.0 / opts.rate_hz;
  const int steps = static_cast<int>(std::ceil(duration * opts.rate_hz - 1e-9));

  double theta = rng.uniform(0.0, kTwoPi);
  double phi = rng.uniform(-opts.start_elevation, opts.start_elevation);
  double heading = rng.uniform(0.0, kTwoPi);
  double speed = opts.mean_speed > 0.0 ? rng.exponential(opts.mean_speed) : 0.0;

  HeadTrace tr;
  tr.user_id = "synthetic-" + std::to_string(seed);
  tr.samples.reserve(static_cast<std::size_t>(steps) + 1);
  tr.samples.push_back({0.0, theta, -phi, opts.roll});
  for (int i = 1; i <= steps; ++i) {
    if (opts.mean_speed > 0.0) {
      speed += opts.speed_smoothing * (rng.exponential(opts.mean_speed) - speed);
      heading += opts.heading_diffusion * std::sqrt(dt) * rng.normal();
      const UnitVector next = offset_direction(sph_to_vec(SphericalCoord(theta, phi)), speed * dt, heading);
      // vec_to_sph never returns |phi| > pi/2, so only the bound needs folding
      double t2 = vec_to_sph(next).theta();
      double p2 = vec_to_sph(next).phi();
      if (std::abs(p2) > opts.max_elevation) {
        p2 = std::copysign(2.0 * opts.max_elevation - std::abs(p2), p2);
        heading = kPi - heading;
      }
      theta = t2;
      phi = p2;
    }
    tr.samples.push_back({i * dt, theta, -phi, opts.roll});
  }
  return tr;
}

BandwidthSeries::BandwidthSeries(std::vector<Step> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw InvalidArgument("a bandwidth series needs at least one step");
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (!std::isfinite(steps_[i].t) || !(steps_[i].bits_per_second > 0.0) || !std::isfinite(steps_[i].bits_per_second)) {
      throw InvalidArgument("bandwidth step " + std::to_string(i) + " must have a finite time and a positive value");
    }
    if (i > 0 && !(steps_[i].t > steps_[i - 1].t)) throw InvalidArgument("bandwidth steps must be strictly increasing in time");
  }
}

BandwidthSeries BandwidthSeries::constant(double bits_per_second) { return BandwidthSeries({{0.0, bits_per_second}}); }

double BandwidthSeries::at(double t) const {
  if (steps_.empty()) throw InvalidArgument("empty bandwidth series");
  const auto it = std::upper_bound(steps_.begin(), steps_.end(), t, [](double v, const Step& s) { return v < s.t; });
  return it == steps_.begin() ? steps_.front().bits_per_second : std::prev(it)->bits_per_second;
}

BandwidthSeries parse_bandwidth_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "t,bits_per_second") throw ParseError("bandwidth header must be \"t,bits_per_second\"", 1);
  std::vector<BandwidthSeries::Step> steps;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const int line_no = static_cast<int>(i + 1);
    const auto v = parse_row(lines[i], 2, line_no);
    if (!steps.empty() && !(v[0] > steps.back().t)) throw ParseError("timestamps must be strictly increasing", line_no);
    if (!(v[1] > 0.0)) throw ParseError("bits_per_second must be positive", line_no);
    steps.push_back({v[0], v[1]});
  }
  if (steps.empty()) throw ParseError("bandwidth series has no rows");
  return BandwidthSeries(std::move(steps));
}

std::string bandwidth_to_csv(const BandwidthSeries& series) {
  std::string out = "t,bits_per_second\n";
  for (const auto& s : series.steps()) out += format_shortest(s.t) + ',' + format_shortest(s.bits_per_second) + '\n';
  return out;
}

BandwidthSeries load_bandwidth(const std::filesystem::path& path) { return parse_bandwidth_csv(read_text(path)); }
void save_bandwidth(const BandwidthSeries& series, const std::filesystem::path& path) {
  write_text(path, bandwidth_to_csv(series));
}

}  // namespace vas
