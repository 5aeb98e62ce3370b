#include "vas/manifest.hpp"

#include <expat.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vas/error.hpp"

namespace vas {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string format_rate(double fps) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), fps);
  return std::string(buf, end);
}

void validate(const ManifestRepresentation& r) {
  if (r.id.empty()) throw InvalidArgument("manifest representation needs an id");
  if (!(r.qec_theta_deg >= 0.0 && r.qec_theta_deg < 360.0) || !(r.qec_phi_deg >= -90.0 && r.qec_phi_deg <= 90.0)) {
    throw OutOfRange("representation " + r.id + ": qec out of range");
  }
  if (r.bandwidth <= 0) throw InvalidArgument("representation " + r.id + ": bandwidth must be positive");
  if (r.width <= 0 || r.height <= 0) throw InvalidArgument("representation " + r.id + ": bad dimensions");
  if (r.timescale <= 0 || r.duration <= 0) throw InvalidArgument("representation " + r.id + ": bad segment timing");
  if (r.source_id.find(',') != std::string::npos) throw InvalidArgument("source id must not contain a comma");
}

}  // namespace

std::string format_degrees(double deg) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", deg);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

ManifestDoc manifest_from_catalog(const Catalog& catalog, const std::string& source_id) {
  if (catalog.representations.empty()) throw InvalidArgument("cannot write a manifest for an empty catalog");
  ManifestDoc doc;
  for (const auto& rep : catalog.representations) {
    ManifestRepresentation m;
    m.id = std::to_string(rep.id);
    m.qec_theta_deg = round_degrees(rad_to_deg(rep.qec.theta()));
    if (m.qec_theta_deg >= 360.0) m.qec_theta_deg = 0.0;
    m.qec_phi_deg = round_degrees(rad_to_deg(rep.qec.phi()));
    m.bandwidth = rep.bandwidth;
    m.width = rep.width;
    m.height = rep.height;
    m.frame_rate = format_rate(catalog.fps);
    m.source_id = source_id;
    m.projection_code = projection_code(catalog.layout);
    m.duration = std::llround(catalog.segment_seconds * 1000.0);
    for (int s = 0; s < catalog.segment_count; ++s) m.segment_urls.push_back(rep.path + "/seg_" + std::to_string(s));
    doc.representations.push_back(std::move(m));
  }
  return doc;
}

std::string write_manifest(const ManifestDoc& doc) {
  if (doc.representations.empty()) throw InvalidArgument("cannot write a manifest without representations");
  std::set<std::string> ids;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<MPD>\n  <AdaptationSet>\n";
  for (const auto& r : doc.representations) {
    validate(r);
    if (!ids.insert(r.id).second) throw InvalidArgument("duplicate representation id " + r.id);
    os << "    <Representation id=\"" << xml_escape(r.id) << "\" qec=\"" << format_degrees(r.qec_theta_deg) << ','
       << format_degrees(r.qec_phi_deg) << "\" bandwidth=\"" << r.bandwidth << "\" width=\"" << r.width
       << "\" height=\"" << r.height << "\" frameRate=\"" << xml_escape(r.frame_rate) << "\">\n";
    os << "      <EssentialProperty schemeIdUri=\"" << kVrdScheme << "\" value=\"" << xml_escape(r.source_id) << ','
       << r.projection_code << "\"/>\n";
    os << "      <SegmentList timescale=\"" << r.timescale << "\" duration=\"" << r.duration << '"';
    if (r.segment_urls.empty()) {
      os << "/>\n";
    } else {
      os << ">\n";
      for (const auto& u : r.segment_urls) os << "        <SegmentURL media=\"" << xml_escape(u) << "\"/>\n";
      os << "      </SegmentList>\n";
    }
    os << "    </Representation>\n";
  }
  os << "  </AdaptationSet>\n</MPD>\n";
  return os.str();
}

std::string write_manifest(const Catalog& catalog, const std::string& source_id) {
  return write_manifest(manifest_from_catalog(catalog, source_id));
}

namespace {

struct ParseState {
  XML_Parser parser = nullptr;
  ManifestDoc doc;
  ManifestRepresentation* current = nullptr;
  bool in_segment_list = false;
  bool have_property = false;
  bool have_segment_list = false;
  std::string error_kind;  // "parse" or "range"
  std::string error;
  int error_line = 0;

  void fail(const std::string& kind, const std::string& msg) {
    if (!error.empty()) return;
    error_kind = kind;
    error = msg;
    error_line = static_cast<int>(XML_GetCurrentLineNumber(parser));
    XML_StopParser(parser, XML_FALSE);
  }
};

std::map<std::string, std::string> attributes(const XML_Char** atts) {
  std::map<std::string, std::string> out;
  for (int i = 0; atts[i]; i += 2) out[atts[i]] = atts[i + 1];
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  if (b < e && *b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && b != e;
}

void start_representation(ParseState& st, const std::map<std::string, std::string>& a) {
  ManifestRepresentation r;
  const auto need = [&](const char* key) -> const std::string* {
    const auto it = a.find(key);
    if (it == a.end()) {
      st.fail("parse", std::string("Representation is missing the ") + key + " attribute");
      return nullptr;
    }
    return &it->second;
  };
  const std::string* id = need("id");
  const std::string* qec = need("qec");
  const std::string* bw = need("bandwidth");
  const std::string* w = need("width");
  const std::string* h = need("height");
  if (!id || !qec || !bw || !w || !h) return;
  r.id = *id;
  const auto comma = qec->find(',');
  if (comma == std::string::npos || !parse_number(qec->substr(0, comma), r.qec_theta_deg) ||
      !parse_number(qec->substr(comma + 1), r.qec_phi_deg)) {
    st.fail("parse", "representation " + r.id + ": qec must be \"theta,phi\" in degrees, got \"" + *qec + "\"");
    return;
  }
  if (!(r.qec_theta_deg >= 0.0 && r.qec_theta_deg < 360.0) || !(r.qec_phi_deg >= -90.0 && r.qec_phi_deg <= 90.0)) {
    st.fail("range", "representation " + r.id + ": qec \"" + *qec + "\" outside [0,360) x [-90,90]");
    return;
  }
  if (!parse_number(*bw, r.bandwidth) || r.bandwidth <= 0) {
    st.fail("parse", "representation " + r.id + ": bandwidth must be a positive integer");
    return;
  }
  if (!parse_number(*w, r.width) || !parse_number(*h, r.height) || r.width <= 0 || r.height <= 0) {
    st.fail("parse", "representation " + r.id + ": width and height must be positive integers");
    return;
  }
  if (const auto it = a.find("frameRate"); it != a.end()) r.frame_rate = it->second;
  for (const auto& prev : st.doc.representations) {
    if (prev.id == r.id) {
      st.fail("parse", "duplicate representation id " + r.id);
      return;
    }
  }
  r.duration = 0;
  st.doc.representations.push_back(std::move(r));
  st.current = &st.doc.representations.back();
  st.have_property = false;
  st.have_segment_list = false;
}

void start_property(ParseState& st, const std::map<std::string, std::string>& a) {
  const auto scheme = a.find("schemeIdUri");
  if (scheme == a.end() || scheme->second != kVrdScheme) return;
  const auto value = a.find("value");
  ManifestRepresentation& r = *st.current;
  const std::string v = value == a.end() ? "" : value->second;
  const auto comma = v.find(',');
  int code = 0;
  if (comma == std::string::npos || !parse_number(v.substr(comma + 1), code)) {
    st.fail("parse", "representation " + r.id + ": EssentialProperty value must be \"sourceId,projectionCode\"");
    return;
  }
  r.source_id = v.substr(0, comma);
  r.projection_code = code;
  st.have_property = true;
  if (!layout_from_projection_code(code)) {
    r.usable = false;
    r.unusable_reason = "unknown projection code " + std::to_string(code);
  }
}

void start_segment_list(ParseState& st, const std::map<std::string, std::string>& a) {
  ManifestRepresentation& r = *st.current;
  if (const auto it = a.find("timescale"); it != a.end()) {
    if (!parse_number(it->second, r.timescale) || r.timescale <= 0) {
      st.fail("parse", "representation " + r.id + ": bad SegmentList timescale");
      return;
    }
  } else {
    r.timescale = 1;
  }
  const auto d = a.find("duration");
  if (d == a.end() || !parse_number(d->second, r.duration) || r.duration <= 0) {
    st.fail("parse", "representation " + r.id + ": SegmentList needs a positive duration");
    return;
  }
  st.in_segment_list = true;
  st.have_segment_list = true;
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto& st = *static_cast<ParseState*>(data);
  const auto a = attributes(atts);
  if (std::strcmp(name, "Representation") == 0) {
    if (st.current) {
      st.fail("parse", "nested Representation elements");
      return;
    }
    start_representation(st, a);
  } else if (!st.current) {
    return;
  } else if (std::strcmp(name, "EssentialProperty") == 0) {
    start_property(st, a);
  } else if (std::strcmp(name, "SegmentList") == 0) {
    start_segment_list(st, a);
  } else if (std::strcmp(name, "SegmentURL") == 0 && st.in_segment_list) {
    if (const auto it = a.find("media"); it != a.end()) st.current->segment_urls.push_back(it->second);
  }
}

void XMLCALL on_end(void* data, const XML_Char* name) {
  auto& st = *static_cast<ParseState*>(data);
  if (std::strcmp(name, "SegmentList") == 0) {
    st.in_segment_list = false;
  } else if (std::strcmp(name, "Representation") == 0 && st.current) {
    if (!st.have_property) {
      st.fail("parse", "representation " + st.current->id + " has no " + kVrdScheme + " EssentialProperty");
      return;
    }
    if (!st.have_segment_list) {
      st.fail("parse", "representation " + st.current->id + " has no SegmentList");
      return;
    }
    st.current = nullptr;
  }
}

}  // namespace

ManifestDoc parse_manifest(const std::string& xml) {
  ParseState st;
  XML_Parser parser = XML_ParserCreate(nullptr);
  if (!parser) throw Error("internal", "cannot create XML parser");
  st.parser = parser;
  XML_SetUserData(parser, &st);
  XML_SetElementHandler(parser, on_start, on_end);
  const auto status = XML_Parse(parser, xml.data(), static_cast<int>(xml.size()), XML_TRUE);
  std::string xml_error;
  int line = 0;
  if (status == XML_STATUS_ERROR && st.error.empty()) {
    xml_error = XML_ErrorString(XML_GetErrorCode(parser));
    line = static_cast<int>(XML_GetCurrentLineNumber(parser));
  }
  XML_ParserFree(parser);
  if (!st.error.empty()) {
    if (st.error_kind == "range") throw OutOfRange(st.error + " (line " + std::to_string(st.error_line) + ")");
    throw ParseError(st.error, st.error_line);
  }
  if (!xml_error.empty()) throw ParseError("malformed manifest XML: " + xml_error, line);
  if (st.doc.representations.empty()) throw ParseError("manifest has no Representation elements");
  return std::move(st.doc);
}

ManifestDoc read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_manifest(ss.str());
}

}  // namespace vas
