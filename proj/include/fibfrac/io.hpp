#pragma once

// Serialization: words (text / packed binary), point CSV, SVG, JSON reports,
// and atomic file output.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fibfrac/analysis.hpp"
#include "fibfrac/box_count.hpp"
#include "fibfrac/error.hpp"
#include "fibfrac/geometry.hpp"
#include "fibfrac/ifs.hpp"
#include "fibfrac/turtle.hpp"
#include "fibfrac/words.hpp"

namespace fibfrac {

/// %.17g; non-finite values print as inf / -inf / nan.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes `data` to a sibling temp file, then renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path.string());
  }
}

// --- words ---------------------------------------------------------------------

inline std::string word_text(const Word& w) { return w.to_string() + "\n"; }

/// 8-byte little-endian symbol count, then the symbols packed LSB-first.
inline std::string word_binary(const Word& w) {
  std::string out;
  const std::uint64_t n = w.size();
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((n >> (8 * b)) & 0xff));
  const std::size_t bytes = (n + 7) / 8;
  const auto& limbs = w.limbs();
  for (std::size_t k = 0; k < bytes; ++k)
    out.push_back(static_cast<char>((limbs[k / 8] >> (8 * (k % 8))) & 0xff));
  return out;
}

inline Word word_from_binary(std::string_view data) {
  if (data.size() < 8) throw DomainError("binary word: truncated header");
  std::uint64_t n = 0;
  for (int b = 0; b < 8; ++b) n |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[b])) << (8 * b);
  if ((data.size() - 8) != (n + 7) / 8) throw DomainError("binary word: payload size mismatch");
  Word w;
  for (std::uint64_t k = 0; k < n; ++k)
    w.push_back((static_cast<unsigned char>(data[8 + k / 8]) >> (k % 8)) & 1);
  return w;
}

// --- points ----------------------------------------------------------------------

inline std::string points_csv(std::span<const Vec2> pts) {
  std::string out;
  out.reserve(pts.size() * 44);
  for (Vec2 p : pts) {
    out += format_real(p.x);
    out += ',';
    out += format_real(p.y);
    out += '\n';
  }
  return out;
}

struct SvgStyle {
  double stroke_width = 0.0;  // 0: 0.5% of the viewBox width
  bool show_box = false;
  std::string stroke = "#1f3a93";
  std::string box_stroke = "#c0392b";
};

/// Single-path SVG; y is flipped so that "up" in the drawing is up on screen.
inline std::string polyline_svg(std::span<const Vec2> pts, const SvgStyle& style = {},
                                const OrientedBox* box = nullptr) {
  detail::require(!pts.empty(), "nothing to draw");
  Bounds b = bounds_of(pts);
  if (box)
    for (Vec2 c : box->corners()) b.add(c);
  double w = b.hi.x - b.lo.x, h = b.hi.y - b.lo.y;
  const double span = std::max({w, h, 1e-12});
  const double margin = 0.02 * span;
  const double vx = b.lo.x - margin, vy = -b.hi.y - margin;
  w += 2 * margin;
  h += 2 * margin;
  const double stroke = style.stroke_width > 0 ? style.stroke_width : 0.005 * w;

  std::string out;
  out.reserve(pts.size() * 40 + 512);
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + format_real(vx) + " " +
         format_real(vy) + " " + format_real(w) + " " + format_real(h) + "\">\n";
  out += "<path fill=\"none\" stroke=\"" + style.stroke + "\" stroke-width=\"" + format_real(stroke) +
         "\" stroke-linejoin=\"round\" d=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out += k == 0 ? "M" : " L";
    out += format_real(pts[k].x);
    out += ' ';
    out += format_real(-pts[k].y);
  }
  out += "\"/>\n";
  if (box && style.show_box) {
    out += "<polygon fill=\"none\" stroke=\"" + style.box_stroke + "\" stroke-width=\"" + format_real(stroke) +
           "\" points=\"";
    const auto c = box->corners();
    for (std::size_t k = 0; k < 4; ++k) {
      if (k) out += ' ';
      out += format_real(c[k].x) + "," + format_real(-c[k].y);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

/// Point cloud as one path of zero-length round-capped strokes (dots).
inline std::string points_svg(std::span<const Vec2> pts, double dot = 0.0) {
  detail::require(!pts.empty(), "nothing to draw");
  const Bounds b = bounds_of(pts);
  const double span = std::max({b.hi.x - b.lo.x, b.hi.y - b.lo.y, 1e-12});
  const double margin = 0.02 * span;
  const double w = b.hi.x - b.lo.x + 2 * margin, h = b.hi.y - b.lo.y + 2 * margin;
  const double size = dot > 0 ? dot : 0.002 * w;
  std::string out;
  out.reserve(pts.size() * 44 + 512);
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + format_real(b.lo.x - margin) + " " +
         format_real(-b.hi.y - margin) + " " + format_real(w) + " " + format_real(h) + "\">\n";
  out += "<path fill=\"none\" stroke=\"#1f3a93\" stroke-linecap=\"round\" stroke-width=\"" + format_real(size) +
         "\" d=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) out += ' ';
    out += 'M';
    out += format_real(pts[k].x);
    out += ' ';
    out += format_real(-pts[k].y);
    out += "h0";
  }
  out += "\"/>\n</svg>\n";
  return out;
}

// --- JSON ----------------------------------------------------------------------

/// Minimal streaming JSON writer; numbers use %.17g, non-finite values are
/// written as strings.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view k) {
    separate();
    quote(k);
    out_ += ':';
    after_key_ = true;
    return *this;
  }
  JsonWriter& value(double v) {
    separate();
    if (std::isfinite(v))
      out_ += format_real(v);
    else
      quote(format_real(v));
    return *this;
  }
  JsonWriter& value(int v) { return raw(std::to_string(v)); }
  JsonWriter& value(long v) { return raw(std::to_string(v)); }
  JsonWriter& value(long long v) { return raw(std::to_string(v)); }
  JsonWriter& value(unsigned long v) { return raw(std::to_string(v)); }
  JsonWriter& value(unsigned long long v) { return raw(std::to_string(v)); }
  JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
  JsonWriter& value(std::string_view s) {
    separate();
    quote(s);
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  template <class T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }

  std::string str() const { return out_ + "\n"; }

 private:
  JsonWriter& raw(const std::string& s) {
    separate();
    out_ += s;
    return *this;
  }
  JsonWriter& open(char c) {
    separate();
    out_ += c;
    first_.push_back(true);
    return *this;
  }
  JsonWriter& close(char c) {
    out_ += c;
    first_.pop_back();
    return *this;
  }
  void separate() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (!first_.empty()) {
      if (!first_.back()) out_ += ',';
      first_.back() = false;
    }
  }
  void quote(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      if (c == '"' || c == '\\') {
        out_ += '\\';
        out_ += c;
      } else if (static_cast<unsigned char>(c) < 0x20) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\u%04x", c);
        out_ += buf;
      } else {
        out_ += c;
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

inline void write_similarity(JsonWriter& j, const Similarity& s) {
  j.begin_object()
      .field("scale", s.scale)
      .field("rotation", s.rotation)
      .field("reflect", s.reflect)
      .field("tx", s.translation.x)
      .field("ty", s.translation.y)
      .end_object();
}

inline std::string ifs_json(const Ifs& f) {
  JsonWriter j;
  j.begin_object().field("alpha", f.alpha).field("parity", f.odd() ? "odd" : "even").field("i", f.i);
  j.field("n_ref", f.n_ref).field("ratio", f.ratio);
  j.key("chord").begin_array().value(f.chord.x).value(f.chord.y).end_array();
  j.field("class_reflect", f.class_reflect).field("closure_residual", f.closure_residual);
  j.field("landmark_residual", f.landmark_residual);
  j.key("maps").begin_array();
  for (const auto& m : f.maps) write_similarity(j, m);
  j.end_array().end_object();
  return j.str();
}

// --- tables ----------------------------------------------------------------------

inline std::string dim_table_csv(std::span<const double> alphas) {
  std::string out = "alpha,R,r_plus,aspect_limit,dimension\n";
  for (double a : alphas) {
    const ScalingProfile p = scaling_profile(a);
    out += format_real(a) + "," + format_real(p.ratio) + "," + format_real(p.r_plus) + "," + format_real(p.aspect) +
           "," + format_real(p.dimension) + "\n";
  }
  return out;
}

inline std::string dimension_report_json(const DimensionReport& r) {
  JsonWriter j;
  j.begin_object()
      .field("alpha", r.alpha)
      .field("analytic_s", r.analytic_s)
      .field("boxcount_s", r.boxcount_s)
      .field("fit_r2", r.fit_r2);
  j.key("table").begin_array();
  for (std::size_t k = 0; k < r.scales.size(); ++k)
    j.begin_object().field("eps", r.scales[k]).field("N", r.counts[k]).end_object();
  j.end_array().end_object();
  return j.str();
}

inline std::string dimension_report_csv(const DimensionReport& r) {
  std::string out = "eps,N\n";
  for (std::size_t k = 0; k < r.scales.size(); ++k) out += format_real(r.scales[k]) + "," + format_real(r.counts[k]) + "\n";
  return out;
}

inline std::string stats_json(const CurveStats& s, const CurveMeta& m, std::size_t vertices) {
  JsonWriter j;
  j.begin_object()
      .field("i", m.i)
      .field("n", m.n)
      .field("alpha", m.alpha)
      .field("vertices", static_cast<unsigned long long>(vertices))
      .field("width", s.width)
      .field("height", s.height)
      .field("aspect", s.aspect)
      .field("net_angle", s.net_angle)
      .field("net_turns", static_cast<long long>(m.final_turns))
      .end_object();
  return j.str();
}

inline std::string stats_csv(const CurveStats& s, const CurveMeta& m, std::size_t vertices) {
  return "i,n,alpha,vertices,width,height,aspect,net_angle\n" + std::to_string(m.i) + "," + std::to_string(m.n) +
         "," + format_real(m.alpha) + "," + std::to_string(vertices) + "," + format_real(s.width) + "," +
         format_real(s.height) + "," + format_real(s.aspect) + "," + format_real(s.net_angle) + "\n";
}

}  // namespace fibfrac
