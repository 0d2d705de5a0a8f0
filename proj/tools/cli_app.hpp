#pragma once

// fibfrac command-line front end. run() is the whole program; main() only
// forwards to it so that tests can drive the CLI in-process.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "fibfrac/fibfrac.hpp"

namespace fibfrac::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decimal radians or a multiple/fraction of pi: "pi", "pi/2", "2pi/3",
/// "3*pi/4", "0.5*pi".
inline double parse_angle(const std::string& text) {
  static const std::regex pi_form(R"(^\s*(?:([0-9]*\.?[0-9]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$)",
                                  std::regex::icase);
  std::smatch m;
  if (std::regex_match(text, m, pi_form)) {
    const double num = m[1].matched ? std::stod(m[1].str()) : 1.0;
    const double den = m[2].matched ? std::stod(m[2].str()) : 1.0;
    if (den == 0) throw UsageError("angle '" + text + "': division by zero");
    return num * std::numbers::pi / den;
  }
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("cannot parse angle '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw UsageError("cannot parse angle '" + text + "'");
  return v;
}

inline void check_angle_arg(double a) {
  if (!(a >= 0 && a <= std::numbers::pi / 2 + 1e-15))
    throw UsageError("angle must lie in [0, pi/2] (got " + format_real(a) + ")");
}

/// Angle list: comma-separated angles, or "grid:N" for N+1 equally spaced
/// angles over [0, pi/2].
inline std::vector<double> parse_angle_list(const std::string& text) {
  std::vector<double> out;
  if (text.rfind("grid:", 0) == 0) {
    const int n = std::stoi(text.substr(5));
    if (n < 1) throw UsageError("grid needs at least one interval");
    for (int k = 0; k <= n; ++k) out.push_back(k == n ? std::numbers::pi / 2 : std::numbers::pi / 2 * k / n);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_angle(item));
  if (out.empty()) throw UsageError("empty angle list");
  return out;
}

inline TurnParity parse_parity(const std::string& s) {
  if (s == "even-left") return TurnParity::EvenLeft;
  if (s == "odd-left") return TurnParity::OddLeft;
  throw UsageError("turn parity must be even-left or odd-left");
}

inline TurnParity swapped(TurnParity p) {
  return p == TurnParity::EvenLeft ? TurnParity::OddLeft : TurnParity::EvenLeft;
}

struct Sink {
  std::string path;
  std::ostream* out;
  void emit(const std::string& data) const {
    if (path.empty() || path == "-")
      *out << data;
    else
      write_file_atomic(path, data);
  }
};

inline std::string format_from(const std::string& given, const std::string& path, const std::string& fallback) {
  if (!given.empty()) return given;
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext.size() > 1) return ext.substr(1);
  return fallback;
}

// --- verification -------------------------------------------------------------

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct VerifyReport {
  std::string level;
  int i = 2;
  double alpha = 0.0;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  void add(std::string name, bool ok, double value, double tol) { checks.push_back({std::move(name), ok, value, tol}); }

  std::string json() const {
    JsonWriter j;
    j.begin_object().field("level", level).field("i", i).field("alpha", alpha).field("passed", passed());
    j.key("checks").begin_array();
    for (const auto& c : checks)
      j.begin_object()
          .field("name", c.name)
          .field("passed", c.passed)
          .field("value", c.value)
          .field("tolerance", c.tolerance)
          .end_object();
    j.end_array().end_object();
    return j.str();
  }
};

inline void verify_words(VerifyReport& r, int i) {
  bool subst = true;
  for (int fam = 2; fam <= 6; ++fam)
    for (int n = 1; n <= 25; ++n) subst = subst && word_by_substitution(fam, n) == word_concat(fam, n);
  r.add("substitution_equals_concatenation", subst, subst ? 0 : 1, 0);

  bool parts = true, free11 = true;
  for (int fam = 2; fam <= 6; ++fam)
    for (int n = 7; n <= 20; ++n) {
      const Word w = word_concat(fam, n);
      try {
        check_five_partite(w, five_partite(fam, n));
      } catch (const StructureError&) {
        parts = false;
      }
      free11 = free11 && !contains_11(w);
    }
  r.add("five_partite_identity", parts, parts ? 0 : 1, 0);
  r.add("no_factor_11", free11, free11 ? 0 : 1, 0);

  bool prefix = true;
  for (int n = 2; n <= 20; ++n)
    prefix = prefix && two_adic_distance(word_concat(i, n), word_concat(i, n + 1)) <=
                           std::ldexp(1.0, -static_cast<int>(fib_length(i, n)));
  r.add("prefix_cauchy", prefix, prefix ? 0 : 1, 0);
}

inline void verify_curve(VerifyReport& r, int i, double alpha, TurnParity parity) {
  // sub-curves 1 and 2 of F_n are similar copies of F_{n-3}
  double worst = 0;
  for (int n = 8; n <= 20; ++n) {
    const Subcurves s = subcurves(i, n, alpha, 1.0, parity);
    const Polyline small = draw_fibonacci(i, n - 3, alpha, 1.0, parity);
    const double diam = bounds_of(s.whole.points).diameter();
    for (int part : {0, 1}) {
      try {
        worst = std::max(worst, fit_similarity(small.points, s.parts[part].points).residual / diam);
      } catch (const DegenerateError&) {
        // straight curves (alpha = 0) are trivially similar
      }
    }
  }
  r.add("subcurve_similarity_residual", worst < 1e-9, worst, 1e-9);

  double seg = 0;
  const Polyline p = draw_fibonacci(i, 16, alpha, 1.0, parity);
  for (std::size_t k = 1; k < p.points.size(); ++k)
    seg = std::max(seg, std::abs(norm(p.points[k] - p.points[k - 1]) - 1.0) / std::max(1.0, norm(p.points[k])));
  r.add("unit_segments", seg <= 1e-12, seg, 1e-12);
}

inline void verify_ifs(VerifyReport& r, int i, double alpha, TurnParity curve_parity, bool full) {
  const Ifs f = derive_ifs(i, alpha);
  const double R = scaling_ratio(alpha);
  std::vector<double> scales;
  for (const auto& m : f.maps) scales.push_back(m.scale);
  std::sort(scales.begin(), scales.end());
  double spec_err = std::abs(scales[0] - R * R);
  for (std::size_t k = 1; k < 5; ++k) spec_err = std::max(spec_err, std::abs(scales[k] - R));
  r.add("scale_spectrum", spec_err <= 1e-6, spec_err, 1e-6);

  // The derived maps must reproduce the drawn reference curve. Drawing it
  // with the other turn parity mirrors it, which this check has to catch.
  const Polyline ref = draw_fibonacci(i, f.n_ref, alpha, 1.0, curve_parity);
  const double fit = ifs_reference_residual(f, ref);
  r.add("curve_matches_attractor", fit < 0.02, fit, 0.02);
  if (curve_parity == f.turn) {
    const double mirrored = ifs_reference_residual(f, draw_fibonacci(i, f.n_ref, alpha, 1.0, swapped(f.turn)));
    r.add("parity_swap_detected", alpha == 0 || mirrored >= 0.02, mirrored, 0.02);
  }

  if (alpha > 0) {
    const OscReport osc = verify_osc(f);
    r.add("osc_contained", osc.contained, osc.containment_clearance, -1e-9);
    r.add("osc_disjoint", osc.pairwise_disjoint, osc.margin, 0);
    Ifs dup = f;
    dup.maps[1] = dup.maps[0];
    const OscReport bad = verify_osc(dup);
    r.add("osc_negative_control_rejected", !bad.pairwise_disjoint, bad.margin, 0);
  }

  if (full) {
    const PointSet a = attractor(f, 8);
    const double diam = bounds_of(a).diameter();
    const double inv = invariance_residual(f, a) / diam;
    r.add("invariance_residual", inv < 0.02, inv, 0.02);
    if (alpha > 0) {
      const PointSet deep = attractor(f, 9);
      const DimensionReport d = box_counting_dimension(deep);
      const double err = std::abs(d.boxcount_s - hausdorff_dimension(alpha));
      r.add("box_counting_dimension", err <= 0.05 && d.fit_r2 > 0.99, err, 0.05);
    }
  }
}

// --- subcommands ----------------------------------------------------------------

struct Options {
  int i = 2;
  int n = 5;
  std::string alpha = "pi/2";
  std::string alphas = "grid:16";
  std::string out;
  std::string format;
  std::string parity = "even-left";
  std::string level = "full";
  std::string svg, csv, plot;
  double unit = 1.0;
  double stroke = 0.0;
  bool box = false;
  bool swap_parity = false;
  bool boxcount = false;
  int depth = -1;
  long long budget = 0;
  int n_ref = 0;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"i-Fibonacci word curves, their IFS and fractal dimension"};
  app.require_subcommand(1);
  Options o;

  auto common_word = [&](CLI::App* c) {
    c->add_option("--i", o.i, "family index (>= 2)")->required();
    c->add_option("--n", o.n, "word order (>= 1)")->required();
  };
  auto output = [&](CLI::App* c, const std::string& formats) {
    c->add_option("-o,--out", o.out, "output file (default: stdout)");
    c->add_option("--format", o.format, formats);
  };

  auto* word = app.add_subcommand("word", "print f_n^[i]");
  common_word(word);
  output(word, "txt | bin");

  auto* curve = app.add_subcommand("curve", "draw the curve of f_n^[i]");
  common_word(curve);
  curve->add_option("--alpha", o.alpha, "drawing angle: radians or pi/k");
  curve->add_option("--unit", o.unit, "segment length");
  curve->add_option("--parity", o.parity, "turn convention: even-left | odd-left");
  curve->add_option("--svg", o.svg, "write SVG to this path");
  curve->add_option("--csv", o.csv, "write CSV to this path");
  curve->add_option("--stroke", o.stroke, "SVG stroke width (default 0.5% of the view width)");
  curve->add_flag("--box", o.box, "overlay the bounding box in SVG output");
  output(curve, "svg | csv");

  auto* stats = app.add_subcommand("stats", "width, height, aspect ratio and net angle of a curve");
  common_word(stats);
  stats->add_option("--alpha", o.alpha, "drawing angle");
  stats->add_option("--parity", o.parity, "turn convention");
  output(stats, "json | csv");

  auto* dim = app.add_subcommand("dim", "scaling ratio and Hausdorff dimension table");
  dim->add_option("--alphas", o.alphas, "comma-separated angles or grid:N");
  dim->add_option("--plot", o.plot, "also write an SVG plot of s(alpha)");
  output(dim, "csv | json");

  auto* ifs = app.add_subcommand("ifs", "derive the five-map IFS");
  ifs->add_option("--i", o.i, "family index")->required();
  ifs->add_option("--alpha", o.alpha, "drawing angle");
  ifs->add_option("--n-ref", o.n_ref, "reference order (4 mod 6 for even i, 2 mod 6 for odd i)");
  ifs->add_option("--parity", o.parity, "turn convention");
  output(ifs, "json");

  auto* attr = app.add_subcommand("attractor", "sample the IFS attractor");
  attr->add_option("--i", o.i, "family index")->required();
  attr->add_option("--alpha", o.alpha, "drawing angle");
  attr->add_option("--depth", o.depth, "iteration depth (2*5^depth points)");
  attr->add_option("--budget", o.budget, "largest point count");
  attr->add_option("--n-ref", o.n_ref, "reference order");
  attr->add_flag("--dimension", o.boxcount, "emit a box-counting dimension report instead of points");
  output(attr, "csv | svg | json");

  auto* verify = app.add_subcommand("verify", "run checks; exit 1 if any fails");
  verify->add_option("--i", o.i, "family index");
  verify->add_option("--alpha", o.alpha, "drawing angle");
  verify->add_option("--level", o.level, "words | curve | ifs | full");
  verify->add_flag("--swap-parity", o.swap_parity, "negative control: draw reference curves with the other turn parity");
  output(verify, "json");

  auto* sweep = app.add_subcommand("sweep", "IFS checks over a grid of angles");
  sweep->add_option("--i", o.i, "family index");
  sweep->add_option("--alphas", o.alphas, "comma-separated angles or grid:N (default grid:16)");
  sweep->add_flag("--boxcount", o.boxcount, "add a box-counting estimate (depth 9) per angle");
  output(sweep, "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*word) {
      const Word w = word_concat(o.i, o.n);
      const std::string fmt = format_from(o.format, o.out, "txt");
      if (fmt == "txt")
        Sink{o.out, &out}.emit(word_text(w));
      else if (fmt == "bin")
        Sink{o.out, &out}.emit(word_binary(w));
      else
        throw UsageError("word format must be txt or bin");
      return kExitOk;
    }

    if (*curve) {
      const double a = parse_angle(o.alpha);
      check_angle_arg(a);
      const TurnParity parity = parse_parity(o.parity);
      if (!(o.unit > 0)) throw UsageError("--unit must be positive");
      const Polyline p = draw_fibonacci(o.i, o.n, a, o.unit, parity);
      const OrientedBox box = bounding_box(p.points, Vec2{1, 0});
      SvgStyle style;
      style.stroke_width = o.stroke;
      style.show_box = o.box;
      auto svg = [&] { return polyline_svg(p.points, style, o.box ? &box : nullptr); };
      if (!o.svg.empty()) write_file_atomic(o.svg, svg());
      if (!o.csv.empty()) write_file_atomic(o.csv, points_csv(p.points));
      if (o.svg.empty() && o.csv.empty()) {
        const std::string fmt = format_from(o.format, o.out, "csv");
        if (fmt == "svg")
          Sink{o.out, &out}.emit(svg());
        else if (fmt == "csv")
          Sink{o.out, &out}.emit(points_csv(p.points));
        else
          throw UsageError("curve format must be svg or csv");
      }
      return kExitOk;
    }

    if (*stats) {
      const double a = parse_angle(o.alpha);
      check_angle_arg(a);
      const Polyline p = draw_fibonacci(o.i, o.n, a, 1.0, parse_parity(o.parity));
      const CurveStats s = curve_stats(p);
      const std::string fmt = format_from(o.format, o.out, "json");
      if (fmt == "json")
        Sink{o.out, &out}.emit(stats_json(s, p.meta, p.points.size()));
      else if (fmt == "csv")
        Sink{o.out, &out}.emit(stats_csv(s, p.meta, p.points.size()));
      else
        throw UsageError("stats format must be json or csv");
      return kExitOk;
    }

    if (*dim) {
      const std::vector<double> as = parse_angle_list(o.alphas);
      for (double a : as) check_angle_arg(a);
      const std::string fmt = format_from(o.format, o.out, "csv");
      if (fmt == "csv") {
        Sink{o.out, &out}.emit(dim_table_csv(as));
      } else if (fmt == "json") {
        JsonWriter j;
        j.begin_array();
        for (double a : as) {
          const ScalingProfile p = scaling_profile(a);
          j.begin_object()
              .field("alpha", a)
              .field("R", p.ratio)
              .field("r_plus", p.r_plus)
              .field("aspect_limit", p.aspect)
              .field("dimension", p.dimension)
              .end_object();
        }
        j.end_array();
        Sink{o.out, &out}.emit(j.str());
      } else {
        throw UsageError("dim format must be csv or json");
      }
      if (!o.plot.empty()) {
        PointSet curve_pts;
        for (double a : as) curve_pts.push_back({a, hausdorff_dimension(a)});
        write_file_atomic(o.plot, polyline_svg(curve_pts));
      }
      return kExitOk;
    }

    if (*ifs) {
      const double a = parse_angle(o.alpha);
      check_angle_arg(a);
      const Ifs f = derive_ifs(o.i, a, o.n_ref, parse_parity(o.parity));
      Sink{o.out, &out}.emit(ifs_json(f));
      return kExitOk;
    }

    if (*attr) {
      const double a = parse_angle(o.alpha);
      check_angle_arg(a);
      if (o.depth >= 0 && o.budget > 0) throw UsageError("give --depth or --budget, not both");
      const Ifs f = derive_ifs(o.i, a, o.n_ref);
      PointSet pts;
      if (o.budget > 0)
        pts = attractor_budget(f, static_cast<std::size_t>(o.budget));
      else
        pts = attractor(f, o.depth >= 0 ? o.depth : 7);
      const std::string fmt = format_from(o.format, o.out, o.boxcount ? "json" : "csv");
      if (o.boxcount) {
        DimensionReport d = box_counting_dimension(pts);
        d.alpha = a;
        d.analytic_s = hausdorff_dimension(a);
        if (fmt == "json")
          Sink{o.out, &out}.emit(dimension_report_json(d));
        else if (fmt == "csv")
          Sink{o.out, &out}.emit(dimension_report_csv(d));
        else
          throw UsageError("dimension report format must be json or csv");
      } else if (fmt == "csv") {
        Sink{o.out, &out}.emit(points_csv(pts));
      } else if (fmt == "svg") {
        Sink{o.out, &out}.emit(points_svg(pts));
      } else {
        throw UsageError("attractor format must be csv or svg");
      }
      return kExitOk;
    }

    if (*verify) {
      const double a = parse_angle(o.alpha);
      check_angle_arg(a);
      if (o.level != "words" && o.level != "curve" && o.level != "ifs" && o.level != "full")
        throw UsageError("level must be words, curve, ifs or full");
      VerifyReport r{o.level, o.i, a, {}};
      detail::check_family(o.i, 1);
      const TurnParity curve_parity = o.swap_parity ? TurnParity::OddLeft : TurnParity::EvenLeft;
      if (o.level == "words" || o.level == "full") verify_words(r, o.i);
      if (o.level == "curve" || o.level == "full") verify_curve(r, o.i, a, curve_parity);
      if (o.level == "ifs" || o.level == "full") verify_ifs(r, o.i, a, curve_parity, o.level == "full");
      Sink{o.out, &out}.emit(r.json());
      return r.passed() ? kExitOk : kExitFailed;
    }

    if (*sweep) {
      const std::vector<double> as = parse_angle_list(o.alphas);
      for (double a : as) check_angle_arg(a);
      const std::string fmt = format_from(o.format, o.out, "csv");
      if (fmt != "csv" && fmt != "json") throw UsageError("sweep format must be csv or json");
      std::string csv = "alpha,R,rho,dimension,osc_contained,osc_disjoint,osc_margin,landmark_residual";
      csv += o.boxcount ? ",boxcount_s,fit_r2\n" : "\n";
      JsonWriter j;
      j.begin_array();
      bool all_ok = true;
      for (double a : as) {
        const Ifs f = derive_ifs(o.i, a);
        const OscReport osc = verify_osc(f);
        const bool ok = osc.degenerate || (osc.contained && osc.pairwise_disjoint);
        all_ok = all_ok && ok;
        csv += format_real(a) + "," + format_real(scaling_ratio(a)) + "," + format_real(f.ratio) + "," +
               format_real(hausdorff_dimension(a)) + "," + (osc.contained ? "1" : "0") + "," +
               (osc.pairwise_disjoint ? "1" : "0") + "," + format_real(osc.margin) + "," +
               format_real(f.landmark_residual);
        j.begin_object()
            .field("alpha", a)
            .field("R", scaling_ratio(a))
            .field("rho", f.ratio)
            .field("dimension", hausdorff_dimension(a))
            .field("osc_contained", osc.contained)
            .field("osc_disjoint", osc.pairwise_disjoint)
            .field("osc_margin", osc.margin)
            .field("landmark_residual", f.landmark_residual);
        if (o.boxcount) {
          DimensionReport d{};
          if (a > 0) d = box_counting_dimension(attractor(f, 9));
          csv += "," + format_real(d.boxcount_s) + "," + format_real(d.fit_r2);
          j.field("boxcount_s", d.boxcount_s).field("fit_r2", d.fit_r2);
        }
        csv += "\n";
        j.end_object();
      }
      j.end_array();
      Sink{o.out, &out}.emit(fmt == "csv" ? csv : j.str());
      return all_ok ? kExitOk : kExitFailed;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const OverflowError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace fibfrac::cli
