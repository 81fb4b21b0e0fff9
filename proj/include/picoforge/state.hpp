#ifndef PICOFORGE_STATE_HPP
#define PICOFORGE_STATE_HPP

// The graphics-state machine: parameter registry with the engine's exact
// defaults, color and style tables, unit registers, and resolution of raw
// coordinates, angles and lengths into engine values.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "picoforge/diagnostics.hpp"
#include "picoforge/fixnum.hpp"
#include "picoforge/syntax.hpp"

namespace picoforge::state {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Colors

struct Rgb {
    double r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

struct ColorRef {
    enum class Model { Gray, Rgb, Hsb, Cmyk };
    Model model = Model::Gray;
    std::array<double, 4> comp{0, 0, 0, 0};
};

inline Rgb to_rgb(const ColorRef& c) {
    switch (c.model) {
        case ColorRef::Model::Gray:
            return {c.comp[0], c.comp[0], c.comp[0]};
        case ColorRef::Model::Rgb:
            return {c.comp[0], c.comp[1], c.comp[2]};
        case ColorRef::Model::Hsb: {
            double h = c.comp[0], s = c.comp[1], v = c.comp[2];
            if (s <= 0) return {v, v, v};
            double hh = h * 6.0;
            if (hh >= 6.0) hh = 0.0;
            int sector = static_cast<int>(hh);
            double f = hh - sector;
            double p = v * (1 - s);
            double q = v * (1 - s * f);
            double t = v * (1 - s * (1 - f));
            switch (sector) {
                case 0: return {v, t, p};
                case 1: return {q, v, p};
                case 2: return {p, v, t};
                case 3: return {p, q, v};
                case 4: return {t, p, v};
                default: return {v, p, q};
            }
        }
        case ColorRef::Model::Cmyk: {
            double k = c.comp[3];
            return {(1 - c.comp[0]) * (1 - k), (1 - c.comp[1]) * (1 - k),
                    (1 - c.comp[2]) * (1 - k)};
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Enums

enum class LineStyle { None, Solid, Dashed, Dotted };

enum class FillStyle {
    None, Solid, EoFill,
    VLines, VLinesStar, HLines, HLinesStar, CrossHatch, CrossHatchStar
};

enum class ArrowKind {
    None,
    Head, DoubleHead, RevHead, DoubleRevHead,
    TBar, TBarCentered, HeadTBar, HeadTBarCentered, TBarHead,
    Bracket, BracketOut, RoundBracket, RoundBracketOut,
    CircleEnd, CircleCenteredEnd, DiskEnd, DiskCenteredEnd,
    CapRound, CapRoundFlush, CapSquare
};

/// psas name -> kind; the empty name is the blank terminator.
inline std::optional<ArrowKind> arrow_kind_from_name(std::string_view n) {
    if (n == "") return ArrowKind::None;
    if (n == ">") return ArrowKind::Head;
    if (n == ">>") return ArrowKind::DoubleHead;
    if (n == "<") return ArrowKind::RevHead;
    if (n == "<<") return ArrowKind::DoubleRevHead;
    if (n == "|") return ArrowKind::TBar;
    if (n == "|*") return ArrowKind::TBarCentered;
    if (n == ">|") return ArrowKind::HeadTBar;
    if (n == ">|*") return ArrowKind::HeadTBarCentered;
    if (n == "<|") return ArrowKind::TBarHead;
    if (n == "]") return ArrowKind::Bracket;
    if (n == "[") return ArrowKind::BracketOut;
    if (n == ")") return ArrowKind::RoundBracket;
    if (n == "(") return ArrowKind::RoundBracketOut;
    if (n == "o") return ArrowKind::CircleEnd;
    if (n == "oo") return ArrowKind::CircleCenteredEnd;
    if (n == "*") return ArrowKind::DiskEnd;
    if (n == "**") return ArrowKind::DiskCenteredEnd;
    if (n == "c") return ArrowKind::CapRound;
    if (n == "cc") return ArrowKind::CapRoundFlush;
    if (n == "C") return ArrowKind::CapSquare;
    return std::nullopt;
}

struct ArrowPair {
    ArrowKind start = ArrowKind::None;
    ArrowKind end = ArrowKind::None;
    bool operator==(const ArrowPair&) const = default;
    bool any() const { return start != ArrowKind::None || end != ArrowKind::None; }
};

/// Splits at the first '-', translates the start side through the pair
/// table, looks the end side up directly. Unknown sides clear both.
inline ArrowPair resolve_arrows(std::string_view spec, Diagnostics& diags,
                                SourcePos pos = {}) {
    std::size_t dash = spec.find('-');
    if (dash == std::string_view::npos) {
        diags.warning(pos, "Bad arrows specification: " + std::string(spec));
        return {};
    }
    std::string a(spec.substr(0, dash));
    std::string b(spec.substr(dash + 1));
    // start-side image table, searched in the engine's order
    static const std::pair<const char*, const char*> kTable[] = {
        {"<", ">"}, {"<<", ">>"}, {">", "<"}, {">>", "<<"},
        {"(", ")"}, {"[", "]"}, {")", "("}, {"]", "["},
        {"|>", "<|"}, {"|<*", ">|*"}, {"|<", ">|"},
    };
    std::string a_image = a;
    for (const auto& [from, to] : kTable)
        if (a == from) { a_image = to; break; }
    auto ka = arrow_kind_from_name(a_image);
    auto kb = arrow_kind_from_name(b);
    if (!ka || !kb) {
        diags.warning(pos, "Bad arrows specification: " + std::string(spec));
        return {};
    }
    return ArrowPair{*ka, *kb};
}

// ---------------------------------------------------------------------------
// Assorted parameter payloads

struct EvalMode {
    bool special_coor = false;
    bool polar_default = false;
    double angle_factor = 1.0;  // degrees; \degrees[n] -> 360/n; \radians -> 57.2956
};

struct DoubleSep {
    bool absolute = false;
    Num factor{+1, 1, "25"};  // 1.25 * linewidth
    Sp length = 0;

    Sp resolve(Sp linewidth) const {
        return absolute ? length : decimal_times_sp(factor, linewidth);
    }
    bool operator==(const DoubleSep& o) const {
        return absolute == o.absolute && length == o.length &&
               factor.sign == o.factor.sign && factor.int_part == o.factor.int_part &&
               factor.frac == o.factor.frac;
    }
};

struct RotSpec {
    bool neg_acc = false;  // N/W/S/E and the "*" prefix subtract the
                           // accumulated rotation of the placement context
    double angle = 0.0;
    bool operator==(const RotSpec&) const = default;

    double resolve(double accumulated) const {
        return neg_acc ? angle - accumulated : angle;
    }
};

struct RefSpec {
    double xref = 0.5;
    double yref = 0.5;
    bool baseline = false;  // 'B': reference on the typographic baseline
    bool operator==(const RefSpec&) const = default;
};

// ---------------------------------------------------------------------------
// GraphicsState

struct GraphicsState {
    UnitRegisters units;
    EvalMode mode;

    // stroke
    Sp linewidth = 52429;  // .8pt
    std::string linecolor = "black";
    LineStyle linestyle = LineStyle::Solid;
    std::array<Sp, 4> dash{327680, 196608, 0, 0};  // 5pt 3pt 0pt 0pt
    bool dashadjust = true;
    Sp dotsep = 196608;  // 3pt
    int linecap = 0;
    Sp linearc = 0;

    // fill
    std::string fillcolor = "white";
    FillStyle fillstyle = FillStyle::None;
    std::vector<FillStyle> extra_fillstyles;

    // hatching
    Sp hatchwidth = 52429;   // .8pt
    Sp hatchsep = 262144;    // 4pt
    std::string hatchcolor = "black";
    double hatchangle = 45.0;
    Sp hatchwidthinc = 0;
    Sp hatchsepinc = 0;

    // arrows
    ArrowPair arrows;
    Sp arrowsize_dim = 98304;  // 1.5pt
    double arrowsize_num = 2.0;
    double arrowlength = 1.4;
    double arrowinset = 0.4;
    double arrowscale_x = 1.0;
    double arrowscale_y = 1.0;
    Sp tbarsize_dim = 131072;  // 2pt
    double tbarsize_num = 5.0;
    double bracketlength = 0.15;
    double rbracketlength = 0.15;

    // dots
    Sp dotsize_dim = 131072;  // 2pt
    double dotsize_num = 2.0;
    std::string dotstyle = "*";
    double dotscale_x = 1.0;
    double dotscale_y = 1.0;
    double dotangle = 0.0;

    // frames and corners
    double framearc = 0.0;
    bool cornersize_absolute = false;
    double dimen_k = 0.5;  // outer
    Sp framesep = 196608;  // 3pt
    bool boxsep = true;

    // decoration
    Sp border = 0;
    std::string bordercolor = "white";
    bool doubleline = false;
    DoubleSep doublesep;
    std::string doublecolor = "white";
    bool shadow = false;
    Sp shadowsize = 196608;  // 3pt
    double shadowangle = -45.0;
    std::string shadowcolor = "darkgray";
    bool showpoints = false;

    // curves
    double curvature_a = 1.0;
    double curvature_b = 0.1;
    double curvature_c = 0.0;

    // grid
    Sp gridwidth = 52429;  // .8pt
    std::string gridcolor = "black";
    int griddots = 0;
    Sp subgridwidth = 26214;  // .4pt
    std::string subgridcolor = "gray";
    int subgriddots = 0;
    int subgriddiv = 5;
    Sp gridlabels = 655360;  // 10pt
    std::string gridlabelcolor = "black";

    // geometry parameters
    Sp radius = 466170;  // .25cm
    Sp arcsepA = 0;
    Sp arcsepB = 0;
    std::optional<std::pair<Sp, Sp>> origin;
    bool swapaxes = false;
    int liftpen = 0;
    int linetype = 2;

    // placement
    RefSpec ref;
    RotSpec rot;
    double refangle = 0.0;
    std::string uputref = "20";  // quadrant code for named refangles; "" = numeric
    Sp labelsep = 327680;  // 5pt
    Sp shift = 0;
    double gangle = 0.0;
    int trimode = 0;  // U; R=1 D=2 L=3
    bool trimode_star = false;

    bool showgrid = false;
    int pst_debug = 0;
    bool in_custom = false;  // not a key: set while evaluating \pscustom

    // document-scoped tables (TeX-grouped, so they live with the state)
    std::map<std::string, ColorRef> colors = default_colors();
    std::map<std::string, std::string> styles = default_styles();

    static std::map<std::string, ColorRef> default_colors() {
        std::map<std::string, ColorRef> t;
        auto gray = [](double g) {
            ColorRef c; c.model = ColorRef::Model::Gray; c.comp[0] = g; return c;
        };
        auto rgb = [](double r, double g, double b) {
            ColorRef c; c.model = ColorRef::Model::Rgb;
            c.comp = {r, g, b, 0}; return c;
        };
        t["black"] = gray(0);
        t["darkgray"] = gray(.25);
        t["gray"] = gray(.5);
        t["lightgray"] = gray(.75);
        t["white"] = gray(1);
        t["red"] = rgb(1, 0, 0);
        t["green"] = rgb(0, 1, 0);
        t["blue"] = rgb(0, 0, 1);
        t["yellow"] = rgb(1, 1, 0);
        t["cyan"] = rgb(0, 1, 1);
        t["magenta"] = rgb(1, 0, 1);
        return t;
    }
    static std::map<std::string, std::string> default_styles() {
        return {{"gridstyle",
                 "subgriddiv=0,gridcolor=lightgray,griddots=10,gridlabels=8pt"}};
    }

    Rgb rgb_of(const std::string& name) const {
        auto it = colors.find(name);
        if (it == colors.end()) return {0, 0, 0};  // undefined paints black
        return to_rgb(it->second);
    }

    bool repeat_arrows() const { return border > 0 || doubleline || shadow; }
};

// ---------------------------------------------------------------------------
// Resolution helpers

/// Number through \pst@checknum: bad text reports and substitutes 0.
inline double checknum(std::string_view text, Diagnostics& diags, SourcePos pos = {}) {
    auto n = parse_number(text);
    if (!n) {
        diags.warning(pos, "Bad number: `" + std::string(text) + "'. 0 substituted.");
        return 0.0;
    }
    return n->value();
}

inline Sp resolve_length(std::string_view text, Sp default_unit, Diagnostics& diags,
                         SourcePos pos = {}) {
    auto v = parse_length(text, default_unit);
    if (!v) {
        diags.warning(pos, "Bad number: `" + std::string(text) + "'. 0 substituted.");
        return 0;
    }
    return *v;
}

inline double resolve_angle(const syntax::RawAngle& ra, const GraphicsState& st,
                            Diagnostics& diags, SourcePos pos = {});

inline std::pair<Sp, Sp> resolve_coord(const syntax::RawCoord& rc, const GraphicsState& st,
                                       Diagnostics& diags);

namespace detail {

inline double resolve_angle_text(std::string_view text, const GraphicsState& st,
                                 Diagnostics& diags, SourcePos pos) {
    Diagnostics scratch;
    syntax::RawAngle ra = syntax::parse_angle(text, scratch, pos);
    for (const auto& d : scratch.items()) diags.report(d.severity, d.pos, d.message);
    return resolve_angle(ra, st, diags, pos);
}

inline std::pair<Sp, Sp> polar_to_xy(Sp r, double deg) {
    double rad = deg * kPi / 180.0;
    double x = static_cast<double>(r) * std::cos(rad);
    double y = static_cast<double>(r) * std::sin(rad);
    auto rnd = [](double v) {
        return static_cast<Sp>(v >= 0 ? v + 0.5 : v - 0.5);
    };
    return {rnd(x), rnd(y)};
}

inline std::pair<Sp, Sp> resolve_cartesian_text(std::string_view text,
                                                const GraphicsState& st,
                                                Diagnostics& diags, SourcePos pos) {
    std::string t = syntax::detail::trim(text);
    std::size_t comma = t.find(',');
    if (comma == std::string::npos) {
        diags.error(pos, "one-component coordinate: `" + t + "'");
        return {0, 0};
    }
    std::string xs = syntax::detail::trim(std::string_view(t).substr(0, comma));
    std::string rest = syntax::detail::trim(std::string_view(t).substr(comma + 1));
    std::size_t comma2 = rest.find(',');
    if (comma2 != std::string::npos)
        rest = syntax::detail::trim(std::string_view(rest).substr(0, comma2));
    Sp x = resolve_length(xs, st.units.xunit, diags, pos);
    Sp y = resolve_length(rest, st.units.yunit, diags, pos);
    return {x, y};
}

}  // namespace detail

inline double resolve_angle(const syntax::RawAngle& ra, const GraphicsState& st,
                            Diagnostics& diags, SourcePos pos) {
    if (ra.kind == syntax::RawAngle::Kind::Direction) {
        if (!st.mode.special_coor) {
            diags.warning(pos, "Bad number: `" + (ra.coord.empty() ? std::string()
                                                                   : ra.coord[0].text) +
                                   "'. 0 substituted.");
            return 0.0;
        }
        auto [x, y] = resolve_coord(ra.coord[0], st, diags);
        double deg = std::atan2(static_cast<double>(y), static_cast<double>(x)) * 180.0 / kPi;
        if (deg < 0) deg += 360.0;
        return deg;
    }
    return checknum(ra.value, diags, pos) * st.mode.angle_factor;
}

inline std::pair<Sp, Sp> resolve_coord(const syntax::RawCoord& rc, const GraphicsState& st,
                                       Diagnostics& diags) {
    using Kind = syntax::RawCoord::Kind;
    if (!st.mode.special_coor) {
        // plain mode only understands "x,y" (or polar pairs under \Polar)
        if (st.mode.polar_default && rc.kind == Kind::Cartesian) {
            Sp r = resolve_length(rc.a, st.units.unit, diags, rc.pos);
            double deg = detail::resolve_angle_text(rc.b, st, diags, rc.pos);
            return detail::polar_to_xy(r, deg);
        }
        if (rc.kind == Kind::Cartesian) {
            Sp x = resolve_length(rc.a, st.units.xunit, diags, rc.pos);
            Sp y = resolve_length(rc.b, st.units.yunit, diags, rc.pos);
            return {x, y};
        }
        return detail::resolve_cartesian_text(rc.text, st, diags, rc.pos);
    }
    switch (rc.kind) {
        case Kind::Cartesian: {
            if (st.mode.polar_default) {
                Sp r = resolve_length(rc.a, st.units.unit, diags, rc.pos);
                double deg = detail::resolve_angle_text(rc.b, st, diags, rc.pos);
                return detail::polar_to_xy(r, deg);
            }
            Sp x = resolve_length(rc.a, st.units.xunit, diags, rc.pos);
            Sp y = resolve_length(rc.b, st.units.yunit, diags, rc.pos);
            return {x, y};
        }
        case Kind::Polar: {
            Sp r = resolve_length(rc.a, st.units.unit, diags, rc.pos);
            double deg = detail::resolve_angle_text(rc.b, st, diags, rc.pos);
            return detail::polar_to_xy(r, deg);
        }
        case Kind::Mixed: {
            auto left = resolve_coord(rc.sub[0], st, diags);
            auto right = resolve_coord(rc.sub[1], st, diags);
            return {left.first, right.second};
        }
        case Kind::Raw: {
            double x = checknum(rc.a, diags, rc.pos) * static_cast<double>(st.units.xunit);
            double y = checknum(rc.b, diags, rc.pos) * static_cast<double>(st.units.yunit);
            auto rnd = [](double v) {
                return static_cast<Sp>(v >= 0 ? v + 0.5 : v - 0.5);
            };
            return {rnd(x), rnd(y)};
        }
        case Kind::Invalid:
            return {0, 0};
    }
    return {0, 0};
}

// ---------------------------------------------------------------------------
// Color and style definition

inline void define_color(GraphicsState& st, const std::string& name,
                         ColorRef::Model model, std::string_view components,
                         Diagnostics& diags, SourcePos pos = {}) {
    ColorRef c;
    c.model = model;
    int needed = model == ColorRef::Model::Gray ? 1
               : model == ColorRef::Model::Cmyk ? 4 : 3;
    std::string t = syntax::detail::trim(components);
    std::size_t i = 0;
    for (int k = 0; k < needed; ++k) {
        while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
        std::size_t start = i;
        while (i < t.size() && !std::isspace(static_cast<unsigned char>(t[i]))) ++i;
        c.comp[k] = checknum(std::string_view(t).substr(start, i - start), diags, pos);
    }
    st.colors[name] = c;
}

inline void define_style(GraphicsState& st, const std::string& name, std::string pairs) {
    st.styles[name] = std::move(pairs);
}

// ---------------------------------------------------------------------------
// apply_keyvals

namespace detail {

using syntax::detail::trim;

inline bool parse_bool(std::string_view v, bool& out) {
    if (v == "true") { out = true; return true; }
    if (v == "false") { out = false; return true; }
    return false;
}

inline bool parse_int(std::string_view v, int& out) {
    std::string t = trim(v);
    if (t.empty()) return false;
    std::size_t i = t[0] == '-' || t[0] == '+' ? 1 : 0;
    if (i >= t.size()) return false;
    long long val = 0;
    for (; i < t.size(); ++i) {
        if (t[i] < '0' || t[i] > '9') return false;
        val = val * 10 + (t[i] - '0');
        if (val > 2147483647LL) return false;
    }
    out = static_cast<int>(t[0] == '-' ? -val : val);
    return true;
}

inline void set_color_key(GraphicsState& st, std::string& slot, const std::string& v,
                          Diagnostics& diags, SourcePos pos) {
    if (st.colors.find(v) == st.colors.end()) {
        diags.warning(pos, "Color `" + v + "' not defined");
        return;  // keeps the previous value
    }
    slot = v;
}

// "dim num" pairs for arrowsize/tbarsize/dotsize; a single value leaves
// the multiplier at 0.
inline void set_dimnum(const std::string& v, Sp unit, Sp& dim, double& num,
                       Diagnostics& diags, SourcePos pos) {
    std::string t = trim(v);
    std::size_t sp = t.find(' ');
    std::string dpart = sp == std::string::npos ? t : trim(std::string_view(t).substr(0, sp));
    std::string npart = sp == std::string::npos ? "0" : trim(std::string_view(t).substr(sp + 1));
    dim = resolve_length(dpart, unit, diags, pos);
    num = checknum(npart, diags, pos);
}

// one or two scale factors; zero factors are rejected
inline void set_scale(const std::string& v, double& sx, double& sy,
                      Diagnostics& diags, SourcePos pos) {
    std::string t = trim(v);
    if (t == "none") { sx = 1; sy = 1; return; }
    std::size_t sp = t.find(' ');
    std::string a = sp == std::string::npos ? t : trim(std::string_view(t).substr(0, sp));
    std::string b = sp == std::string::npos ? a : trim(std::string_view(t).substr(sp + 1));
    double fx = checknum(a, diags, pos);
    double fy = checknum(b, diags, pos);
    if (fx == 0.0 || fy == 0.0) {
        diags.warning(pos, "Bad scaling argument `" + t + "'");
        sx = 1;
        sy = 1;
        return;
    }
    sx = fx;
    sy = fy;
}

inline std::vector<std::string> split_ws(std::string_view v) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < v.size()) {
        while (i < v.size() && std::isspace(static_cast<unsigned char>(v[i]))) ++i;
        std::size_t s = i;
        while (i < v.size() && !std::isspace(static_cast<unsigned char>(v[i]))) ++i;
        if (i > s) out.emplace_back(v.substr(s, i - s));
    }
    return out;
}

inline std::optional<FillStyle> fillstyle_from_name(std::string_view v) {
    if (v == "none") return FillStyle::None;
    if (v == "solid") return FillStyle::Solid;
    if (v == "eofill") return FillStyle::EoFill;
    if (v == "vlines") return FillStyle::VLines;
    if (v == "vlines*") return FillStyle::VLinesStar;
    if (v == "hlines") return FillStyle::HLines;
    if (v == "hlines*") return FillStyle::HLinesStar;
    if (v == "crosshatch") return FillStyle::CrossHatch;
    if (v == "crosshatch*") return FillStyle::CrossHatchStar;
    return std::nullopt;
}

inline bool known_dotstyle(std::string_view v) {
    static const char* kStyles[] = {
        "*", "o", "Bo", "square", "square*", "Bsquare", "triangle", "triangle*",
        "Btriangle", "pentagon", "pentagon*", "Bpentagon", "diamond", "diamond*",
        "Bdiamond", "+", "B+", "|", "B|", "x", "asterisk", "Basterisk",
        "oplus", "otimes",
    };
    for (const char* s : kStyles)
        if (v == s) return true;
    return false;
}

}  // namespace detail

inline void apply_keyvals(GraphicsState& st, const std::vector<syntax::KeyVal>& pairs,
                          Diagnostics& diags);

namespace detail {

inline void apply_one(GraphicsState& st, const std::string& key, const std::string& v,
                      Diagnostics& diags, SourcePos pos) {
    auto len = [&](Sp unit) { return resolve_length(v, unit, diags, pos); };
    auto plain_len = [&] { return resolve_length(v, st.units.unit, diags, pos); };
    auto angle = [&] { return resolve_angle_text(v, st, diags, pos); };

    if (key == "style") {
        auto it = st.styles.find(v);
        if (it == st.styles.end()) {
            diags.warning(pos, "Custom style `" + v + "' undefined");
            return;
        }
        Diagnostics scratch;
        auto sub = syntax::parse_keyvals(it->second, scratch, pos);
        for (const auto& d : scratch.items()) diags.report(d.severity, d.pos, d.message);
        apply_keyvals(st, sub, diags);
        return;
    }
    if (key == "unit") { st.units.set_unit(plain_len()); return; }
    if (key == "runit") { st.units.set_runit(plain_len()); return; }
    if (key == "xunit") { st.units.xunit = len(st.units.xunit); return; }
    if (key == "yunit") { st.units.yunit = len(st.units.yunit); return; }
    if (key == "linewidth") { st.linewidth = plain_len(); return; }
    if (key == "linecolor") { set_color_key(st, st.linecolor, v, diags, pos); return; }
    if (key == "linestyle") {
        if (v == "none") st.linestyle = LineStyle::None;
        else if (v == "solid") st.linestyle = LineStyle::Solid;
        else if (v == "dashed") st.linestyle = LineStyle::Dashed;
        else if (v == "dotted") st.linestyle = LineStyle::Dotted;
        else diags.warning(pos, "Line style `" + v + "' not defined");
        return;
    }
    if (key == "linecap") {
        st.linecap = 0;
        int n = 0;
        if (parse_int(v, n) && n > -1 && n < 3) st.linecap = n;
        return;
    }
    if (key == "linearc") { st.linearc = plain_len(); return; }
    if (key == "linetype") {
        int n = 0;
        if (!parse_int(v, n)) {
            diags.warning(pos, "Missing number or dimension. 0 substituted");
            n = 0;
        }
        if (n < -3) {
            diags.warning(pos, "linetype must be greater than -3");
            n = 2;
        }
        st.linetype = n;
        return;
    }
    if (key == "dash") {
        auto parts = split_ws(v);
        Sp entries[4] = {0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
            if (i < static_cast<int>(parts.size())) {
                entries[i] = resolve_length(parts[i], st.units.unit, diags, pos);
            } else if (i >= 2 && static_cast<int>(parts.size()) >= 2) {
                entries[i] = 0;  // third and fourth default silently
            } else {
                diags.warning(pos, "Missing number or dimension. 0 substituted");
                entries[i] = 0;
            }
        }
        st.dash = {entries[0], entries[1], entries[2], entries[3]};
        return;
    }
    if (key == "dashadjust") { parse_bool(v, st.dashadjust); return; }
    if (key == "dotsep") { st.dotsep = plain_len(); return; }
    if (key == "fillcolor") { set_color_key(st, st.fillcolor, v, diags, pos); return; }
    if (key == "fillstyle") {
        auto fs = fillstyle_from_name(v);
        if (!fs) { diags.warning(pos, "Undefined fill style: `" + v + "'"); return; }
        st.fillstyle = *fs;
        st.extra_fillstyles.clear();
        return;
    }
    if (key == "addfillstyle") {
        auto fs = fillstyle_from_name(v);
        if (!fs) { diags.warning(pos, "Undefined fill style: `" + v + "'"); return; }
        st.extra_fillstyles.push_back(*fs);
        return;
    }
    if (key == "hatchwidth") { st.hatchwidth = plain_len(); return; }
    if (key == "hatchsep") { st.hatchsep = plain_len(); return; }
    if (key == "hatchcolor") { set_color_key(st, st.hatchcolor, v, diags, pos); return; }
    if (key == "hatchangle") { st.hatchangle = angle(); return; }
    if (key == "hatchwidthinc") { st.hatchwidthinc = plain_len(); return; }
    if (key == "hatchsepinc") { st.hatchsepinc = plain_len(); return; }
    if (key == "arrows") { st.arrows = resolve_arrows(v, diags, pos); return; }
    if (key == "arrowsize") {
        set_dimnum(v, st.units.unit, st.arrowsize_dim, st.arrowsize_num, diags, pos);
        return;
    }
    if (key == "arrowlength") { st.arrowlength = checknum(v, diags, pos); return; }
    if (key == "arrowinset") { st.arrowinset = checknum(v, diags, pos); return; }
    if (key == "arrowscale") { set_scale(v, st.arrowscale_x, st.arrowscale_y, diags, pos); return; }
    if (key == "tbarsize") {
        set_dimnum(v, st.units.unit, st.tbarsize_dim, st.tbarsize_num, diags, pos);
        return;
    }
    if (key == "bracketlength") { st.bracketlength = checknum(v, diags, pos); return; }
    if (key == "rbracketlength") { st.rbracketlength = checknum(v, diags, pos); return; }
    if (key == "dotsize") {
        set_dimnum(v, st.units.unit, st.dotsize_dim, st.dotsize_num, diags, pos);
        return;
    }
    if (key == "dotstyle") {
        if (!known_dotstyle(v)) { diags.warning(pos, "Dot style `" + v + "' not defined"); return; }
        st.dotstyle = v;
        return;
    }
    if (key == "dotscale") { set_scale(v, st.dotscale_x, st.dotscale_y, diags, pos); return; }
    if (key == "dotangle") { st.dotangle = angle(); return; }
    if (key == "framearc") { st.framearc = checknum(v, diags, pos); return; }
    if (key == "cornersize") {
        if (!v.empty()) st.cornersize_absolute = v[0] == 'a';
        return;
    }
    if (key == "dimen") {
        if (!v.empty()) {
            if (v[0] == 'o') st.dimen_k = 0.5;
            else if (v[0] == 'm') st.dimen_k = 0.0;
            else if (v[0] == 'i') st.dimen_k = -0.5;
        }
        return;
    }
    if (key == "framesep") { st.framesep = plain_len(); return; }
    if (key == "boxsep") { parse_bool(v, st.boxsep); return; }
    if (key == "border") { st.border = plain_len(); return; }
    if (key == "bordercolor") { set_color_key(st, st.bordercolor, v, diags, pos); return; }
    if (key == "doubleline") { parse_bool(v, st.doubleline); return; }
    if (key == "doublesep") {
        if (v.find("\\pslinewidth") != std::string::npos) {
            std::string factor = syntax::detail::trim(v.substr(0, v.find("\\pslinewidth")));
            if (factor.empty()) factor = "1";
            auto n = parse_number(factor);
            if (!n) {
                diags.warning(pos, "Bad number: `" + factor + "'. 0 substituted.");
                n = Num{};
            }
            st.doublesep.absolute = false;
            st.doublesep.factor = *n;
        } else {
            st.doublesep.absolute = true;
            st.doublesep.length = plain_len();
        }
        return;
    }
    if (key == "doublecolor") { set_color_key(st, st.doublecolor, v, diags, pos); return; }
    if (key == "shadow") { parse_bool(v, st.shadow); return; }
    if (key == "shadowsize") { st.shadowsize = plain_len(); return; }
    if (key == "shadowangle") { st.shadowangle = angle(); return; }
    if (key == "shadowcolor") { set_color_key(st, st.shadowcolor, v, diags, pos); return; }
    if (key == "showpoints") { parse_bool(v, st.showpoints); return; }
    if (key == "curvature") {
        auto parts = split_ws(v);
        double c[3];
        for (int i = 0; i < 3; ++i) {
            c[i] = i < static_cast<int>(parts.size())
                       ? checknum(parts[i], diags, pos)
                       : checknum("*", diags, pos);
        }
        st.curvature_a = c[0];
        st.curvature_b = c[1];
        st.curvature_c = c[2];
        return;
    }
    if (key == "gridwidth") { st.gridwidth = plain_len(); return; }
    if (key == "gridcolor") { set_color_key(st, st.gridcolor, v, diags, pos); return; }
    if (key == "griddots") {
        int n = 0;
        if (!parse_int(v, n)) diags.warning(pos, "Missing number or dimension. 0 substituted");
        st.griddots = n;
        return;
    }
    if (key == "subgridwidth") { st.subgridwidth = plain_len(); return; }
    if (key == "subgridcolor") { set_color_key(st, st.subgridcolor, v, diags, pos); return; }
    if (key == "subgriddots") {
        int n = 0;
        if (!parse_int(v, n)) diags.warning(pos, "Missing number or dimension. 0 substituted");
        st.subgriddots = n;
        return;
    }
    if (key == "subgriddiv") {
        int n = 0;
        if (!parse_int(v, n)) diags.warning(pos, "Missing number or dimension. 0 substituted");
        st.subgriddiv = n;
        return;
    }
    if (key == "gridlabels") { st.gridlabels = plain_len(); return; }
    if (key == "gridlabelcolor") { set_color_key(st, st.gridlabelcolor, v, diags, pos); return; }
    if (key == "radius") { st.radius = plain_len(); return; }
    if (key == "arcsep") {
        st.arcsepA = plain_len();
        st.arcsepB = st.arcsepA;
        return;
    }
    if (key == "arcsepA") { st.arcsepA = plain_len(); return; }
    if (key == "arcsepB") { st.arcsepB = plain_len(); return; }
    if (key == "origin") {
        Diagnostics scratch;
        syntax::RawCoord rc = syntax::parse_coord(v, scratch, pos);
        for (const auto& d : scratch.items()) diags.report(d.severity, d.pos, d.message);
        st.origin = resolve_coord(rc, st, diags);
        return;
    }
    if (key == "swapaxes") { parse_bool(v, st.swapaxes); return; }
    if (key == "liftpen") {
        if (!st.in_custom) return;  // a no-op outside \pscustom
        int n = 0;
        if (parse_int(v, n) && n >= 0 && n <= 2) st.liftpen = n;
        return;
    }
    if (key == "ref") {
        st.ref = RefSpec{};
        std::string t = trim(v);
        std::size_t sep = t.find(',');
        if (sep == std::string::npos) sep = t.find(' ');
        bool numeric = sep != std::string::npos &&
                       t.find_first_of("0123456789.") != std::string::npos &&
                       !std::isalpha(static_cast<unsigned char>(t[0]));
        if (numeric) {
            st.ref.xref = checknum(trim(std::string_view(t).substr(0, sep)), diags, pos);
            st.ref.yref = checknum(trim(std::string_view(t).substr(sep + 1)), diags, pos);
            return;
        }
        for (char c : t) {
            switch (c) {
                case 'l': st.ref.xref = 0.0; break;
                case 'r': st.ref.xref = 1.0; break;
                case 't': st.ref.yref = 1.0; break;
                case 'b': st.ref.yref = 0.0; break;
                case 'B': st.ref.baseline = true; break;
                case 'c': break;  // center is the reset value
                default: break;   // unknown letters fall through, as the engine does
            }
        }
        return;
    }
    if (key == "rot") {
        std::string t = trim(v);
        st.rot = RotSpec{};
        bool star = !t.empty() && t[0] == '*';
        if (star) t = trim(std::string_view(t).substr(1));
        double base = 0.0;
        bool neg_acc = star;
        if (t == "U" || t == "0" || t.empty()) base = 0;
        else if (t == "L") base = 90;
        else if (t == "D") base = 180;
        else if (t == "R") base = -90;
        else if (t == "N") { neg_acc = true; base = 0; }
        else if (t == "W") { neg_acc = true; base = 90; }
        else if (t == "S") { neg_acc = true; base = 180; }
        else if (t == "E") { neg_acc = true; base = -90; }
        else base = resolve_angle_text(t, st, diags, pos);
        st.rot.neg_acc = neg_acc;
        st.rot.angle = base;
        return;
    }
    if (key == "refangle") {
        std::string t = trim(v);
        struct Entry { const char* name; double deg; const char* code; };
        static const Entry table[] = {
            {"r", 0, "20"}, {"u", 90, "02"}, {"l", 180, "10"}, {"d", -90, "01"},
            {"ur", 45, "22"}, {"ul", 135, "12"}, {"dr", -135, "21"}, {"dl", -45, "11"},
        };
        for (const auto& e : table) {
            if (t == e.name) {
                st.refangle = e.deg;
                st.uputref = e.code;
                return;
            }
        }
        st.refangle = resolve_angle_text(t, st, diags, pos);
        st.uputref.clear();
        return;
    }
    if (key == "labelsep") { st.labelsep = plain_len(); return; }
    if (key == "shift") { st.shift = plain_len(); return; }
    if (key == "gangle") { st.gangle = angle(); return; }
    if (key == "trimode") {
        std::string t = trim(v);
        st.trimode_star = !t.empty() && t[0] == '*';
        if (st.trimode_star) t = t.substr(1);
        char c = t.empty() ? 'U' : t[0];
        st.trimode = c == 'R' ? 1 : c == 'D' ? 2 : c == 'L' ? 3 : 0;
        return;
    }
    if (key == "showgrid") { parse_bool(v, st.showgrid); return; }
    if (key == "PstDebug") {
        int n = 0;
        parse_int(v, n);
        st.pst_debug = n;
        return;
    }
    diags.warning(pos, "Graphics parameter `" + key + "' not defined.");
}

}  // namespace detail

inline void apply_keyvals(GraphicsState& st, const std::vector<syntax::KeyVal>& pairs,
                          Diagnostics& diags) {
    for (const auto& kv : pairs) detail::apply_one(st, kv.key, kv.value, diags, kv.pos);
}

// Directives outside the keyval registry.
inline void apply_directive(GraphicsState& st, const syntax::Cmd& cmd, Diagnostics& diags) {
    if (cmd.name == "SpecialCoor") st.mode.special_coor = true;
    else if (cmd.name == "NormalCoor") st.mode.special_coor = false;
    else if (cmd.name == "Polar") st.mode.polar_default = true;
    else if (cmd.name == "Cartesian") {
        st.mode.polar_default = false;
        if (!cmd.coords.empty()) {
            const auto& rc = cmd.coords[0];
            st.units.xunit = resolve_length(rc.a, st.units.xunit, diags, cmd.pos);
            st.units.yunit = resolve_length(rc.b, st.units.yunit, diags, cmd.pos);
        }
    } else if (cmd.name == "degrees") {
        if (cmd.scalar_args.empty()) {
            st.mode.angle_factor = 1.0;
        } else {
            double n = checknum(cmd.scalar_args[0], diags, cmd.pos);
            st.mode.angle_factor = n == 0.0 ? 1.0 : 360.0 / n;
        }
    } else if (cmd.name == "radians") {
        st.mode.angle_factor = 57.2956;
    } else if (cmd.name == "newgray") {
        define_color(st, cmd.scalar_args[0], ColorRef::Model::Gray, cmd.scalar_args[1], diags, cmd.pos);
    } else if (cmd.name == "newrgbcolor") {
        define_color(st, cmd.scalar_args[0], ColorRef::Model::Rgb, cmd.scalar_args[1], diags, cmd.pos);
    } else if (cmd.name == "newhsbcolor") {
        define_color(st, cmd.scalar_args[0], ColorRef::Model::Hsb, cmd.scalar_args[1], diags, cmd.pos);
    } else if (cmd.name == "newcmykcolor") {
        define_color(st, cmd.scalar_args[0], ColorRef::Model::Cmyk, cmd.scalar_args[1], diags, cmd.pos);
    } else if (cmd.name == "newpsstyle") {
        define_style(st, cmd.scalar_args[0], cmd.scalar_args[1]);
    } else if (cmd.name == "psset") {
        Diagnostics scratch;
        auto pairs = syntax::parse_keyvals(cmd.scalar_args[0], scratch, cmd.pos);
        for (const auto& d : scratch.items()) diags.report(d.severity, d.pos, d.message);
        apply_keyvals(st, pairs, diags);
    }
}

inline bool is_directive(std::string_view name) {
    return name == "SpecialCoor" || name == "NormalCoor" || name == "Polar" ||
           name == "Cartesian" || name == "degrees" || name == "radians" ||
           name == "newgray" || name == "newrgbcolor" || name == "newhsbcolor" ||
           name == "newcmykcolor" || name == "newpsstyle" || name == "psset";
}

}  // namespace picoforge::state

#endif
