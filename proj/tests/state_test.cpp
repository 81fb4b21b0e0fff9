#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "picoforge/state.hpp"

using namespace picoforge;
using namespace picoforge::state;

static std::vector<syntax::KeyVal> kv(const std::string& raw) {
    Diagnostics d;
    return syntax::parse_keyvals(raw, d);
}

TEST_CASE("defaults snapshot matches the documented table") {
    GraphicsState s;
    CHECK(s.units.unit == kCm);
    CHECK(s.units.xunit == kCm);
    CHECK(s.units.yunit == kCm);
    CHECK(s.units.runit() == kCm);
    CHECK(s.linewidth == 52429);       // .8pt
    CHECK(s.linecolor == "black");
    CHECK(s.linestyle == LineStyle::Solid);
    CHECK(s.dash == std::array<Sp, 4>{327680, 196608, 0, 0});
    CHECK(s.dashadjust == true);
    CHECK(s.dotsep == 196608);         // 3pt
    CHECK(s.linecap == 0);
    CHECK(s.linearc == 0);
    CHECK(s.fillcolor == "white");
    CHECK(s.fillstyle == FillStyle::None);
    CHECK(s.extra_fillstyles.empty());
    CHECK(s.hatchwidth == 52429);      // .8pt
    CHECK(s.hatchsep == 262144);       // 4pt
    CHECK(s.hatchcolor == "black");
    CHECK(s.hatchangle == 45.0);
    CHECK(s.hatchwidthinc == 0);
    CHECK(s.hatchsepinc == 0);
    CHECK(s.arrows == ArrowPair{});
    CHECK(s.arrowsize_dim == 98304);   // 1.5pt
    CHECK(s.arrowsize_num == 2.0);
    CHECK(s.arrowlength == 1.4);
    CHECK(s.arrowinset == 0.4);
    CHECK(s.arrowscale_x == 1.0);
    CHECK(s.arrowscale_y == 1.0);
    CHECK(s.tbarsize_dim == 131072);   // 2pt
    CHECK(s.tbarsize_num == 5.0);
    CHECK(s.bracketlength == 0.15);
    CHECK(s.rbracketlength == 0.15);
    CHECK(s.dotsize_dim == 131072);    // 2pt
    CHECK(s.dotsize_num == 2.0);
    CHECK(s.dotstyle == "*");
    CHECK(s.dotscale_x == 1.0);
    CHECK(s.dotscale_y == 1.0);
    CHECK(s.dotangle == 0.0);
    CHECK(s.framearc == 0.0);
    CHECK(s.cornersize_absolute == false);
    CHECK(s.dimen_k == 0.5);           // outer
    CHECK(s.framesep == 196608);       // 3pt
    CHECK(s.boxsep == true);
    CHECK(s.border == 0);
    CHECK(s.bordercolor == "white");
    CHECK(s.doubleline == false);
    CHECK(s.doublesep.absolute == false);
    CHECK(s.doublesep.factor.format() == "1.25");
    CHECK(s.doublecolor == "white");
    CHECK(s.shadow == false);
    CHECK(s.shadowsize == 196608);     // 3pt
    CHECK(s.shadowangle == -45.0);
    CHECK(s.shadowcolor == "darkgray");
    CHECK(s.showpoints == false);
    CHECK(s.curvature_a == 1.0);
    CHECK(s.curvature_b == 0.1);
    CHECK(s.curvature_c == 0.0);
    CHECK(s.gridwidth == 52429);       // .8pt
    CHECK(s.gridcolor == "black");
    CHECK(s.griddots == 0);
    CHECK(s.subgridwidth == 26214);    // .4pt
    CHECK(s.subgridcolor == "gray");
    CHECK(s.subgriddots == 0);
    CHECK(s.subgriddiv == 5);
    CHECK(s.gridlabels == 655360);     // 10pt
    CHECK(s.gridlabelcolor == "black");
    CHECK(s.radius == 466170);         // .25cm
    CHECK(s.arcsepA == 0);
    CHECK(s.arcsepB == 0);
    CHECK_FALSE(s.origin.has_value());
    CHECK(s.swapaxes == false);
    CHECK(s.liftpen == 0);
    CHECK(s.linetype == 2);
    CHECK(s.ref == RefSpec{});
    CHECK(s.rot == RotSpec{});
    CHECK(s.refangle == 0.0);
    CHECK(s.labelsep == 327680);       // 5pt
    CHECK(s.shift == 0);
    CHECK(s.gangle == 0.0);
    CHECK(s.trimode == 0);
    CHECK(s.trimode_star == false);
    CHECK(s.showgrid == false);
    CHECK(s.pst_debug == 0);
    CHECK(s.mode.special_coor == false);
    CHECK(s.mode.polar_default == false);
    CHECK(s.mode.angle_factor == 1.0);
}

TEST_CASE("predefined color table") {
    GraphicsState s;
    CHECK(s.colors.size() == 11);
    CHECK(s.rgb_of("black") == Rgb{0, 0, 0});
    CHECK(s.rgb_of("darkgray") == Rgb{.25, .25, .25});
    CHECK(s.rgb_of("gray") == Rgb{.5, .5, .5});
    CHECK(s.rgb_of("lightgray") == Rgb{.75, .75, .75});
    CHECK(s.rgb_of("white") == Rgb{1, 1, 1});
    CHECK(s.rgb_of("red") == Rgb{1, 0, 0});
    CHECK(s.rgb_of("green") == Rgb{0, 1, 0});
    CHECK(s.rgb_of("blue") == Rgb{0, 0, 1});
    CHECK(s.rgb_of("yellow") == Rgb{1, 1, 0});
    CHECK(s.rgb_of("cyan") == Rgb{0, 1, 1});
    CHECK(s.rgb_of("magenta") == Rgb{1, 0, 1});
}

TEST_CASE("color conversions") {
    ColorRef hsb;
    hsb.model = ColorRef::Model::Hsb;
    hsb.comp = {0, 1, 1, 0};
    CHECK(to_rgb(hsb) == Rgb{1, 0, 0});
    hsb.comp = {1.0 / 3.0, 1, 1, 0};
    Rgb g = to_rgb(hsb);
    CHECK(g.r == Catch::Approx(0.0).margin(1e-9));
    CHECK(g.g == 1.0);
    ColorRef cmyk;
    cmyk.model = ColorRef::Model::Cmyk;
    cmyk.comp = {1, 0, 0, 0};
    CHECK(to_rgb(cmyk) == Rgb{0, 1, 1});
    cmyk.comp = {0, 0, 0, 0.5};
    CHECK(to_rgb(cmyk) == Rgb{0.5, 0.5, 0.5});
}

TEST_CASE("undefined color keeps previous and reports") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("linecolor=puce"), d);
    CHECK(s.linecolor == "black");
    CHECK(d.contains("Color `puce' not defined"));
}

TEST_CASE("linecap guard") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("linecap=2"), d);
    CHECK(s.linecap == 2);
    apply_keyvals(s, kv("linecap=5"), d);
    CHECK(s.linecap == 0);
    apply_keyvals(s, kv("linecap=-1"), d);
    CHECK(s.linecap == 0);
}

TEST_CASE("linetype guard") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("linetype=-2"), d);
    CHECK(s.linetype == -2);
    CHECK(d.empty());
    apply_keyvals(s, kv("linetype=-4"), d);
    CHECK(s.linetype == 2);
    CHECK(d.contains("linetype must be greater than -3"));
}

TEST_CASE("style expansion") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("style=gridstyle"), d);
    CHECK(s.subgriddiv == 0);
    CHECK(s.gridcolor == "lightgray");
    CHECK(s.griddots == 10);
    CHECK(s.gridlabels == parse_length("8pt", 0).value());
    CHECK(d.empty());
    apply_keyvals(s, kv("style=nostyle"), d);
    CHECK(d.contains("Custom style `nostyle' undefined"));
}

TEST_CASE("apply_keyvals is left to right") {
    GraphicsState a, b;
    Diagnostics d;
    apply_keyvals(a, kv("linewidth=1pt,linewidth=2pt"), d);
    apply_keyvals(b, kv("linewidth=2pt"), d);
    CHECK(a.linewidth == b.linewidth);
}

TEST_CASE("unit mirrors into x and y") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("unit=1pt"), d);
    CHECK(s.units.unit == 65536);
    CHECK(s.units.xunit == 65536);
    CHECK(s.units.yunit == 65536);
    apply_keyvals(s, kv("xunit=2pt"), d);
    CHECK(s.units.xunit == 131072);
    CHECK(s.units.unit == 65536);
}

TEST_CASE("dash entry count behavior") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("dash=2pt 1pt"), d);
    CHECK(s.dash == std::array<Sp, 4>{131072, 65536, 0, 0});
    CHECK(d.empty());
    Diagnostics d2;
    apply_keyvals(s, kv("dash=2pt"), d2);
    CHECK(s.dash == std::array<Sp, 4>{131072, 0, 0, 0});
    CHECK(d2.contains("Missing number or dimension. 0 substituted"));
}

TEST_CASE("arrowsize with one value zeroes the multiplier") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("arrowsize=3pt"), d);
    CHECK(s.arrowsize_dim == 3 * 65536);
    CHECK(s.arrowsize_num == 0.0);
    apply_keyvals(s, kv("arrowsize=1pt 3"), d);
    CHECK(s.arrowsize_num == 3.0);
}

TEST_CASE("arrowscale accepts one or two factors") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("arrowscale=2"), d);
    CHECK(s.arrowscale_x == 2.0);
    CHECK(s.arrowscale_y == 2.0);
    apply_keyvals(s, kv("arrowscale=2 3"), d);
    CHECK(s.arrowscale_x == 2.0);
    CHECK(s.arrowscale_y == 3.0);
    apply_keyvals(s, kv("arrowscale=0"), d);
    CHECK(s.arrowscale_x == 1.0);
    CHECK(d.contains("Bad scaling argument `0'"));
}

TEST_CASE("arrow pair table resolves every base and extension entry") {
    Diagnostics d;
    struct Case { const char* spec; ArrowKind a, b; };
    const Case cases[] = {
        {"<->", ArrowKind::Head, ArrowKind::Head},
        {"<<->>", ArrowKind::DoubleHead, ArrowKind::DoubleHead},
        {">-<", ArrowKind::RevHead, ArrowKind::RevHead},
        {">>-<<", ArrowKind::DoubleRevHead, ArrowKind::DoubleRevHead},
        {"(-)", ArrowKind::RoundBracket, ArrowKind::RoundBracket},
        {"[-]", ArrowKind::Bracket, ArrowKind::Bracket},
        {")-(", ArrowKind::RoundBracketOut, ArrowKind::RoundBracketOut},
        {"]-[", ArrowKind::BracketOut, ArrowKind::BracketOut},
        {"|>-<|", ArrowKind::TBarHead, ArrowKind::TBarHead},
        {"|<*->|*", ArrowKind::HeadTBarCentered, ArrowKind::HeadTBarCentered},
        {"|<->|", ArrowKind::HeadTBar, ArrowKind::HeadTBar},
        {"-", ArrowKind::None, ArrowKind::None},
        {"<-", ArrowKind::Head, ArrowKind::None},
        {"->|", ArrowKind::None, ArrowKind::HeadTBar},
        {"|*-o", ArrowKind::TBarCentered, ArrowKind::CircleEnd},
        {"*-**", ArrowKind::DiskEnd, ArrowKind::DiskCenteredEnd},
        {"c-C", ArrowKind::CapRound, ArrowKind::CapSquare},
        {"cc-oo", ArrowKind::CapRoundFlush, ArrowKind::CircleCenteredEnd},
    };
    for (const auto& c : cases) {
        ArrowPair p = resolve_arrows(c.spec, d);
        INFO(c.spec);
        CHECK(p.start == c.a);
        CHECK(p.end == c.b);
    }
    CHECK(d.empty());

    ArrowPair bad = resolve_arrows("x-y", d);
    CHECK(bad == ArrowPair{});
    CHECK(d.contains("Bad arrows specification: x-y"));
    Diagnostics d2;
    resolve_arrows("<", d2);
    CHECK(d2.contains("Bad arrows specification"));
}

TEST_CASE("mirrored arrow specs swap kinds") {
    // resolving "A-B" and the mirrored "B'-A'" yields swapped kinds
    const char* specs[] = {"<->", "<<->>", ">-<", "(-)", "[-]", "|>-<|", "|<->|"};
    const char* mirrors[] = {"<->", "<<->>", ">-<", "(-)", "[-]", "|>-<|", "|<->|"};
    Diagnostics d;
    for (std::size_t i = 0; i < std::size(specs); ++i) {
        ArrowPair p = resolve_arrows(specs[i], d);
        ArrowPair m = resolve_arrows(mirrors[i], d);
        CHECK(p.start == m.end);
        CHECK(p.end == m.start);
    }
}

TEST_CASE("resolve_coord cartesian, polar, mixed, raw") {
    GraphicsState s;
    s.mode.special_coor = true;
    Diagnostics d;

    auto parse1 = [&](const char* t) { return syntax::parse_coord(t, d); };

    auto [x0, y0] = resolve_coord(parse1("0,0"), s, d);
    CHECK(x0 == 0);
    CHECK(y0 == 0);

    // (2;60) with unit 1cm: x = 1cm, y = sqrt(3) cm, within 1 sp
    auto [xp, yp] = resolve_coord(parse1("2;60"), s, d);
    CHECK(std::llabs(xp - kCm) <= 1);
    CHECK(std::llabs(yp - static_cast<Sp>(std::llround(std::sqrt(3.0) * kCm))) <= 1);

    auto [xm, ym] = resolve_coord(parse1("1,2|3,4"), s, d);
    CHECK(xm == 1 * kCm);
    CHECK(ym == 4 * kCm);

    auto [xr, yr] = resolve_coord(parse1("!2 1"), s, d);
    CHECK(xr == 2 * kCm);
    CHECK(yr == 1 * kCm);
    CHECK(d.empty());
}

TEST_CASE("polar coord at angle 0 equals cartesian x") {
    GraphicsState s;
    s.mode.special_coor = true;
    Diagnostics d;
    for (const char* r : {"1", "2.5", "0.125", "3.75"}) {
        auto pc = syntax::parse_coord(std::string(r) + ";0", d);
        auto cc = syntax::parse_coord(std::string(r) + ",0", d);
        auto [xp, yp] = resolve_coord(pc, s, d);
        auto [xc, yc] = resolve_coord(cc, s, d);
        CHECK(std::llabs(xp - xc) <= 1);
        CHECK(yp == 0);
        CHECK(yc == 0);
    }
}

TEST_CASE("special grammar requires SpecialCoor") {
    GraphicsState s;
    Diagnostics d;
    auto pc = syntax::parse_coord("2;60", d);
    CHECK(d.empty());
    auto [x, y] = resolve_coord(pc, s, d);
    CHECK(x == 0);
    CHECK(y == 0);
    CHECK(d.error_count() + d.warning_count() > 0);
}

TEST_CASE("Polar mode turns plain pairs polar") {
    GraphicsState s;
    Diagnostics d;
    s.mode.polar_default = true;
    auto cc = syntax::parse_coord("2,90", d);
    auto [x, y] = resolve_coord(cc, s, d);
    CHECK(std::llabs(x) <= 1);
    CHECK(std::llabs(y - 2 * kCm) <= 1);
}

TEST_CASE("resolve_angle numeric, radians, direction") {
    GraphicsState s;
    Diagnostics d;
    syntax::RawAngle ninety = syntax::parse_angle("90", d);
    CHECK(resolve_angle(ninety, s, d) == 90.0);

    s.mode.angle_factor = 57.2956;  // \radians
    syntax::RawAngle rad = syntax::parse_angle("1.5708", d);
    CHECK(resolve_angle(rad, s, d) == Catch::Approx(90.0003).margin(1e-3));

    s.mode.angle_factor = 1.0;
    s.mode.special_coor = true;
    syntax::RawAngle dir = syntax::parse_angle("(1,1)", d);
    CHECK(resolve_angle(dir, s, d) == Catch::Approx(45.0));
    CHECK(d.empty());

    syntax::RawAngle bad = syntax::parse_angle("x9", d);
    CHECK(resolve_angle(bad, s, d) == 0.0);
    CHECK(d.contains("Bad number: `x9'. 0 substituted."));
}

TEST_CASE("degrees directive scales angles") {
    GraphicsState s;
    Diagnostics d;
    syntax::Cmd cmd;
    cmd.name = "degrees";
    cmd.scalar_args.push_back("100");
    apply_directive(s, cmd, d);
    CHECK(s.mode.angle_factor == Catch::Approx(3.6));
    syntax::RawAngle a = syntax::parse_angle("25", d);
    CHECK(resolve_angle(a, s, d) == Catch::Approx(90.0));
}

TEST_CASE("doublesep tracks linewidth unless absolute") {
    GraphicsState s;
    Diagnostics d;
    CHECK(s.doublesep.resolve(s.linewidth) == 65536);  // 1.25 * .8pt = 1pt
    apply_keyvals(s, kv("linewidth=2pt"), d);
    CHECK(s.doublesep.resolve(s.linewidth) == 163840);  // 2.5pt
    apply_keyvals(s, kv("doublesep=0.5pt"), d);
    CHECK(s.doublesep.resolve(s.linewidth) == 32768);
    apply_keyvals(s, kv("doublesep=2\\pslinewidth"), d);
    CHECK(s.doublesep.resolve(s.linewidth) == 4 * 65536);
}

TEST_CASE("ref parsing") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("ref=lB"), d);
    CHECK(s.ref.xref == 0.0);
    CHECK(s.ref.baseline);
    apply_keyvals(s, kv("ref=rt"), d);
    CHECK(s.ref.xref == 1.0);
    CHECK(s.ref.yref == 1.0);
    CHECK_FALSE(s.ref.baseline);
    apply_keyvals(s, kv("ref={.25,1}"), d);
    CHECK(s.ref.xref == 0.25);
    CHECK(s.ref.yref == 1.0);
    apply_keyvals(s, kv("ref=c"), d);
    CHECK(s.ref == RefSpec{});
}

TEST_CASE("rot named values and star reset") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("rot=L"), d);
    CHECK(s.rot == RotSpec{false, 90.0});
    apply_keyvals(s, kv("rot=R"), d);
    CHECK(s.rot == RotSpec{false, -90.0});
    apply_keyvals(s, kv("rot=N"), d);
    CHECK(s.rot.neg_acc);
    CHECK(s.rot.resolve(30.0) == -30.0);
    apply_keyvals(s, kv("rot=W"), d);
    CHECK(s.rot.resolve(30.0) == 60.0);
    apply_keyvals(s, kv("rot={*45}"), d);
    CHECK(s.rot.neg_acc);
    CHECK(s.rot.resolve(30.0) == 15.0);
    apply_keyvals(s, kv("rot=30"), d);
    CHECK(s.rot == RotSpec{false, 30.0});
}

TEST_CASE("refangle table") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("refangle=ur"), d);
    CHECK(s.refangle == 45.0);
    CHECK(s.uputref == "22");
    apply_keyvals(s, kv("refangle=30"), d);
    CHECK(s.refangle == 30.0);
    CHECK(s.uputref.empty());
}

TEST_CASE("new colors and liftpen scoping") {
    GraphicsState s;
    Diagnostics d;
    define_color(s, "mycol", ColorRef::Model::Rgb, "0 .8 .2", d);
    CHECK(s.rgb_of("mycol") == Rgb{0, .8, .2});
    apply_keyvals(s, kv("liftpen=2"), d);
    CHECK(s.liftpen == 0);  // outside \pscustom the key is inert
    s.in_custom = true;
    apply_keyvals(s, kv("liftpen=2"), d);
    CHECK(s.liftpen == 2);
    apply_keyvals(s, kv("liftpen=7"), d);
    CHECK(s.liftpen == 2);  // out-of-range values fall through
}

TEST_CASE("unknown key reports and skips") {
    GraphicsState s;
    Diagnostics d;
    apply_keyvals(s, kv("nokey=5"), d);
    CHECK(d.contains("Graphics parameter `nokey' not defined."));
}
