#ifndef PICOFORGE_SYNTAX_HPP
#define PICOFORGE_SYNTAX_HPP

// Lexer and parser for the picture language. Produces an Ast of commands
// with raw (unresolved) parameter, arrow, coordinate and argument
// payloads; resolution against the graphics state happens later.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "picoforge/diagnostics.hpp"

namespace picoforge::syntax {

// ---------------------------------------------------------------------------
// Tokens

enum class TokKind { Command, Star, BracketGroup, ParenGroup, BraceGroup, Word };

struct Token {
    TokKind kind;
    std::string text;  // command name without backslash, group content, or word
    SourcePos pos;
};

namespace detail {

struct Cursor {
    std::string_view src;
    std::size_t i = 0;
    int line = 1;
    int col = 1;

    bool done() const { return i >= src.size(); }
    char peek() const { return src[i]; }
    char get() {
        char c = src[i++];
        if (c == '\n') { ++line; col = 1; } else { ++col; }
        return c;
    }
    SourcePos pos() const { return SourcePos{line, col}; }
};

// Scans a balanced group. `open` was already consumed. Brace nesting
// protects the closing delimiter; % comments are skipped; \X escapes are
// kept verbatim.
inline bool scan_group(Cursor& c, char open, char close, std::string& out,
                       Diagnostics& diags, SourcePos start) {
    int brace_depth = 0;
    int same_depth = 0;
    while (!c.done()) {
        char ch = c.peek();
        if (ch == '%') {
            while (!c.done() && c.peek() != '\n') c.get();
            continue;
        }
        if (ch == '\\') {
            out += c.get();
            if (!c.done()) out += c.get();
            continue;
        }
        if (ch == '{') { ++brace_depth; out += c.get(); continue; }
        if (ch == '}') {
            if (brace_depth == 0 && close == '}') { c.get(); return true; }
            --brace_depth;
            out += c.get();
            continue;
        }
        if (brace_depth == 0) {
            if (ch == close) {
                if (same_depth == 0) { c.get(); return true; }
                --same_depth;
            } else if (ch == open && open != '{') {
                ++same_depth;
            }
        }
        out += c.get();
    }
    diags.error(start, std::string("unbalanced `") + open + "'");
    return false;
}

}  // namespace detail

inline std::vector<Token> tokenize(std::string_view src, Diagnostics& diags) {
    std::vector<Token> out;
    detail::Cursor c{src};
    while (!c.done()) {
        char ch = c.peek();
        if (ch == '%') {
            while (!c.done() && c.peek() != '\n') c.get();
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') { c.get(); continue; }
        SourcePos pos = c.pos();
        if (ch == '\\') {
            c.get();
            std::string name;
            while (!c.done() && (std::isalpha(static_cast<unsigned char>(c.peek())) || c.peek() == '@'))
                name += c.get();
            if (name.empty() && !c.done()) name += c.get();  // control symbol like \%
            out.push_back(Token{TokKind::Command, name, pos});
            continue;
        }
        if (ch == '*') { c.get(); out.push_back(Token{TokKind::Star, "*", pos}); continue; }
        if (ch == '[' || ch == '(' || ch == '{') {
            c.get();
            char close = ch == '[' ? ']' : ch == '(' ? ')' : '}';
            std::string content;
            if (detail::scan_group(c, ch, close, content, diags, pos)) {
                TokKind k = ch == '[' ? TokKind::BracketGroup
                          : ch == '(' ? TokKind::ParenGroup
                                      : TokKind::BraceGroup;
                out.push_back(Token{k, content, pos});
            }
            continue;
        }
        if (ch == ']' || ch == ')' || ch == '}') {
            diags.error(pos, std::string("unbalanced `") + ch + "'");
            c.get();
            continue;
        }
        std::string word;
        while (!c.done()) {
            char w = c.peek();
            if (w == '\\' || w == '%' || w == '*' || w == '[' || w == ']' || w == '(' ||
                w == ')' || w == '{' || w == '}' || w == ' ' || w == '\t' || w == '\n' ||
                w == '\r')
                break;
            word += c.get();
        }
        out.push_back(Token{TokKind::Word, word, pos});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Raw payloads

struct RawCoord {
    enum class Kind { Cartesian, Polar, Mixed, Raw, Invalid };
    Kind kind = Kind::Cartesian;
    std::string a, b;           // x,y / r,angle / raw x,y
    std::vector<RawCoord> sub;  // Mixed: [left, right]
    std::string text;           // verbatim payload
    SourcePos pos;

    bool operator==(const RawCoord& o) const {
        return kind == o.kind && a == o.a && b == o.b && sub == o.sub;
    }
};

struct RawAngle {
    enum class Kind { Numeric, Direction };
    Kind kind = Kind::Numeric;
    std::string value;          // numeric text
    std::vector<RawCoord> coord;  // Direction: one entry
    bool operator==(const RawAngle& o) const {
        return kind == o.kind && value == o.value && coord == o.coord;
    }
};

struct KeyVal {
    std::string key;
    std::string value;
    SourcePos pos;
    bool operator==(const KeyVal& o) const { return key == o.key && value == o.value; }
};

/// Splits "k=v,k=v,..." respecting braces; braces around a value are
/// stripped exactly once. Entries without '=' get a diagnostic.
inline std::vector<KeyVal> parse_keyvals(std::string_view raw, Diagnostics& diags,
                                         SourcePos pos = {}) {
    std::vector<KeyVal> out;
    std::size_t i = 0, n = raw.size();
    while (i <= n) {
        int depth = 0;
        std::size_t start = i;
        while (i < n && (raw[i] != ',' || depth > 0)) {
            if (raw[i] == '{') ++depth;
            else if (raw[i] == '}') --depth;
            ++i;
        }
        std::string_view entry = raw.substr(start, i - start);
        ++i;
        // trim
        std::size_t b = 0, e = entry.size();
        while (b < e && std::isspace(static_cast<unsigned char>(entry[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(entry[e - 1]))) --e;
        entry = entry.substr(b, e - b);
        if (entry.empty()) {
            if (start >= n) break;
            continue;
        }
        std::size_t eq = std::string_view::npos;
        depth = 0;
        for (std::size_t k = 0; k < entry.size(); ++k) {
            if (entry[k] == '{') ++depth;
            else if (entry[k] == '}') --depth;
            else if (entry[k] == '=' && depth == 0) { eq = k; break; }
        }
        if (eq == std::string_view::npos) {
            diags.warning(pos, "Graphics parameter `" + std::string(entry) + "' not defined.");
            continue;
        }
        std::string key(entry.substr(0, eq));
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        std::string_view val = entry.substr(eq + 1);
        // a second unbraced '=' ends the value, as the engine's pattern does
        depth = 0;
        for (std::size_t k = 0; k < val.size(); ++k) {
            if (val[k] == '{') ++depth;
            else if (val[k] == '}') --depth;
            else if (val[k] == '=' && depth == 0) { val = val.substr(0, k); break; }
        }
        b = 0; e = val.size();
        while (b < e && std::isspace(static_cast<unsigned char>(val[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(val[e - 1]))) --e;
        val = val.substr(b, e - b);
        std::string value;
        if (val.size() >= 2 && val.front() == '{' && val.back() == '}')
            value = std::string(val.substr(1, val.size() - 2));  // strip once
        else
            value = std::string(val);
        out.push_back(KeyVal{std::move(key), std::move(value), pos});
    }
    return out;
}

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline RawCoord parse_coord_nomix(std::string_view text, Diagnostics& diags, SourcePos pos);

}  // namespace detail

/// Classifies a coordinate payload: `a|b` mixed, leading `!` raw, `r;a`
/// polar, otherwise cartesian `x,y`. Node-name coordinates are rejected
/// with the companion-package message.
inline RawCoord parse_coord(std::string_view text, Diagnostics& diags, SourcePos pos = {}) {
    RawCoord rc;
    rc.text = std::string(text);
    rc.pos = pos;
    std::string t = detail::trim(text);
    std::size_t bar = t.find('|');
    if (bar != std::string::npos) {
        if (t.find('|', bar + 1) != std::string::npos) {
            diags.error(pos, "bad coordinate: `" + t + "'");
            rc.kind = RawCoord::Kind::Invalid;
            return rc;
        }
        rc.kind = RawCoord::Kind::Mixed;
        rc.sub.push_back(detail::parse_coord_nomix(t.substr(0, bar), diags, pos));
        rc.sub.push_back(detail::parse_coord_nomix(t.substr(bar + 1), diags, pos));
        return rc;
    }
    return detail::parse_coord_nomix(t, diags, pos);
}

namespace detail {

inline RawCoord parse_coord_nomix(std::string_view text, Diagnostics& diags, SourcePos pos) {
    RawCoord rc;
    rc.text = std::string(text);
    rc.pos = pos;
    std::string t = trim(text);
    if (t.empty()) {
        diags.error(pos, "empty coordinate");
        rc.kind = RawCoord::Kind::Invalid;
        return rc;
    }
    if (t[0] == '!') {
        // raw form: exactly two literal numbers scaled by the unit registers
        std::string rest = trim(std::string_view(t).substr(1));
        std::size_t sp = rest.find_first_of(" \t");
        if (sp == std::string::npos) {
            diags.error(pos, "unsupported raw coordinate: `" + t + "'");
            rc.kind = RawCoord::Kind::Invalid;
            return rc;
        }
        std::string x = trim(std::string_view(rest).substr(0, sp));
        std::string y = trim(std::string_view(rest).substr(sp + 1));
        if (x.empty() || y.empty() || y.find_first_of(" \t") != std::string::npos) {
            diags.error(pos, "unsupported raw coordinate: `" + t + "'");
            rc.kind = RawCoord::Kind::Invalid;
            return rc;
        }
        rc.kind = RawCoord::Kind::Raw;
        rc.a = x;
        rc.b = y;
        return rc;
    }
    if (std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '[') {
        diags.error(pos, "You must load `pst-node.tex' to use node coordinates.");
        rc.kind = RawCoord::Kind::Invalid;
        return rc;
    }
    std::size_t semi = t.find(';');
    if (semi != std::string::npos) {
        if (t.find(';', semi + 1) != std::string::npos) {
            diags.error(pos, "bad coordinate: `" + t + "'");
            rc.kind = RawCoord::Kind::Invalid;
            return rc;
        }
        rc.kind = RawCoord::Kind::Polar;
        rc.a = trim(std::string_view(t).substr(0, semi));
        rc.b = trim(std::string_view(t).substr(semi + 1));
        return rc;
    }
    std::size_t comma = t.find(',');
    if (comma == std::string::npos) {
        diags.error(pos, "one-component coordinate: `" + t + "'");
        rc.kind = RawCoord::Kind::Invalid;
        return rc;
    }
    rc.kind = RawCoord::Kind::Cartesian;
    rc.a = trim(std::string_view(t).substr(0, comma));
    std::string rest = trim(std::string_view(t).substr(comma + 1));
    std::size_t comma2 = rest.find(',');
    if (comma2 != std::string::npos) rest = trim(std::string_view(rest).substr(0, comma2));
    rc.b = rest;
    return rc;
}

}  // namespace detail

/// `(x,y)` inside an angle slot is a direction; `!v` is a raw numeric;
/// anything else is numeric text.
inline RawAngle parse_angle(std::string_view text, Diagnostics& diags, SourcePos pos = {}) {
    RawAngle ra;
    std::string t = detail::trim(text);
    if (!t.empty() && t[0] == '(') {
        std::size_t close = t.rfind(')');
        std::string inner = close == std::string::npos ? t.substr(1)
                                                       : t.substr(1, close - 1);
        ra.kind = RawAngle::Kind::Direction;
        ra.coord.push_back(parse_coord(inner, diags, pos));
        return ra;
    }
    if (!t.empty() && t[0] == '!') t = detail::trim(std::string_view(t).substr(1));
    ra.kind = RawAngle::Kind::Numeric;
    ra.value = t;
    return ra;
}

// ---------------------------------------------------------------------------
// Ast

struct Cmd;

struct Ast {
    std::vector<Cmd> items;
    bool operator==(const Ast& o) const;
};

struct Cmd {
    std::string name;  // command name; "@text" holds a literal text run
    bool starred = false;
    std::vector<KeyVal> params;
    std::optional<std::string> arrow_spec;
    std::vector<RawCoord> coords;
    std::vector<std::string> scalar_args;
    std::vector<Ast> bodies;
    std::string text;  // payload of "@text"
    SourcePos pos;

    bool operator==(const Cmd& o) const {
        return name == o.name && starred == o.starred && params == o.params &&
               arrow_spec == o.arrow_spec && coords == o.coords &&
               scalar_args == o.scalar_args && bodies == o.bodies && text == o.text;
    }
};

inline bool Ast::operator==(const Ast& o) const { return items == o.items; }

// ---------------------------------------------------------------------------
// Command shapes

enum class BodyKind { None, Label, Graphics, Custom };

struct CmdShape {
    bool allow_star = false;
    bool takes_par = false;
    bool takes_arrows = false;
    int min_coords = 0;
    int max_coords = 0;          // -1: unlimited
    bool optional_first_coord = false;  // missing first coordinate becomes (0,0)
    int num_scalars = 0;
    BodyKind body = BodyKind::None;
    bool bezier_arity = false;   // total coords must be 3n+1
};

inline const CmdShape* command_shape(std::string_view name) {
    struct Entry { const char* name; CmdShape shape; };
    // star par arrows minC maxC opt1 scalars body bezier
    static const Entry table[] = {
        {"psline",    {true, true, true, 2, -1, false, 0, BodyKind::None, false}},
        {"pscurve",   {true, true, true, 2, -1, false, 0, BodyKind::None, false}},
        {"psecurve",  {true, true, true, 4, -1, false, 0, BodyKind::None, false}},
        {"psbezier",  {true, true, true, 4, -1, false, 0, BodyKind::None, true}},
        {"pscbezier", {true, true, false, 4, -1, false, 0, BodyKind::None, true}},
        {"psccurve",  {true, true, false, 3, -1, false, 0, BodyKind::None, false}},
        {"pspolygon", {true, true, false, 2, -1, false, 0, BodyKind::None, false}},
        {"psdots",    {true, true, false, 1, -1, false, 0, BodyKind::None, false}},
        {"psdot",     {true, true, false, 0, 1, false, 0, BodyKind::None, false}},
        {"psframe",   {true, true, false, 1, 2, true, 0, BodyKind::None, false}},
        {"psdiamond", {true, true, false, 1, 2, true, 0, BodyKind::None, false}},
        {"pstriangle",{true, true, false, 1, 2, true, 0, BodyKind::None, false}},
        {"psellipse", {true, true, false, 1, 2, true, 0, BodyKind::None, false}},
        {"pscircle",  {true, true, false, 0, 1, true, 1, BodyKind::None, false}},
        {"psCircle",  {true, true, false, 0, 1, true, 0, BodyKind::None, false}},
        {"qdisk",     {false, false, false, 1, 1, false, 1, BodyKind::None, false}},
        {"qline",     {false, false, false, 2, 2, false, 0, BodyKind::None, false}},
        {"pswedge",   {true, true, false, 0, 1, true, 3, BodyKind::None, false}},
        {"psarc",     {true, true, true, 0, 1, true, 3, BodyKind::None, false}},
        {"psarcn",    {true, true, true, 0, 1, true, 3, BodyKind::None, false}},
        {"psellipticarc",  {true, true, true, 1, 2, true, 2, BodyKind::None, false}},
        {"psellipticarcn", {true, true, true, 1, 2, true, 2, BodyKind::None, false}},
        {"psellipticwedge",{true, true, false, 1, 2, true, 2, BodyKind::None, false}},
        {"parabola",  {true, true, true, 2, 2, false, 0, BodyKind::None, false}},
        {"psgrid",    {true, true, false, 0, 3, false, 0, BodyKind::None, false}},
        {"psframebox",   {true, true, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"psdblframebox",{true, true, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"psshadowbox",  {true, true, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"pscirclebox",  {true, true, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"psCirclebox",  {true, true, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"psovalbox",    {true, true, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"psdiabox",     {true, true, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"pstribox",     {true, true, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"pscustom",     {true, true, false, 0, 0, false, 0, BodyKind::Custom, false}},
        {"psclip",       {false, false, false, 0, 0, false, 0, BodyKind::Graphics, false}},
        {"endpsclip",    {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"psset",        {false, false, false, 0, 0, false, 1, BodyKind::None, false}},
        {"newpsstyle",   {false, false, false, 0, 0, false, 2, BodyKind::None, false}},
        {"newgray",      {false, false, false, 0, 0, false, 2, BodyKind::None, false}},
        {"newrgbcolor",  {false, false, false, 0, 0, false, 2, BodyKind::None, false}},
        {"newhsbcolor",  {false, false, false, 0, 0, false, 2, BodyKind::None, false}},
        {"newcmykcolor", {false, false, false, 0, 0, false, 2, BodyKind::None, false}},
        {"SpecialCoor",  {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"NormalCoor",   {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"Polar",        {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"radians",      {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"rotateleft",   {false, false, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"rotateright",  {false, false, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"rotatedown",   {false, false, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"Rotateleft",   {false, false, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"Rotateright",  {false, false, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"Rotatedown",   {false, false, false, 0, 0, false, 0, BodyKind::Label, false}},
        {"psscalebox",   {false, false, false, 0, 0, false, 1, BodyKind::Label, false}},
        // pscustom vocabulary (validity outside \pscustom is checked at
        // evaluation, mirroring "Command can only be used in \pscustom")
        {"newpath",   {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"moveto",    {false, false, false, 1, 1, false, 0, BodyKind::None, false}},
        {"closepath", {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"gsave",     {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"grestore",  {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"translate", {false, false, false, 1, 1, false, 0, BodyKind::None, false}},
        {"rotate",    {false, false, false, 0, 0, false, 1, BodyKind::None, false}},
        {"scale",     {false, false, false, 0, 0, false, 1, BodyKind::None, false}},
        {"msave",     {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"mrestore",  {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"swapaxes",  {false, false, false, 0, 0, false, 0, BodyKind::None, false}},
        {"stroke",    {true, true, false, 0, 0, false, 0, BodyKind::None, false}},
        {"fill",      {true, true, false, 0, 0, false, 0, BodyKind::None, false}},
        {"openshadow",  {true, true, false, 0, 0, false, 0, BodyKind::None, false}},
        {"closedshadow",{true, true, false, 0, 0, false, 0, BodyKind::None, false}},
        {"movepath",  {false, false, false, 1, 1, false, 0, BodyKind::None, false}},
        {"lineto",    {false, false, false, 1, 1, false, 0, BodyKind::None, false}},
        {"rlineto",   {false, false, false, 1, 1, false, 0, BodyKind::None, false}},
        {"curveto",   {false, false, false, 3, 3, false, 0, BodyKind::None, false}},
        {"rcurveto",  {false, false, false, 3, 3, false, 0, BodyKind::None, false}},
        {"code",      {false, false, false, 0, 0, false, 1, BodyKind::None, false}},
        {"coor",      {false, false, false, 1, -1, false, 0, BodyKind::None, false}},
        {"rcoor",     {false, false, false, 1, -1, false, 0, BodyKind::None, false}},
        {"dim",       {false, false, false, 0, 0, false, 1, BodyKind::None, false}},
        {"setcolor",  {false, false, false, 0, 0, false, 1, BodyKind::None, false}},
        {"arrows",    {false, false, false, 0, 0, false, 1, BodyKind::None, false}},
    };
    for (const auto& e : table)
        if (name == e.name) return &e.shape;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    Parser(std::vector<Token> toks, Diagnostics& diags)
        : toks_(std::move(toks)), diags_(diags) {}

    Ast parse() { return parse_items(/*stop=*/""); }

private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;
    Diagnostics& diags_;

    bool done() const { return i_ >= toks_.size(); }
    const Token& peek() const { return toks_[i_]; }
    Token take() { return toks_[i_++]; }
    bool next_is(TokKind k) const { return !done() && toks_[i_].kind == k; }

    // Parses items until the named closer command (or end of input).
    Ast parse_items(std::string_view stop) {
        Ast ast;
        while (!done()) {
            const Token& t = peek();
            if (t.kind == TokKind::Command) {
                if (!stop.empty() && t.text == stop) { take(); return ast; }
                if (t.text == "end") {
                    // \end{X}: match environment closers
                    if (!stop.empty() && i_ + 1 < toks_.size() &&
                        toks_[i_ + 1].kind == TokKind::BraceGroup) {
                        std::string env = toks_[i_ + 1].text;
                        if (!env.empty() && env.back() == '*') env.pop_back();
                        if (("end" + env) == stop) { take(); take(); return ast; }
                    }
                }
                auto cmd = parse_command();
                if (cmd) ast.items.push_back(std::move(*cmd));
                continue;
            }
            // Loose text at this level: keep as a text run so label bodies
            // and hbox sequences survive round trips.
            Cmd text;
            text.name = "@text";
            text.pos = t.pos;
            std::string run;
            while (!done() && peek().kind != TokKind::Command) {
                Token w = take();
                if (!run.empty()) run += ' ';
                switch (w.kind) {
                    case TokKind::Word: run += w.text; break;
                    case TokKind::Star: run += '*'; break;
                    case TokKind::BraceGroup: run += '{' + w.text + '}'; break;
                    case TokKind::BracketGroup: run += '[' + w.text + ']'; break;
                    case TokKind::ParenGroup: run += '(' + w.text + ')'; break;
                    default: break;
                }
            }
            text.text = run;
            ast.items.push_back(std::move(text));
        }
        if (!stop.empty())
            diags_.error(SourcePos{}, "missing \\" + std::string(stop));
        return ast;
    }

    std::optional<Cmd> parse_command() {
        Token name = take();
        Cmd cmd;
        cmd.name = name.text;
        cmd.pos = name.pos;

        if (cmd.name == "begin" || cmd.name == "pspicture")
            return parse_picture(cmd);
        if (cmd.name == "rput" || cmd.name == "Rput") return parse_rput(cmd);
        if (cmd.name == "uput") return parse_uput(cmd);
        if (cmd.name == "multirput") return parse_multirput(cmd);
        if (cmd.name == "multips") return parse_multips(cmd);
        if (cmd.name == "degrees") return parse_degrees(cmd);
        if (cmd.name == "Cartesian") return parse_cartesian_directive(cmd);
        if (cmd.name == "psscaleboxto") return parse_scaleboxto(cmd);
        if (cmd.name == "pstbox") return parse_pstbox(cmd);

        const CmdShape* shape = command_shape(cmd.name);
        if (!shape) {
            diags_.error(name.pos, "Graphics object `" + cmd.name + "' not defined");
            skip_command_tail();
            return std::nullopt;
        }
        if (shape->allow_star && next_is(TokKind::Star)) { take(); cmd.starred = true; }
        if (shape->takes_par && next_is(TokKind::BracketGroup)) {
            Token par = take();
            cmd.params = parse_keyvals(par.text, diags_, par.pos);
        }
        if (shape->takes_arrows && next_is(TokKind::BraceGroup) &&
            !(next_is(TokKind::ParenGroup))) {
            // a brace group before any coordinate is the arrow slot
            Token ar = take();
            cmd.arrow_spec = ar.text;
        }
        while (next_is(TokKind::ParenGroup) &&
               (shape->max_coords < 0 ||
                static_cast<int>(cmd.coords.size()) < shape->max_coords)) {
            Token g = take();
            cmd.coords.push_back(parse_coord(g.text, diags_, g.pos));
        }
        int given = static_cast<int>(cmd.coords.size());
        if (given < shape->min_coords) {
            if (shape->optional_first_coord && given + 1 >= shape->min_coords) {
                // handled below by defaulting
            } else {
                diags_.error(name.pos, "\\" + cmd.name + ": expected at least " +
                                           std::to_string(shape->min_coords) +
                                           " coordinates");
                return std::nullopt;
            }
        }
        if (shape->optional_first_coord && shape->max_coords > 0 &&
            given == shape->max_coords - 1) {
            RawCoord origin;
            origin.kind = RawCoord::Kind::Cartesian;
            origin.a = "0";
            origin.b = "0";
            origin.text = "0,0";
            origin.pos = name.pos;
            cmd.coords.insert(cmd.coords.begin(), origin);
        }
        if (shape->bezier_arity && (cmd.coords.size() % 3) != 1) {
            diags_.error(name.pos, "\\" + cmd.name + ": needs 3n+1 coordinates");
            return std::nullopt;
        }
        for (int k = 0; k < shape->num_scalars; ++k) {
            if (next_is(TokKind::BraceGroup) || next_is(TokKind::Word)) {
                cmd.scalar_args.push_back(take().text);
            } else {
                diags_.error(name.pos, "\\" + cmd.name + ": missing argument");
                return std::nullopt;
            }
        }
        switch (shape->body) {
            case BodyKind::None: break;
            case BodyKind::Label:
            case BodyKind::Custom:
            case BodyKind::Graphics: {
                if (!next_is(TokKind::BraceGroup)) {
                    diags_.error(name.pos, "\\" + cmd.name + ": missing body");
                    return std::nullopt;
                }
                Token body = take();
                cmd.bodies.push_back(parse_nested(body.text));
                break;
            }
        }
        return cmd;
    }

    Ast parse_nested(const std::string& content) {
        Parser sub(tokenize(content, diags_), diags_);
        return sub.parse();
    }

    // \pspicture or \begin{pspicture}: [par]? (c0)? (c1) ... \endpspicture
    std::optional<Cmd> parse_picture(Cmd cmd) {
        bool env_form = cmd.name == "begin";
        if (env_form) {
            if (!next_is(TokKind::BraceGroup)) {
                diags_.error(cmd.pos, "\\begin: missing environment name");
                return std::nullopt;
            }
            std::string env = take().text;
            if (env != "pspicture" && env != "pspicture*") {
                diags_.error(cmd.pos, "unsupported environment `" + env + "'");
                return std::nullopt;
            }
            cmd.name = "pspicture";
            if (env == "pspicture*") cmd.starred = true;
        }
        if (next_is(TokKind::Star)) { take(); cmd.starred = true; }
        if (next_is(TokKind::BracketGroup)) {
            Token par = take();
            cmd.params = parse_keyvals(par.text, diags_, par.pos);
        }
        while (next_is(TokKind::ParenGroup) && cmd.coords.size() < 2) {
            Token g = take();
            cmd.coords.push_back(parse_coord(g.text, diags_, g.pos));
        }
        if (cmd.coords.empty()) {
            diags_.error(cmd.pos, "\\pspicture: missing size");
            return std::nullopt;
        }
        if (cmd.coords.size() == 1) {
            RawCoord origin;
            origin.kind = RawCoord::Kind::Cartesian;
            origin.a = "0";
            origin.b = "0";
            origin.text = "0,0";
            origin.pos = cmd.pos;
            cmd.coords.insert(cmd.coords.begin(), origin);
        }
        cmd.bodies.push_back(parse_items(env_form ? "endpspicture" : "endpspicture"));
        return cmd;
    }

    // \rput * [ref] {rot} (coord) {stuff}
    std::optional<Cmd> parse_rput(Cmd cmd) {
        if (next_is(TokKind::Star)) { take(); cmd.starred = true; }
        if (cmd.name == "Rput" && next_is(TokKind::BraceGroup) &&
            i_ + 1 < toks_.size() && toks_[i_ + 1].kind == TokKind::BracketGroup) {
            // \Rput{labelsep}[ref]...
            cmd.scalar_args.push_back(take().text);
        }
        if (next_is(TokKind::BracketGroup)) {
            Token r = take();
            cmd.params.push_back(KeyVal{"ref", r.text, r.pos});
        }
        if (!next_is(TokKind::ParenGroup) &&
            (next_is(TokKind::BraceGroup) || next_is(TokKind::Word))) {
            Token rot = take();
            cmd.params.push_back(KeyVal{"rot", rot.text, rot.pos});
        }
        if (next_is(TokKind::ParenGroup)) {
            Token g = take();
            cmd.coords.push_back(parse_coord(g.text, diags_, g.pos));
        } else {
            cmd.coords.push_back(origin_coord(cmd.pos));
        }
        return finish_with_body(std::move(cmd));
    }

    // \uput * {labelsep} [refangle] {rot} (coord) {stuff}
    std::optional<Cmd> parse_uput(Cmd cmd) {
        if (next_is(TokKind::Star)) { take(); cmd.starred = true; }
        if (!next_is(TokKind::BracketGroup) &&
            (next_is(TokKind::BraceGroup) || next_is(TokKind::Word))) {
            Token sep = take();
            cmd.params.push_back(KeyVal{"labelsep", sep.text, sep.pos});
        }
        if (!next_is(TokKind::BracketGroup)) {
            diags_.error(cmd.pos, "\\uput: missing [refangle]");
            return std::nullopt;
        }
        Token ra = take();
        cmd.params.push_back(KeyVal{"refangle", ra.text, ra.pos});
        if (!next_is(TokKind::ParenGroup) &&
            (next_is(TokKind::BraceGroup) || next_is(TokKind::Word))) {
            Token rot = take();
            cmd.params.push_back(KeyVal{"rot", rot.text, rot.pos});
        }
        if (next_is(TokKind::ParenGroup)) {
            Token g = take();
            cmd.coords.push_back(parse_coord(g.text, diags_, g.pos));
        } else {
            cmd.coords.push_back(origin_coord(cmd.pos));
        }
        return finish_with_body(std::move(cmd));
    }

    // \multirput * [ref] {rot} (base)? (delta) {n} {stuff}; base and delta
    // are plain cartesian pairs.
    std::optional<Cmd> parse_multirput(Cmd cmd) {
        if (next_is(TokKind::Star)) { take(); cmd.starred = true; }
        if (next_is(TokKind::BracketGroup)) {
            Token r = take();
            cmd.params.push_back(KeyVal{"ref", r.text, r.pos});
        }
        if (!next_is(TokKind::ParenGroup) &&
            (next_is(TokKind::BraceGroup) || next_is(TokKind::Word))) {
            Token rot = take();
            cmd.params.push_back(KeyVal{"rot", rot.text, rot.pos});
        }
        while (next_is(TokKind::ParenGroup) && cmd.coords.size() < 2) {
            Token g = take();
            cmd.coords.push_back(parse_coord(g.text, diags_, g.pos));
        }
        if (cmd.coords.empty()) {
            diags_.error(cmd.pos, "\\multirput: missing increment");
            return std::nullopt;
        }
        if (cmd.coords.size() == 1) cmd.coords.insert(cmd.coords.begin(), origin_coord(cmd.pos));
        if (!(next_is(TokKind::BraceGroup) || next_is(TokKind::Word))) {
            diags_.error(cmd.pos, "\\multirput: missing repetition count");
            return std::nullopt;
        }
        cmd.scalar_args.push_back(take().text);
        return finish_with_body(std::move(cmd));
    }

    // \multips {rot}? (base)? (delta) {n} {graphics}
    std::optional<Cmd> parse_multips(Cmd cmd) {
        if (!next_is(TokKind::ParenGroup) &&
            (next_is(TokKind::BraceGroup) || next_is(TokKind::Word))) {
            Token rot = take();
            cmd.params.push_back(KeyVal{"rot", rot.text, rot.pos});
        }
        while (next_is(TokKind::ParenGroup) && cmd.coords.size() < 2) {
            Token g = take();
            cmd.coords.push_back(parse_coord(g.text, diags_, g.pos));
        }
        if (cmd.coords.empty()) {
            diags_.error(cmd.pos, "\\multips: missing increment");
            return std::nullopt;
        }
        if (cmd.coords.size() == 1) cmd.coords.insert(cmd.coords.begin(), origin_coord(cmd.pos));
        if (!(next_is(TokKind::BraceGroup) || next_is(TokKind::Word))) {
            diags_.error(cmd.pos, "\\multips: missing repetition count");
            return std::nullopt;
        }
        cmd.scalar_args.push_back(take().text);
        return finish_with_body(std::move(cmd));
    }

    std::optional<Cmd> parse_degrees(Cmd cmd) {
        if (next_is(TokKind::BracketGroup)) cmd.scalar_args.push_back(take().text);
        return cmd;
    }

    std::optional<Cmd> parse_cartesian_directive(Cmd cmd) {
        if (next_is(TokKind::ParenGroup)) {
            Token g = take();
            cmd.coords.push_back(parse_coord(g.text, diags_, g.pos));
        }
        return cmd;
    }

    std::optional<Cmd> parse_scaleboxto(Cmd cmd) {
        if (!next_is(TokKind::ParenGroup)) {
            diags_.error(cmd.pos, "\\psscaleboxto: missing dimensions");
            return std::nullopt;
        }
        Token g = take();
        cmd.coords.push_back(parse_coord(g.text, diags_, g.pos));
        return finish_with_body(std::move(cmd));
    }

    // \pstbox(w,h,d){text}: explicit-extent label placeholder
    std::optional<Cmd> parse_pstbox(Cmd cmd) {
        if (!next_is(TokKind::ParenGroup)) {
            diags_.error(cmd.pos, "\\pstbox: missing extents");
            return std::nullopt;
        }
        Token g = take();
        std::string t = g.text;
        std::size_t c1 = t.find(',');
        std::size_t c2 = c1 == std::string::npos ? std::string::npos : t.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            diags_.error(g.pos, "\\pstbox: expected (w,h,d)");
            return std::nullopt;
        }
        cmd.scalar_args.push_back(detail::trim(std::string_view(t).substr(0, c1)));
        cmd.scalar_args.push_back(detail::trim(std::string_view(t).substr(c1 + 1, c2 - c1 - 1)));
        cmd.scalar_args.push_back(detail::trim(std::string_view(t).substr(c2 + 1)));
        if (!next_is(TokKind::BraceGroup)) {
            diags_.error(cmd.pos, "\\pstbox: missing text");
            return std::nullopt;
        }
        cmd.text = take().text;
        return cmd;
    }

    std::optional<Cmd> finish_with_body(Cmd cmd) {
        if (!next_is(TokKind::BraceGroup)) {
            diags_.error(cmd.pos, "\\" + cmd.name + ": missing body");
            return std::nullopt;
        }
        Token body = take();
        cmd.bodies.push_back(parse_nested(body.text));
        return cmd;
    }

    RawCoord origin_coord(SourcePos pos) {
        RawCoord origin;
        origin.kind = RawCoord::Kind::Cartesian;
        origin.a = "0";
        origin.b = "0";
        origin.text = "0,0";
        origin.pos = pos;
        return origin;
    }

    // Error recovery: drop tokens until the next command.
    void skip_command_tail() {
        while (!done() && peek().kind != TokKind::Command) take();
    }
};

inline Ast parse(std::string_view src, Diagnostics& diags) {
    Parser p(tokenize(src, diags), diags);
    return p.parse();
}

// ---------------------------------------------------------------------------
// Pretty printer (output re-parses to a structurally equal Ast)

namespace detail {

inline bool value_needs_braces(const std::string& v) {
    int depth = 0;
    for (char c : v) {
        if (c == '{') ++depth;
        else if (c == '}') --depth;
        else if ((c == ',' || c == '=') && depth == 0) return true;
    }
    return v.empty();
}

inline std::string print_coord(const RawCoord& rc) {
    switch (rc.kind) {
        case RawCoord::Kind::Cartesian: return rc.a + "," + rc.b;
        case RawCoord::Kind::Polar: return rc.a + ";" + rc.b;
        case RawCoord::Kind::Raw: return "!" + rc.a + " " + rc.b;
        case RawCoord::Kind::Mixed:
            return print_coord(rc.sub[0]) + "|" + print_coord(rc.sub[1]);
        case RawCoord::Kind::Invalid: return rc.text;
    }
    return rc.text;
}

}  // namespace detail

inline std::string pretty_print(const Ast& ast);

inline std::string pretty_print(const Cmd& cmd) {
    if (cmd.name == "@text") return cmd.text;
    std::string out = "\\" + cmd.name;
    if (cmd.name == "pstbox") {
        out += "(" + cmd.scalar_args[0] + "," + cmd.scalar_args[1] + "," +
               cmd.scalar_args[2] + "){" + cmd.text + "}";
        return out;
    }
    if (cmd.starred) out += "*";

    // placement commands print their pseudo-params positionally
    bool placement = cmd.name == "rput" || cmd.name == "Rput" || cmd.name == "uput" ||
                     cmd.name == "multirput" || cmd.name == "multips";
    std::vector<KeyVal> params = cmd.params;
    if (placement) {
        for (const auto& kv : cmd.params) {
            if (kv.key == "labelsep") out += "{" + kv.value + "}";
        }
        for (const auto& kv : cmd.params) {
            if (kv.key == "ref" || kv.key == "refangle") out += "[" + kv.value + "]";
        }
        for (const auto& kv : cmd.params) {
            if (kv.key == "rot") out += "{" + kv.value + "}";
        }
        params.clear();
    }
    if (!params.empty()) {
        out += "[";
        bool first = true;
        for (const auto& kv : params) {
            if (!first) out += ",";
            first = false;
            out += kv.key + "=";
            if (detail::value_needs_braces(kv.value)) out += "{" + kv.value + "}";
            else out += kv.value;
        }
        out += "]";
    }
    if (cmd.arrow_spec) out += "{" + *cmd.arrow_spec + "}";
    if (cmd.name == "degrees") {
        for (const auto& s : cmd.scalar_args) out += "[" + s + "]";
        return out;
    }
    for (const auto& c : cmd.coords) out += "(" + detail::print_coord(c) + ")";
    bool count_before_body = cmd.name == "multirput" || cmd.name == "multips";
    if (!count_before_body && cmd.name != "psscalebox")
        for (const auto& s : cmd.scalar_args) out += "{" + s + "}";
    if (count_before_body) out += "{" + cmd.scalar_args.back() + "}";
    if (cmd.name == "psscalebox") out += "{" + cmd.scalar_args[0] + "}";
    if (cmd.name == "pspicture") {
        out += "\n" + pretty_print(cmd.bodies[0]) + "\\endpspicture";
        return out;
    }
    for (const auto& b : cmd.bodies) out += "{" + pretty_print(b) + "}";
    return out;
}

inline std::string pretty_print(const Ast& ast) {
    std::string out;
    for (const auto& item : ast.items) {
        out += pretty_print(item);
        out += "\n";
    }
    return out;
}

}  // namespace picoforge::syntax

#endif
