#ifndef PICOFORGE_FIXNUM_HPP
#define PICOFORGE_FIXNUM_HPP

// Scaled-point arithmetic. Lengths are integer counts of scaled points
// (1 pt = 65536 sp) and every operation here reproduces the corresponding
// TeX integer arithmetic bit for bit: dimension parsing, the dimension
// printer, guarded fixed-point division and the iterative hypotenuse.

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace picoforge {

using Sp = std::int64_t;

inline constexpr Sp kSpPerPt = 65536;
inline constexpr Sp kMaxDimen = 1073741823;  // 2^30 - 1
inline constexpr Sp kCm = 1864679;           // 1 cm, exact TeX conversion

struct Num {
    int sign = +1;             // +1 or -1
    long long int_part = 0;    // non-negative
    std::string frac;          // decimal digits, possibly empty

    double value() const {
        double f = 0.0, scale = 0.1;
        for (char c : frac) { f += (c - '0') * scale; scale *= 0.1; }
        return sign * (static_cast<double>(int_part) + f);
    }
    bool is_zero() const {
        if (int_part != 0) return false;
        for (char c : frac) if (c != '0') return false;
        return true;
    }
    /// Canonical decimal: the digits the engine prints back, no leading '+'.
    std::string format() const {
        std::string out;
        if (sign < 0) out += '-';
        out += std::to_string(int_part);
        out += '.';
        out += frac;
        return out;
    }
};

/// TeX's number validator. Accepts an optional single leading '-', digits
/// and at most one '.'. Everything else (two dots, stray characters,
/// embedded signs) is rejected; the caller substitutes 0 and reports
/// "Bad number".
inline std::optional<Num> parse_number(std::string_view text) {
    Num n;
    std::size_t i = 0;
    if (i < text.size() && text[i] == '-') { n.sign = -1; ++i; }
    std::string int_digits, frac_digits;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            (seen_dot ? frac_digits : int_digits) += c;
        } else {
            return std::nullopt;
        }
    }
    // The macro reads the parts into TeX count registers ("0" + int part,
    // "1" + fraction); values that overflow them are rejected.
    if (frac_digits.size() > 9) return std::nullopt;
    n.int_part = 0;
    for (char c : int_digits) {
        n.int_part = n.int_part * 10 + (c - '0');
        if (n.int_part > 2147483647LL) return std::nullopt;
    }
    n.frac = frac_digits;
    if (text.empty()) return std::nullopt;
    return n;
}

/// TeX's print_scaled: shortest decimal with at most five fractional
/// digits that re-reads to the same scaled value. No unit suffix.
inline std::string format_sp(Sp s) {
    std::string out;
    long long v = s;
    if (v < 0) { out += '-'; v = -v; }
    out += std::to_string(v / kSpPerPt);
    out += '.';
    v = 10 * (v % kSpPerPt) + 5;
    long long delta = 10;
    do {
        if (delta > kSpPerPt) v += 32768 - 50000;  // round the final digit
        out += static_cast<char>('0' + v / kSpPerPt);
        v = 10 * (v % kSpPerPt);
        delta *= 10;
    } while (v > delta);
    return out;
}

inline double sp_to_pt(Sp s) { return static_cast<double>(s) / kSpPerPt; }
inline Sp pt_to_sp(double pt) {
    double v = pt * kSpPerPt;
    return static_cast<Sp>(v >= 0 ? v + 0.5 : v - 0.5);
}

namespace detail {

/// round_decimals: decimal digit string -> fraction in 2^-16 units.
inline long long round_decimals(std::string_view digits) {
    long long a = 0;
    std::size_t k = digits.size();
    if (k > 17) k = 17;
    while (k > 0) {
        --k;
        a = (a + (digits[k] - '0') * 131072LL) / 10;
    }
    return (a + 1) / 2;
}

/// xn_over_d with truncation toward zero; optionally yields |x|*n mod d.
inline long long xn_over_d(long long x, long long n, long long d, long long* rem = nullptr) {
    bool neg = x < 0;
    if (neg) x = -x;
    long long q = (x * n) / d;
    if (rem) *rem = (x * n) % d;
    return neg ? -q : q;
}

}  // namespace detail

/// <decimal constant> * <dimen register>, exactly as TeX scans it
/// (e.g. "1.25\pslinewidth"). Saturates at the dimension ceiling.
inline Sp decimal_times_sp(const Num& n, Sp v, bool* overflow = nullptr) {
    long long f = detail::round_decimals(n.frac);
    long long r = n.int_part * v + detail::xn_over_d(v, f, 65536);
    if (n.sign < 0) r = -r;
    if (r > kMaxDimen) { if (overflow) *overflow = true; r = kMaxDimen; }
    if (r < -kMaxDimen) { if (overflow) *overflow = true; r = -kMaxDimen; }
    return r;
}

struct UnitRatio {
    const char* name;
    long long num;
    long long den;
};

/// TeX's physical unit ratios relative to pt.
inline constexpr UnitRatio kUnitRatios[] = {
    {"pt", 1, 1},     {"in", 7227, 100}, {"pc", 12, 1},     {"cm", 7227, 254},
    {"mm", 7227, 2540}, {"bp", 7227, 7200}, {"dd", 1238, 1157}, {"cc", 14856, 1157},
};

/// Parses "<number>[unit]" into scaled points. A bare number is scaled by
/// default_unit (the active unit register); explicit units use TeX's exact
/// integer conversions. Returns nullopt for malformed text.
inline std::optional<Sp> parse_length(std::string_view text, Sp default_unit,
                                      bool* overflow = nullptr) {
    std::size_t i = 0, n = text.size();
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    int sign = +1;
    while (i < n && (text[i] == '+' || text[i] == '-')) {
        if (text[i] == '-') sign = -sign;
        ++i;
        while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    }
    std::string int_digits, frac_digits;
    while (i < n && text[i] >= '0' && text[i] <= '9') int_digits += text[i++];
    if (i < n && text[i] == '.') {
        ++i;
        while (i < n && text[i] >= '0' && text[i] <= '9') frac_digits += text[i++];
    }
    if (int_digits.empty() && frac_digits.empty()) return std::nullopt;
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string unit;
    while (i < n && std::isalpha(static_cast<unsigned char>(text[i])))
        unit += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i++])));
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i != n) return std::nullopt;

    long long ip = 0;
    if (int_digits.size() > 17) return std::nullopt;
    for (char c : int_digits) ip = ip * 10 + (c - '0');

    long long result;
    if (unit.empty()) {
        Num num;
        num.sign = 1;
        num.int_part = ip;
        num.frac = frac_digits;
        result = decimal_times_sp(num, default_unit, overflow);
    } else if (unit == "sp") {
        result = ip;  // fraction is dropped, as TeX does
    } else {
        const UnitRatio* ratio = nullptr;
        for (const auto& u : kUnitRatios)
            if (unit == u.name) { ratio = &u; break; }
        if (!ratio) return std::nullopt;
        long long cur = ip;
        long long f = detail::round_decimals(frac_digits);
        if (ratio->num != 1 || ratio->den != 1) {
            long long rem = 0;
            cur = detail::xn_over_d(cur, ratio->num, ratio->den, &rem);
            f = (ratio->num * f + 65536 * rem) / ratio->den;
            cur += f / 65536;
            f %= 65536;
        }
        if (cur >= 16384) {  // TeX: "Dimension too large"
            if (overflow) *overflow = true;
            cur = 16383;
            f = 65535;
        }
        result = cur * 65536 + f;
    }
    result *= sign;
    if (result > kMaxDimen) { if (overflow) *overflow = true; result = kMaxDimen; }
    if (result < -kMaxDimen) { if (overflow) *overflow = true; result = -kMaxDimen; }
    return result;
}

/// Guarded fixed-point division. Yields a/b expressed in sp-of-a-pt
/// (value/65536 ~ a/b): g starts at a and is scaled up by 16 while it
/// stays under 67108863, otherwise the divisor count is scaled down;
/// four rounds, then one integer division.
inline Sp sp_div(Sp a, Sp b, bool* div_by_zero = nullptr) {
    if (b == 0) {
        if (div_by_zero) *div_by_zero = true;
        return 0;
    }
    long long g = a;
    long long c = b;
    for (int round = 0; round < 4; ++round) {
        long long mag = g < 0 ? -g : g;
        if (mag < 67108863) g *= 16;
        else c /= 16;
    }
    if (c == 0) {
        if (div_by_zero) *div_by_zero = true;
        return 0;
    }
    return g / c;
}

/// Iterative hypotenuse: |a|,|b| -> ~sqrt(a^2+b^2). Three Newton rounds
/// over the guarded division, seeded from the normalized ratio 8|a|/s,
/// with the intermediate square taken through the decimal printer exactly
/// as the macro engine does.
inline Sp sp_pyth(Sp a, Sp b, bool* overflow = nullptr) {
    long long da = a < 0 ? -a : a;
    long long db = b < 0 ? -b : b;
    db += da;                       // s = |a| + |b|
    if (db == 0) return 0;
    da *= 8;
    long long g = sp_div(da, db);   // 8|a|/s in sp-of-a-pt
    g -= 4 * kSpPerPt;
    g *= 2;
    Num t = *parse_number(format_sp(g));
    long long sq = decimal_times_sp(t, g, overflow);  // g^2 / 65536
    sq += 64 * kSpPerPt;
    sq /= 2;
    long long d = 7 * kSpPerPt;
    for (int it = 0; it < 3; ++it) {
        long long q = sp_div(sq, d);
        d = (d + q) / 2;
    }
    Num t2 = *parse_number(format_sp(d));
    long long r = decimal_times_sp(t2, db, overflow);
    return r / 8;
}

struct UnitRegisters {
    Sp unit = kCm;
    Sp xunit = kCm;
    Sp yunit = kCm;
    // runit aliases the plain unit register (the engine \lets them equal).
    Sp runit() const { return unit; }

    void set_unit(Sp v) { unit = v; xunit = v; yunit = v; }
    void set_runit(Sp v) { unit = v; }
};

}  // namespace picoforge

#endif
