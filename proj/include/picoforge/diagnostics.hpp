#ifndef PICOFORGE_DIAGNOSTICS_HPP
#define PICOFORGE_DIAGNOSTICS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace picoforge {

enum class Severity { Note, Warning, Error };

struct SourcePos {
    int line = 0;  // 1-based; 0 = unknown
    int col = 0;
};

struct Diagnostic {
    Severity severity = Severity::Warning;
    SourcePos pos;
    std::string message;
};

/// Collects diagnostics for one compilation, capped so pathological inputs
/// cannot produce unbounded output.
class Diagnostics {
public:
    explicit Diagnostics(std::size_t cap = 100) : cap_(cap) {}

    void report(Severity sev, SourcePos pos, std::string msg) {
        if (sev == Severity::Error) ++error_count_;
        else if (sev == Severity::Warning) ++warning_count_;
        if (items_.size() < cap_) {
            items_.push_back(Diagnostic{sev, pos, std::move(msg)});
        } else {
            overflowed_ = true;
        }
    }
    void error(SourcePos pos, std::string msg) { report(Severity::Error, pos, std::move(msg)); }
    void warning(SourcePos pos, std::string msg) { report(Severity::Warning, pos, std::move(msg)); }
    void note(SourcePos pos, std::string msg) { report(Severity::Note, pos, std::move(msg)); }

    const std::vector<Diagnostic>& items() const { return items_; }
    std::size_t error_count() const { return error_count_; }
    std::size_t warning_count() const { return warning_count_; }
    bool overflowed() const { return overflowed_; }
    bool empty() const { return items_.empty(); }

    /// True if any collected message contains the given fragment.
    bool contains(const std::string& fragment) const {
        for (const auto& d : items_)
            if (d.message.find(fragment) != std::string::npos) return true;
        return false;
    }

private:
    std::size_t cap_;
    std::size_t error_count_ = 0;
    std::size_t warning_count_ = 0;
    bool overflowed_ = false;
    std::vector<Diagnostic> items_;
};

}  // namespace picoforge

#endif
