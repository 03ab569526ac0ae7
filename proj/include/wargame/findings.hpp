#pragma once

#include <string>
#include <vector>

namespace wargame {

enum class Severity { error, warning };

/// One validation observation. `code` is a stable machine-readable kind
/// (e.g. "dependency-cycle"); `subject` names the offending element.
struct Finding {
    Severity severity = Severity::error;
    std::string code;
    std::string subject;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    void error(std::string code, std::string subject, std::string message) {
        findings.push_back({Severity::error, std::move(code), std::move(subject), std::move(message)});
    }
    void warning(std::string code, std::string subject, std::string message) {
        findings.push_back({Severity::warning, std::move(code), std::move(subject), std::move(message)});
    }
    void append(const ValidationReport& other) {
        findings.insert(findings.end(), other.findings.begin(), other.findings.end());
    }

    [[nodiscard]] std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& f : findings) n += f.severity == Severity::error ? 1 : 0;
        return n;
    }
    [[nodiscard]] bool ok() const { return error_count() == 0; }
    [[nodiscard]] bool has(const std::string& code) const {
        for (const auto& f : findings)
            if (f.code == code) return true;
        return false;
    }
};

inline const char* to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

}  // namespace wargame
