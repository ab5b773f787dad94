#pragma once

#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace dgtrace {

enum class Severity { note, warning, error };

inline std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::note:
      return "NOTE";
    case Severity::warning:
      return "WARNING";
    case Severity::error:
      return "ERROR";
  }
  return "?";
}

// One line of the diagnostics stream: "SEVERITY module:line message".
struct Diagnostic {
  Severity severity = Severity::warning;
  std::string module;
  int line = 0;
  std::string message;

  std::string str() const {
    std::ostringstream os;
    os << to_string(severity) << ' ' << (module.empty() ? "-" : module) << ':' << line << ' '
       << message;
    return os.str();
  }

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

inline void write_diagnostics(std::ostream& os, const Diagnostics& diags) {
  for (const auto& d : diags) os << d.str() << '\n';
}

inline std::size_t count_severity(const Diagnostics& diags, Severity s) {
  std::size_t n = 0;
  for (const auto& d : diags) n += d.severity == s ? 1 : 0;
  return n;
}

}  // namespace dgtrace
