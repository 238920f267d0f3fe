#include "nst/diag.hpp"

#include <sstream>

namespace nst {

std::string SourceExtent::str() const {
  std::ostringstream os;
  os << file << ":" << start.line << ":" << start.col << "-" << end.line << ":"
     << end.col;
  return os.str();
}

std::string Diagnostic::str() const {
  std::ostringstream os;
  os << extent.str() << " "
     << (severity == Severity::Error ? "error" : "warning") << " " << code
     << " " << message;
  return os.str();
}

std::string render(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    out += d.str();
    out += '\n';
  }
  return out;
}

}  // namespace nst
