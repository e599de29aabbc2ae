#include "tacsim/error.hpp"

namespace tacsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Config: return "config";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::DegenerateContact: return "degenerate-contact";
    case ErrorKind::DegenerateFrame: return "degenerate-frame";
    case ErrorKind::Domain: return "domain";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace tacsim
