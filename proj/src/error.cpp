#include "netcong/error.hpp"

namespace netcong {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::duplicate: return "duplicate entity";
    case ErrorKind::reference: return "unknown reference";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::format: return "format error";
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::numeric: return "numeric failure";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace netcong
