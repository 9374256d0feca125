#include "tract/result.hpp"

#include <sstream>

namespace tract {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::ArityError: return "ArityError";
        case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
        case ErrorKind::EvalDomain: return "EvalDomain";
        case ErrorKind::BeyondRank: return "BeyondRank";
        case ErrorKind::Unbounded: return "Unbounded";
        case ErrorKind::ValidationFailed: return "ValidationFailed";
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::DimensionOutOfRange: return "DimensionOutOfRange";
        case ErrorKind::DegenerateGrid: return "DegenerateGrid";
        case ErrorKind::NoPassingPoint: return "NoPassingPoint";
        case ErrorKind::NotCertified: return "NotCertified";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

std::string Error::describe() const {
    std::ostringstream os;
    os << to_string(kind) << ": " << message;
    if (d || j || eps || offset) {
        os << " [";
        const char* sep = "";
        if (d) { os << sep << "d=" << *d; sep = ", "; }
        if (j) { os << sep << "j=" << *j; sep = ", "; }
        if (eps) { os << sep << "eps=" << *eps; sep = ", "; }
        if (offset) { os << sep << "offset=" << *offset; }
        os << "]";
    }
    return os.str();
}

}  // namespace tract
