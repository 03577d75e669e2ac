#pragma once

#include <stdexcept>
#include <string>

namespace umbilic {

enum class ErrorKind {
    Domain,          // point outside the valid chart region
    EmptyBody,       // intersection of balls is empty
    NonCompact,      // body reaches the model boundary / leaves the hemisphere
    Degenerate,      // tangency or non-generic vertex within tolerance
    BlowUp,          // curvature ODE blows up before the requested time
    EmptyErosion,    // compact ball eroded past its inradius
    NonCompactSphere,// area requested for a horosphere or equidistant
    ToleranceNotMet, // quadrature budget exhausted
    Unattainable,    // root finding could not bracket the target
    EventNearby,     // finite-difference stencil straddles a combinatorial event
    Parse,           // malformed input file
    InvalidArgument,
};

inline const char *toString(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::EmptyBody: return "EmptyBody";
    case ErrorKind::NonCompact: return "NonCompact";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::EmptyErosion: return "EmptyErosion";
    case ErrorKind::NonCompactSphere: return "NonCompactSphere";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::Unattainable: return "Unattainable";
    case ErrorKind::EventNearby: return "EventNearby";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class GeometryError : public std::runtime_error {
public:
    GeometryError(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(toString(kind)) + ": " + what), m_kind(kind) {}

    ErrorKind kind() const { return m_kind; }

private:
    ErrorKind m_kind;
};

} // namespace umbilic
