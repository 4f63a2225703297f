#pragma once

#include <stdexcept>
#include <string>

namespace bcft {

enum class Errc {
    invalid_parameter,
    charged_ir_divergence,
    charged_at_zero,
    total_charge,
    coincident_point,
    invalid_geometry,
    support_overflow,
    insufficient_data,
    non_modular_data,
    invalid_input,
};

inline const char* errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::charged_ir_divergence: return "charged-ir-divergence";
    case Errc::charged_at_zero: return "charged-at-zero";
    case Errc::total_charge: return "total-charge";
    case Errc::coincident_point: return "coincident-point";
    case Errc::invalid_geometry: return "invalid-geometry";
    case Errc::support_overflow: return "support-overflow";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::non_modular_data: return "non-modular-data";
    case Errc::invalid_input: return "invalid-input";
    }
    return "unknown";
}

/// Numerical guard or precondition failure raised by the core modules.
/// The name() is stable and surfaces unchanged in CLI reports.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }
    const char* name() const noexcept { return errc_name(code_); }

private:
    Errc code_;
};

}  // namespace bcft
