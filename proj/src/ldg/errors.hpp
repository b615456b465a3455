#ifndef LDG_ERRORS_HPP
#define LDG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ldg {

// Bad argument values (non-unit director, non-positive material constant, ...).
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Config file problems; line is 1-based, 0 when not tied to a specific line.
struct config_error : std::runtime_error {
    int line;
    config_error(int line_, const std::string& msg)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

// Raised by project_to_uniaxial when the eigenvalue gap condition S > 8|R|
// fails; carries (S, R) so callers can widen tolerance or skip the point.
struct degenerate_projection_error : std::runtime_error {
    double S, R;
    degenerate_projection_error(double S_, double R_)
        : std::runtime_error("degenerate projection: gap condition S > 8|R| fails (S=" +
                             std::to_string(S_) + ", R=" + std::to_string(R_) + ")"),
          S(S_),
          R(R_) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ldg

#endif
