#pragma once

#include <stdexcept>
#include <string>

namespace xferop {

// Every failure raised by the library carries a stable code so the CLI can
// map it to an exit status and tests can match on it.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

inline Error parse_error(const std::string& msg) { return Error("ParseError", msg); }
inline Error depth_exceeded(const std::string& msg) { return Error("DepthExceeded", msg); }
inline Error out_of_domain(const std::string& msg) { return Error("OutOfDomain", msg); }
inline Error not_validated(const std::string& msg) { return Error("NotValidated", msg); }
inline Error not_regular(const std::string& msg) { return Error("NotRegular", msg); }
inline Error not_local_homeo(const std::string& msg) { return Error("NotLocalHomeo", msg); }
inline Error support_violation(const std::string& msg) { return Error("SupportViolation", msg); }
inline Error empty_basis(const std::string& msg) { return Error("EmptyBasis", msg); }
inline Error hypothesis_violated(const std::string& msg) { return Error("HypothesisViolated", msg); }
inline Error out_of_spectrum(const std::string& msg) { return Error("OutOfSpectrum", msg); }
inline Error unsupported(const std::string& msg) { return Error("Unsupported", msg); }

}  // namespace xferop
