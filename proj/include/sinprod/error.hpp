#pragma once

#include <stdexcept>
#include <string>

namespace sinprod {

enum class errc {
  depth_exceeds_precision,
  invalid_argument,
  invalid_sample_count,
  depth_too_large,
  degenerate_fit,
  insufficient_data,
  zero_factor,
  certificate_unavailable,
  parse_error,
};

inline const char* to_string(errc code) {
  switch (code) {
    case errc::depth_exceeds_precision: return "DepthExceedsPrecision";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::invalid_sample_count: return "InvalidSampleCount";
    case errc::depth_too_large: return "DepthTooLarge";
    case errc::degenerate_fit: return "DegenerateFit";
    case errc::insufficient_data: return "InsufficientData";
    case errc::zero_factor: return "ZeroFactor";
    case errc::certificate_unavailable: return "CertificateUnavailable";
    case errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace sinprod
