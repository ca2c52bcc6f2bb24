#pragma once

// Text formats: design documents and certificate reports (JSON, 17
// significant digits) and fitted-parameter CSV.

#include <iosfwd>
#include <optional>
#include <string>

#include "inhibdesign/design.hpp"
#include "inhibdesign/transform.hpp"
#include "inhibdesign/verify.hpp"

namespace inhibdesign {

/// "%.17g"
std::string format_number(double value);

/// Optional context stored alongside a design so that `verify`,
/// `efficiency` and `simulate` can run without repeating every flag.
struct DesignMetadata {
  std::optional<Theta> theta;
  std::optional<DesignSpace> space;
  std::optional<TransformedSpace> transformed_space;
  std::optional<Criterion> criterion;
};

struct DesignDocument {
  Design design;
  DesignMetadata meta;
};

/// {"frame":"original","points":[{"S":..,"I":..,"w":..}], ...}; field names
/// x, y in the transformed frame. Metadata keys are written only when set.
std::string design_to_json(const Design& design,
                           const DesignMetadata& meta = {});

/// Throws std::invalid_argument on malformed documents.
DesignDocument design_from_json(const std::string& text);

std::string report_to_json(const CertificateReport& report);

}  // namespace inhibdesign
