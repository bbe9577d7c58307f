#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pxeig/domain_grid.hpp"
#include "pxeig/exponent_field.hpp"

namespace pxeig {

// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

// Field CSV: header row, node coordinates first, value last; one row per
// active node in index order.
void write_field_csv(std::ostream& out, const ScalarField& f, const std::string& value_name = "u");
void write_field_csv(const std::filesystem::path& path, const ScalarField& f, const std::string& value_name = "u");
// Rows must name active nodes of dom; nodes not listed stay 0. Throws DataError on malformed input.
ScalarField read_field_csv(std::istream& in, const DomainPtr& dom);
ScalarField read_field_csv(const std::filesystem::path& path, const DomainPtr& dom);

/**
 * Domain JSON:
 *   {"kind": "interval",  "bounds": [a, b],           "resolution": n}
 *   {"kind": "rectangle", "bounds": [x0, x1, y0, y1], "resolution": nx}
 *   {"kind": "mask",      "bounds": [x0, x1, y0, y1], "rows": ["..##..", ...]}
 *   {"kind": "mask",      "bounds": [...], "mask": "disc.pgm" | "disc.csv"}
 * resolution counts cells along x. Mask rows run top (max y) to bottom;
 * '#' or '1' marks an inside node. Relative files resolve against base_dir.
 * Throws ConfigError naming the offending path.
 */
DomainPtr domain_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                           const std::string& path = "domain");

/**
 * Exponent JSON:
 *   {"kind": "constant", "value": 2}
 *   {"kind": "affine",   "coeffs": [a0, a1(, a2)]}
 *   {"kind": "sampled",  "nx": n, "ny": m, "samples": [...]}
 *   {"kind": "sampled",  "samples": "p.csv"}   (x[, y], p rows, x fastest)
 * The box is taken from the domain.
 */
VariableExponent exponent_from_json(const nlohmann::json& j, const Box& box, const std::filesystem::path& base_dir = {},
                                    const std::string& path = "exponent");

std::vector<std::vector<std::uint8_t>> read_mask_pgm(const std::filesystem::path& path);
std::vector<std::vector<std::uint8_t>> read_mask_csv(const std::filesystem::path& path);

}  // namespace pxeig
