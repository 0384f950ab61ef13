#pragma once

#include <string>

#include "pennmm/dataset.hpp"
#include "pennmm/likelihood.hpp"

namespace pennmm::io {

// 17 significant digits: doubles round-trip exactly through text.
std::string format_double(double v);

// Header row required. Linear/GLM layout: response first, covariates after.
// Cox layout: columns `time`, `status`, then covariates.
Dataset read_csv(const std::string& path, Family family);
void write_csv(const Dataset& data, Family family, const std::string& path);

}  // namespace pennmm::io
