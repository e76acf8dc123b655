// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace skipfree {

/// Locale-independent decimal rendering with 17 significant digits. Infinities
/// render as "inf" and "-inf", NaN as "nan".
std::string format_double(double v);

} // namespace skipfree
