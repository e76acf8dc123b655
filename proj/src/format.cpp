// SPDX-License-Identifier: Apache-2.0
#include "skipfree/format.hpp"

#include <charconv>
#include <cmath>

namespace skipfree {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, end);
}

} // namespace skipfree
