#pragma once

#include <string>

namespace qhd {

/// Fixed 17-significant-digit rendering used by every report and message.
std::string format_double(double value);

}  // namespace qhd
