// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>

namespace lamm {

using WarningSink = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink (default: stderr). Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace lamm
