#pragma once

#include <string>

#include "pyrtex/image.hpp"

namespace pyrtex {

/// File-protocol hook for external image tools.
///
/// The command template must contain {in} and {out} placeholders. The input
/// image is written as PNG to a unique temp path, the command runs via
/// /bin/sh with the placeholders substituted, and the output PNG is read
/// back. The temp directory is removed afterwards, success or not.
///
/// Throws ConfigError if a placeholder is missing, ExternalToolError for a
/// nonzero exit, a timeout, or a missing/unreadable output file.
Image run_external_image_command(const std::string& command_template, const Image& input,
                                 double timeout_seconds = 120.0);

}  // namespace pyrtex
