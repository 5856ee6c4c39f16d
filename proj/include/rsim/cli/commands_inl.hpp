// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <exception>
#include <ostream>

#include "rsim/core/error.hpp"

namespace rsim::cli {

template <typename Fn>
int guarded(Fn&& fn, std::ostream& err) {
  try {
    fn();
    return 0;
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace rsim::cli
