#pragma once

#include "ergoscope/error.hpp"

#include <optional>

// Kind of the ergoscope::Error thrown by fn, or nullopt when nothing is thrown.
template <class Fn>
std::optional<ergoscope::ErrorKind> error_kind(Fn&& fn) {
    try {
        fn();
    } catch (const ergoscope::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}
