#pragma once

#include <iostream>
#include <string>

namespace cyclodsp {

/// Warning sink, defaults to stderr. Tests may redirect or silence it.
inline std::ostream*& log_sink() {
    static std::ostream* sink = &std::cerr;
    return sink;
}

inline void log_warn(const std::string& msg) {
    if (log_sink() != nullptr) {
        (*log_sink()) << "[cyclodsp] warning: " << msg << '\n';
    }
}

} // namespace cyclodsp
