#pragma once

#include <string>

namespace testutil {

// True iff f() throws E and the message contains `needle`.
template <typename E, typename F>
bool throws_containing(F&& f, const std::string& needle) {
    try {
        f();
    } catch (const E& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    } catch (...) {
        return false;
    }
    return false;
}

}  // namespace testutil
