#pragma once

#include "doctest.h"

#include <string>

// Expects fn() to throw E and the message to contain needle. Kept out of the
// CHECK_THROWS_WITH macro family so a partial match suffices.
template <typename E, typename Fn>
void check_throws_with(Fn&& fn, const std::string& needle) {
    bool threw = false;
    std::string msg;
    try {
        fn();
    } catch (const E& e) {
        threw = true;
        msg = e.what();
    }
    if (!threw) {
        FAIL_CHECK("expected an exception mentioning \"" << needle << "\", none was thrown");
        return;
    }
    CHECK_MESSAGE(msg.find(needle) != std::string::npos,
                  "message \"" << msg << "\" lacks \"" << needle << "\"");
}
