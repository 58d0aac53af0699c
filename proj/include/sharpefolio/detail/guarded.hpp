#pragma once

#include <exception>
#include <ostream>

#include "sharpefolio/error.hpp"

namespace sharpefolio {

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(e.error_class());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorClass::Runtime);
    }
}

} // namespace sharpefolio
