#include "nilring/errors.hpp"

#include <cmath>
#include <cstdio>

namespace nilring {

std::string WorkBudget::format_ops(double ops) {
    char buf[64];
    if (ops < 1e15 && ops == std::floor(ops)) {
        std::snprintf(buf, sizeof(buf), "%.0f", ops);
    } else {
        std::snprintf(buf, sizeof(buf), "%.3g", ops);
    }
    return buf;
}

}  // namespace nilring
