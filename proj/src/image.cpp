#include "sfp/image.hpp"

#include <cstdlib>
#include <thread>

namespace sfp {

std::string to_string(const Dims& d) {
    return std::to_string(d.width) + "x" + std::to_string(d.height);
}

void require_same_dims(const Dims& a, const Dims& b, const std::string& what) {
    if (!(a == b)) {
        throw ShapeError(what + ": dimension mismatch " + to_string(a) + " vs " + to_string(b));
    }
}

unsigned thread_count() {
    if (const char* env = std::getenv("SFP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace sfp
