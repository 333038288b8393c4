#include "dcrp/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace dcrp {

unsigned resolve_threads(unsigned requested) {
    if (const char* env = std::getenv("CRP_THREADS")) {
        unsigned v = 0;
        const auto [p, ec] = std::from_chars(env, env + std::strlen(env), v);
        if (ec == std::errc{} && *p == '\0') requested = v;
    }
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

} // namespace dcrp
