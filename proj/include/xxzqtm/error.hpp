#pragma once

#include <stdexcept>
#include <string>

namespace xxzqtm {

enum class errc {
    domain = 1,
    regime = 2,
    convergence = 3,
    io = 4,
    tracing = 5,
    collision = 6,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

    // process exit status used by the command-line driver
    int exit_status() const noexcept {
        switch (code_) {
        case errc::regime: return 2;
        case errc::io: return 4;
        case errc::domain: return 2;
        default: return 3;
        }
    }

    static const char* name(errc c) noexcept {
        switch (c) {
        case errc::domain: return "domain";
        case errc::regime: return "regime";
        case errc::convergence: return "convergence";
        case errc::io: return "io";
        case errc::tracing: return "tracing";
        case errc::collision: return "collision";
        }
        return "unknown";
    }

private:
    errc code_;
};

}  // namespace xxzqtm
