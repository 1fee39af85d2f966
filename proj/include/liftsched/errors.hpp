#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace liftsched {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input / model errors
struct CycleDetected : Error {
    std::vector<std::string> cycle;  // witness: job ids forming a cycle
    explicit CycleDetected(std::vector<std::string> c)
        : Error("precedence cycle: " + join(c)), cycle(std::move(c)) {}
    static std::string join(const std::vector<std::string>& c) {
        std::string s;
        for (const auto& id : c) {
            if (!s.empty()) s += " -> ";
            s += id;
        }
        return s;
    }
};

struct InvalidInstance : Error { using Error::Error; };
struct InvalidEpsilon : Error { using Error::Error; };
struct UnknownTask : Error { using Error::Error; };
struct InvalidOrder : Error { using Error::Error; };
struct TraceMismatch : Error { using Error::Error; };
struct HorizonTooSmall : Error { using Error::Error; };
struct SupportOutsideRoot : Error { using Error::Error; };
struct WitnessSearchFailed : Error { using Error::Error; };

// Resource-cap errors (CLI exit code 3)
struct SizeBlowup : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };
struct LevelExhausted : Error { using Error::Error; };
struct ZeroMass : Error { using Error::Error; };

}  // namespace liftsched
