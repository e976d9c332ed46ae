#pragma once

#include <stdexcept>
#include <string>

namespace kinslab {

// Collision kernel description. The cutoff kind is |v-v1|^gamma * b0*|cos(theta)|;
// hard spheres are gamma = 1, b0 = 1.
struct CollisionKernel {
    enum class Kind { BGK, Cutoff };

    Kind kind = Kind::BGK;
    double gamma = 1.0;
    double b0 = 1.0;
    // Radial quadrature points for the reduced gain kernel at gamma != 1.
    int gain_quadrature = 48;

    void validate() const {
        if (kind == Kind::Cutoff) {
            if (gamma <= -3.0 || gamma > 1.0)
                throw std::invalid_argument("collision kernel: gamma must lie in (-3, 1]");
            if (b0 <= 0.0)
                throw std::invalid_argument("collision kernel: angular bound must be positive");
        }
    }

    bool is_bgk() const { return kind == Kind::BGK; }

    std::string cache_tag() const;
};

}  // namespace kinslab
