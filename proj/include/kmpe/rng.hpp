#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace kmpe {

/// Seeded, platform-portable random stream.
///
/// The engine is std::mt19937_64, whose output sequence the standard fixes. The
/// std:: distributions are implementation-defined, so uniform, index and normal
/// draws are derived here from raw engine words:
///   uniform(): top 53 bits scaled into [0, 1)
///   index(b):  rejection sampling on the 64-bit word (no modulo bias)
///   normal():  Box-Muller, both variates used in order
class Rng {
public:
    static constexpr std::string_view kDescription =
        "mt19937_64; uniform=53-bit; index=rejection; normal=Box-Muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();
    std::size_t index(std::size_t bound);
    double normal();

    /// `count` distinct indices from [0, total), in draw order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t count, std::size_t total);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace kmpe
